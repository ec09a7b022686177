#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/manifold.hpp"

namespace tonelli {

/// Properties a fixture is documented to have. Unset optionals are not
/// asserted for that fixture. Every asserted flag carries a short
/// mathematical rationale; tests audit that none is empty.
struct ExpectedProperties {
  std::optional<bool> invariant;
  std::optional<bool> lagrangian;
  std::optional<bool> graph;
  std::optional<bool> conjugate_free;
  /// Kernel dimension of the restricted form at every grid point, when it is
  /// constant; kernel_dim_varies marks fixtures whose rank changes over the
  /// manifold (then kernel_dim is unset).
  std::optional<int> kernel_dim;
  bool kernel_dim_varies = false;
  /// Expected diagonal of the base winding matrix (off-diagonal entries are
  /// expected to vanish). The identity diagonal marks the homotopy class of
  /// the zero section.
  std::optional<std::vector<int>> winding_diagonal;

  std::map<std::string, std::string> rationale;
};

struct FixtureOptions {
  int grid_resolution = 32;
  /// Momentum shear profile of the equilibrium torus: psi(x) = psi_amplitude
  /// * sin(2 pi x) / (2 pi).
  double psi_amplitude = 1.0;
  /// Second-harmonic weight of the folded base circle map
  /// eta(x) = x + (sin(2 pi x) + s sin(4 pi x)) / (2 pi).
  /// Values above (2 + sqrt(2))/8 make eta' negative somewhere, so eta folds
  /// and the embedding stops being a graph while keeping degree 1.
  double fold_s = 0.5;
  /// Amplitude of the null-degree base circle map eta0(x) = a * sin(2 pi x).
  double degree_zero_amp = 1.0 / (4.0 * M_PI);
};

struct Fixture {
  std::string name;
  HamiltonianSpec hamiltonian;
  std::optional<ParamSubmanifold> manifold;
  ExpectedProperties expected;
  /// Seeds suitable for conjugate-point scans (away from fixed points).
  std::vector<PhasePoint> scan_seeds;
  double conjugate_horizon = 100.0;
};

/// Registry. Throws on unknown names.
Fixture make_fixture(const std::string& name, const FixtureOptions& opts = {});
std::vector<std::string> fixture_names();

/// Free motion on the 3-torus, with closed-form flow and tangent flow.
HamiltonianSpec make_flat_hamiltonian(int dim = 3);
/// d = 1 mechanical Hamiltonian p^2/2 + cos(2 pi q): hyperbolic equilibrium
/// at q = 0 with linearization slopes +-2 pi, elliptic one at q = 1/2.
HamiltonianSpec make_pendulum_hamiltonian();

}  // namespace tonelli
