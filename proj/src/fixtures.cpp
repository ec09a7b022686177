#include "tonelli/fixtures.hpp"

#include <cmath>

namespace tonelli {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

HamiltonianSpec make_well_hamiltonian() {
  // Free motion in theta1, theta2; a pendulum with doubled angle in theta3.
  HamiltonianSpec H;
  H.name = "well";
  H.dim = 3;
  H.separable = true;
  H.value = [](const Vec& q, const Vec& p) {
    return 0.5 * p.squaredNorm() + std::cos(2.0 * kTwoPi * q[2]);
  };
  H.grad_q = [](const Vec& q, const Vec&) {
    Vec g = Vec::Zero(3);
    g[2] = -2.0 * kTwoPi * std::sin(2.0 * kTwoPi * q[2]);
    return g;
  };
  H.grad_p = [](const Vec&, const Vec& p) { return p; };
  H.hess_pp = [](const Vec&, const Vec&) { return Mat(Mat::Identity(3, 3)); };
  H.hess_qq = [](const Vec& q, const Vec&) {
    Mat h = Mat::Zero(3, 3);
    h(2, 2) = -4.0 * kTwoPi * kTwoPi * std::cos(2.0 * kTwoPi * q[2]);
    return h;
  };
  return H;
}

HamiltonianSpec make_shear_hamiltonian(double psi_amplitude) {
  // H(q, p) = (p1 - psi(q2))^2 / 2 + p2^2 / 2 with psi = a sin(2 pi x)/(2 pi).
  HamiltonianSpec H;
  H.name = "shear";
  H.dim = 2;
  H.separable = false;
  auto psi = [psi_amplitude](double x) { return psi_amplitude * std::sin(kTwoPi * x) / kTwoPi; };
  auto psi_p = [psi_amplitude](double x) { return psi_amplitude * std::cos(kTwoPi * x); };
  auto psi_pp = [psi_amplitude](double x) {
    return -psi_amplitude * kTwoPi * std::sin(kTwoPi * x);
  };
  H.value = [psi](const Vec& q, const Vec& p) {
    double u = p[0] - psi(q[1]);
    return 0.5 * u * u + 0.5 * p[1] * p[1];
  };
  H.grad_q = [psi, psi_p](const Vec& q, const Vec& p) {
    Vec g = Vec::Zero(2);
    g[1] = -psi_p(q[1]) * (p[0] - psi(q[1]));
    return g;
  };
  H.grad_p = [psi](const Vec& q, const Vec& p) {
    Vec g(2);
    g[0] = p[0] - psi(q[1]);
    g[1] = p[1];
    return g;
  };
  H.hess_pp = [](const Vec&, const Vec&) { return Mat(Mat::Identity(2, 2)); };
  H.hess_qq = [psi, psi_p, psi_pp](const Vec& q, const Vec& p) {
    Mat h = Mat::Zero(2, 2);
    h(1, 1) = psi_p(q[1]) * psi_p(q[1]) - psi_pp(q[1]) * (p[0] - psi(q[1]));
    return h;
  };
  H.hess_qp = [psi_p](const Vec& q, const Vec&) {
    Mat h = Mat::Zero(2, 2);
    h(1, 0) = -psi_p(q[1]);  // d^2 H / dq2 dp1
    return h;
  };
  return H;
}

ParamSubmanifold zero_section_manifold(int res) {
  ParamSubmanifold m;
  m.name = "zero-section";
  m.param_dim = 3;
  m.ambient_dim = 3;
  m.embed = [](const Vec& theta) { return PhasePoint(theta, Vec::Zero(3)); };
  m.jacobian = [](const Vec&) {
    Mat J = Mat::Zero(6, 3);
    J.topRows(3) = Mat::Identity(3, 3);
    return J;
  };
  m.grid_resolution = {res, res, res};
  return m;
}

// Base circle map of the helical family; identity when fold == nullptr.
ParamSubmanifold helical_manifold(int res, std::function<double(double)> base = {},
                                  std::function<double(double)> base_prime = {}) {
  ParamSubmanifold m;
  m.param_dim = 3;
  m.ambient_dim = 3;
  m.embed = [base](const Vec& theta) {
    Vec q = theta;
    if (base) q[2] = base(theta[2]);
    Vec p(3);
    p[0] = std::cos(kTwoPi * theta[2]);
    p[1] = std::sin(kTwoPi * theta[2]);
    p[2] = 0.0;
    return PhasePoint(q, p);
  };
  m.jacobian = [base_prime](const Vec& theta) {
    Mat J = Mat::Zero(6, 3);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    J(2, 2) = base_prime ? base_prime(theta[2]) : 1.0;
    J(3, 2) = -kTwoPi * std::sin(kTwoPi * theta[2]);
    J(4, 2) = kTwoPi * std::cos(kTwoPi * theta[2]);
    return J;
  };
  m.grid_resolution = {res, res, res};
  return m;
}

ParamSubmanifold equilibrium_manifold(int res, double psi_amplitude) {
  ParamSubmanifold m;
  m.name = "equilibrium-torus";
  m.param_dim = 2;
  m.ambient_dim = 2;
  m.embed = [psi_amplitude](const Vec& theta) {
    Vec p(2);
    p[0] = psi_amplitude * std::sin(kTwoPi * theta[1]) / kTwoPi;
    p[1] = 0.0;
    return PhasePoint(theta, p);
  };
  m.jacobian = [psi_amplitude](const Vec& theta) {
    Mat J = Mat::Zero(4, 2);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    J(2, 1) = psi_amplitude * std::cos(kTwoPi * theta[1]);
    return J;
  };
  m.grid_resolution = {res, res};
  return m;
}

// T^2 x (separatrix loop of the doubled-angle pendulum). The loop parameter s
// runs over the upper branch for s in [0, 1/2] and back along the lower one;
// r3(s) = 2 sin(2 pi s) covers both branches, the base folds at s in {0, 1/2}.
ParamSubmanifold separatrix_manifold(int res) {
  ParamSubmanifold m;
  m.name = "separatrix-torus";
  m.param_dim = 3;
  m.ambient_dim = 3;
  m.embed = [](const Vec& theta) {
    double s = wrap_coord(theta[2]);
    Vec q(3);
    q[0] = theta[0];
    q[1] = theta[1];
    q[2] = s <= 0.5 ? s : 1.0 - s;
    Vec p = Vec::Zero(3);
    p[2] = 2.0 * std::sin(kTwoPi * s);
    return PhasePoint(q, p);
  };
  m.jacobian = [](const Vec& theta) {
    double s = wrap_coord(theta[2]);
    Mat J = Mat::Zero(6, 3);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    J(2, 2) = s < 0.5 ? 1.0 : -1.0;  // corner values are never sampled (offset grid)
    J(5, 2) = 2.0 * kTwoPi * std::cos(kTwoPi * s);
    return J;
  };
  m.grid_resolution = {res, res, res};
  m.grid_offset = 0.5;  // keeps nodes off the corners s = 0, 1/2
  return m;
}

std::vector<PhasePoint> helical_seeds(const ParamSubmanifold& m, int per_axis) {
  std::vector<PhasePoint> seeds;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        Vec theta(3);
        theta << (i + 0.5) / per_axis, (j + 0.5) / per_axis, (k + 0.5) / per_axis;
        seeds.push_back(m.embed(theta));
      }
  return seeds;
}

void set_flag(std::optional<bool>& flag, ExpectedProperties& e, const std::string& key,
              bool value, const std::string& why) {
  flag = value;
  e.rationale[key] = why;
}

}  // namespace

HamiltonianSpec make_flat_hamiltonian(int dim) {
  HamiltonianSpec H;
  H.name = "flat";
  H.dim = dim;
  H.separable = true;
  H.value = [](const Vec&, const Vec& p) { return 0.5 * p.squaredNorm(); };
  H.grad_q = [dim](const Vec&, const Vec&) { return Vec(Vec::Zero(dim)); };
  H.grad_p = [](const Vec&, const Vec& p) { return p; };
  H.hess_pp = [dim](const Vec&, const Vec&) { return Mat(Mat::Identity(dim, dim)); };
  H.hess_qq = [dim](const Vec&, const Vec&) { return Mat(Mat::Zero(dim, dim)); };
  H.exact_flow = [](const PhasePoint& x, double t) {
    return PhasePoint(Vec(x.q + t * x.p), x.p);
  };
  H.exact_tangent_flow = [dim](const PhasePoint&, double t) {
    Mat J = Mat::Identity(2 * dim, 2 * dim);
    J.topRightCorner(dim, dim) = t * Mat::Identity(dim, dim);
    return J;
  };
  return H;
}

HamiltonianSpec make_pendulum_hamiltonian() {
  HamiltonianSpec H;
  H.name = "pendulum";
  H.dim = 1;
  H.separable = true;
  H.value = [](const Vec& q, const Vec& p) {
    return 0.5 * p[0] * p[0] + std::cos(kTwoPi * q[0]);
  };
  H.grad_q = [](const Vec& q, const Vec&) {
    Vec g(1);
    g[0] = -kTwoPi * std::sin(kTwoPi * q[0]);
    return g;
  };
  H.grad_p = [](const Vec&, const Vec& p) { return p; };
  H.hess_pp = [](const Vec&, const Vec&) { return Mat(Mat::Identity(1, 1)); };
  H.hess_qq = [](const Vec& q, const Vec&) {
    Mat h(1, 1);
    h(0, 0) = -kTwoPi * kTwoPi * std::cos(kTwoPi * q[0]);
    return h;
  };
  return H;
}

Fixture make_fixture(const std::string& name, const FixtureOptions& opts) {
  Fixture f;
  f.name = name;
  int res = opts.grid_resolution;

  if (name == "flat") {
    f.hamiltonian = make_flat_hamiltonian(3);
    set_flag(f.expected.conjugate_free, f.expected, "conjugate_free", true,
             "free motion carries vertical frames to top block t*I, nonsingular for t > 0");
    Vec q(3), p(3);
    q << 0.1, 0.2, 0.3;
    p << 0.7, -0.3, 0.5;
    f.scan_seeds.push_back(PhasePoint(q, p));
    return f;
  }

  if (name == "pendulum") {
    f.hamiltonian = make_pendulum_hamiltonian();
    Vec q(1), p(1);
    q << 0.55;
    p << 0.0;
    f.scan_seeds.push_back(PhasePoint(q, p));  // libration about the elliptic point
    return f;
  }

  if (name == "zero-section") {
    f.hamiltonian = make_flat_hamiltonian(3);
    f.manifold = zero_section_manifold(res);
    ExpectedProperties& e = f.expected;
    set_flag(e.invariant, e, "invariant", true,
             "every point with p = 0 is an equilibrium of free motion");
    set_flag(e.lagrangian, e, "lagrangian", true,
             "the form restricted to a fiber-constant section of dq-planes vanishes");
    set_flag(e.graph, e, "graph", true, "the base projection is the identity on parameters");
    set_flag(e.conjugate_free, e, "conjugate_free", true,
             "vertical transport along equilibria of free motion has top block t*I");
    e.kernel_dim = 3;
    e.rationale["kernel_dim"] =
        "the restricted form is identically zero, so its kernel is the full tangent space";
    e.winding_diagonal = std::vector<int>{1, 1, 1};
    e.rationale["winding"] = "the base projection is the identity map of the 3-torus";
    f.scan_seeds = helical_seeds(*f.manifold, 3);
    return f;
  }

  if (name == "helical-torus" || name == "fold-torus" || name == "degree-zero-torus") {
    f.hamiltonian = make_flat_hamiltonian(3);
    if (name == "helical-torus") {
      f.manifold = helical_manifold(res);
    } else if (name == "fold-torus") {
      double s = opts.fold_s;
      f.manifold = helical_manifold(
          res,
          [s](double x) {
            return x + (std::sin(kTwoPi * x) + s * std::sin(2.0 * kTwoPi * x)) / kTwoPi;
          },
          [s](double x) {
            return 1.0 + std::cos(kTwoPi * x) + 2.0 * s * std::cos(2.0 * kTwoPi * x);
          });
    } else {
      double a = opts.degree_zero_amp;
      f.manifold = helical_manifold(
          res, [a](double x) { return a * std::sin(kTwoPi * x); },
          [a](double x) { return a * kTwoPi * std::cos(kTwoPi * x); });
    }
    f.manifold->name = name;

    ExpectedProperties& e = f.expected;
    set_flag(e.invariant, e, "invariant", true,
             "the fiber holds the velocity of the leaf direction, so free motion slides each "
             "leaf along itself");
    set_flag(e.lagrangian, e, "lagrangian", false,
             "pairing the theta2 direction with the theta3 frame vector gives 2 pi cos(2 pi "
             "theta3), nonzero at theta3 = 0");
    e.kernel_dim = 1;
    e.rationale["kernel_dim"] =
        "the restricted form has rank 2 at every point; its kernel is the line of the "
        "velocity direction";
    set_flag(e.conjugate_free, e, "conjugate_free", true,
             "free motion has no conjugate points along any orbit");
    if (name == "helical-torus") {
      set_flag(e.graph, e, "graph", true, "the base projection is the identity on parameters");
      e.winding_diagonal = std::vector<int>{1, 1, 1};
      e.rationale["winding"] = "the base projection is the identity map of the 3-torus";
    } else if (name == "fold-torus") {
      set_flag(e.graph, e, "graph", false,
               "the folded base circle map takes equal values at distinct angles whose fibers "
               "differ");
      e.winding_diagonal = std::vector<int>{1, 1, 1};
      e.rationale["winding"] =
          "a degree-one circle map in the third base slot keeps the identity winding matrix";
    } else {
      set_flag(e.graph, e, "graph", false,
               "a null-degree base circle map is two-to-one onto its range");
      e.winding_diagonal = std::vector<int>{1, 1, 0};
      e.rationale["winding"] =
          "a null-degree circle map in the third base slot zeroes that winding entry, so the "
          "class differs from the zero section";
    }
    f.scan_seeds = helical_seeds(*f.manifold, 5);
    f.conjugate_horizon = 100.0;
    return f;
  }

  if (name == "equilibrium-torus") {
    f.hamiltonian = make_shear_hamiltonian(opts.psi_amplitude);
    f.manifold = equilibrium_manifold(res, opts.psi_amplitude);
    ExpectedProperties& e = f.expected;
    set_flag(e.invariant, e, "invariant", true,
             "on the shifted graph both momentum equations and both angle velocities vanish: "
             "every point is an equilibrium");
    set_flag(e.lagrangian, e, "lagrangian", false,
             "the restricted form pairs the two frame directions to psi'(theta2), nonzero "
             "where cos(2 pi theta2) is");
    set_flag(e.graph, e, "graph", true, "the torus is the graph of a momentum profile");
    e.winding_diagonal = std::vector<int>{1, 1};
    e.rationale["winding"] = "the base projection is the identity map of the 2-torus";
    e.kernel_dim_varies = true;
    e.rationale["kernel_dim"] =
        "the single form entry psi'(theta2) vanishes on two circles, where the kernel jumps "
        "from 0 to 2";
    f.scan_seeds = {f.manifold->embed((Vec(2) << 0.1, 0.2).finished())};
    return f;
  }

  if (name == "separatrix-torus") {
    f.hamiltonian = make_well_hamiltonian();
    f.manifold = separatrix_manifold(res);
    ExpectedProperties& e = f.expected;
    set_flag(e.invariant, e, "invariant", true,
             "the loop is a level set of the one-degree-of-freedom factor through its "
             "unstable equilibria, and the flat factors are free");
    set_flag(e.lagrangian, e, "lagrangian", true,
             "a product of a curve in the (theta3, r3) plane with the zero section of the "
             "other factors pairs to zero in every direction");
    set_flag(e.graph, e, "graph", false,
             "two momentum branches of opposite sign sit over every interior base angle");
    e.kernel_dim = 3;
    e.rationale["kernel_dim"] =
        "the restricted form vanishes identically on this manifold, so the kernel is "
        "everything";
    set_flag(e.conjugate_free, e, "conjugate_free", true,
             "branch orbits cross the oscillatory band of the doubled-angle well too fast to "
             "complete a half oscillation of the transverse equation");
    // Seeds stay away from the corner equilibria, where orbits stall.
    for (double s : {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9})
      for (double t1 : {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
        Vec theta(3);
        theta << t1, 0.5 * t1, s;
        f.scan_seeds.push_back(f.manifold->embed(theta));
      }
    f.conjugate_horizon = 50.0;
    return f;
  }

  throw Error("unknown fixture: " + name);
}

std::vector<std::string> fixture_names() {
  return {"flat",       "pendulum",        "zero-section",      "helical-torus",
          "fold-torus", "degree-zero-torus", "equilibrium-torus", "separatrix-torus"};
}

}  // namespace tonelli
