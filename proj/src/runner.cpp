#include "tonelli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tonelli/characteristic.hpp"
#include "tonelli/conjugate.hpp"
#include "tonelli/fixtures.hpp"
#include "tonelli/green.hpp"
#include "tonelli/homology.hpp"
#include "tonelli/integrate.hpp"
#include "tonelli/manifold.hpp"
#include "tonelli/report.hpp"
#include "tonelli/topology.hpp"

namespace tonelli {

namespace fs = std::filesystem;

namespace {

PhasePoint point_from_values(const std::vector<double>& xs, int dim) {
  if (static_cast<int>(xs.size()) != 2 * dim)
    throw Error("x0 needs " + std::to_string(2 * dim) + " values (q then p), got " +
                std::to_string(xs.size()));
  Vec q(dim), p(dim);
  for (int i = 0; i < dim; ++i) q[i] = xs[i];
  for (int i = 0; i < dim; ++i) p[i] = xs[dim + i];
  return PhasePoint(q, p);
}

std::string format_point(const PhasePoint& x) {
  std::ostringstream os;
  os << "q=(" << x.q.transpose() << ") p=(" << x.p.transpose() << ")";
  return os.str();
}

FixtureOptions fixture_options(const RunConfig& cfg) {
  FixtureOptions fo;
  fo.grid_resolution = cfg.grid_resolution;
  return fo;
}

PhasePoint resolve_x0(const RunConfig& cfg, const Fixture& fx, bool required) {
  if (!cfg.x0.empty()) return point_from_values(cfg.x0, fx.hamiltonian.dim);
  if (required) throw Error("operation '" + cfg.operation + "' needs point.x0");
  if (fx.scan_seeds.empty()) throw Error("fixture has no default seed; pass point.x0");
  return fx.scan_seeds.front();
}

void op_analyze(const RunConfig& cfg, const Fixture& fx, ExecPolicy policy, Report& r) {
  if (!fx.manifold) throw Error("fixture '" + cfg.fixture + "' has no manifold to analyze");
  const ParamSubmanifold& m = *fx.manifold;
  const ExpectedProperties& e = fx.expected;

  GridAnalysis ga = analyze_grid(m, {}, policy);
  for (const auto& w : ga.warnings) r.warnings.push_back(w);

  std::vector<std::vector<double>> rows;
  rows.reserve(ga.points.size());
  for (const auto& pt : ga.points) {
    std::vector<double> row;
    for (int i = 0; i < m.param_dim; ++i) row.push_back(pt.theta[i]);
    row.push_back(static_cast<double>(pt.kernel_dim));
    row.push_back(pt.defect);
    row.push_back(pt.defect_raw);
    row.push_back(pt.vertical_angle);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> cols;
  for (int i = 0; i < m.param_dim; ++i) cols.push_back("theta" + std::to_string(i));
  cols.insert(cols.end(), {"kernel_dim", "defect", "defect_raw", "vertical_angle"});
  write_csv((fs::path(cfg.output_dir) / "grid.csv").string(), cols, rows);

  std::ostringstream hist;
  for (const auto& [k, n] : ga.kernel_histogram) hist << "dim " << k << " x" << n << "; ";

  if (e.kernel_dim) {
    bool ok = ga.rank_constant && ga.kernel_histogram.size() == 1 &&
              ga.kernel_histogram.begin()->first == *e.kernel_dim;
    r.add("kernel_dim", ok, static_cast<double>(ga.kernel_histogram.rbegin()->first),
          static_cast<double>(*e.kernel_dim), hist.str());
  }
  if (e.kernel_dim_varies)
    r.add("kernel_dim_varies", !ga.rank_constant,
          static_cast<double>(ga.kernel_histogram.size()), 2.0, hist.str());

  if (e.lagrangian) {
    double tol = cfg.tol("lagrangian");
    bool is_lagrangian = ga.max_defect <= tol;
    r.add("lagrangian", is_lagrangian == *e.lagrangian, ga.max_defect, tol,
          *e.lagrangian ? "restricted form must vanish" : "restricted form must not vanish");
  }

  if (e.graph) {
    GraphTestResult gt = graph_test(m, {}, policy);
    for (const auto& w : gt.warnings) r.warnings.push_back(w);
    std::string detail;
    if (gt.witness) {
      std::ostringstream os;
      os << "witness theta_a=(" << gt.witness->theta_a.transpose() << ") theta_b=("
         << gt.witness->theta_b.transpose() << ") fiber_dist=" << gt.witness->fiber_dist;
      detail = os.str();
    }
    if (gt.base_rank_deficient) detail += (detail.empty() ? "" : "; ") + std::string("base fold");
    r.add("graph", gt.is_graph == *e.graph, gt.is_graph ? 1.0 : 0.0, *e.graph ? 1.0 : 0.0,
          detail);
  }

  if (e.winding_diagonal) {
    WindingResult w = homotopy_degree(m);
    bool ok = w.ok;
    std::ostringstream os;
    if (ok) {
      const auto& diag = *e.winding_diagonal;
      for (int a = 0; a < m.param_dim && ok; ++a)
        for (int b = 0; b < m.param_dim && ok; ++b)
          ok = w.winding(a, b) == (a == b ? diag[a] : 0);
      os << "winding = [" << w.winding << "]";
    } else {
      for (const auto& fmsg : w.failures) os << fmsg << "; ";
    }
    r.add("winding", ok, ok ? 1.0 : 0.0, 1.0, os.str());
  }

  if (e.invariant) {
    InvarianceOptions io;
    io.flow.use_exact = static_cast<bool>(fx.hamiltonian.exact_flow);
    double tol = fx.hamiltonian.exact_flow ? cfg.tol("invariance_exact")
                                           : cfg.tol("invariance_numeric");
    InvarianceResult ir =
        invariance_check(fx.hamiltonian, m, cfg.invariance_times, io, policy);
    for (const auto& w : ir.warnings) r.warnings.push_back(w);
    bool held = ir.max_deviation <= tol && ir.refine_failures == 0;
    std::ostringstream os;
    os << "worst theta=(" << ir.worst_theta.transpose() << ") at t=" << ir.worst_time;
    r.add("invariant", held == *e.invariant, ir.max_deviation, tol, os.str());
  }

  if (e.conjugate_free && !fx.scan_seeds.empty()) {
    double T = cfg.conjugate_horizon > 0 ? cfg.conjugate_horizon : fx.conjugate_horizon;
    std::vector<PhasePoint> seeds(fx.scan_seeds.begin(),
                                  fx.scan_seeds.begin() +
                                      std::min<size_t>(8, fx.scan_seeds.size()));
    auto reports = conjugate_scan_batch(fx.hamiltonian, seeds, T, 0.05, {}, policy);
    int zeros = 0;
    for (const auto& rep : reports) zeros += static_cast<int>(rep.zeros.size());
    r.add("conjugate_free", (zeros == 0) == *e.conjugate_free, static_cast<double>(zeros), 0.0,
          std::to_string(seeds.size()) + " seeds to horizon " + std::to_string(T));
  }
}

void op_flow(const RunConfig& cfg, const Fixture& fx, Report& r) {
  PhasePoint x0 = resolve_x0(cfg, fx, false);
  FlowOptions fo;
  fo.use_exact = static_cast<bool>(fx.hamiltonian.exact_flow);
  Trajectory tr = flow(fx.hamiltonian, x0, cfg.flow_t, fo);
  int d = fx.hamiltonian.dim;
  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < d; ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < d; ++i) cols.push_back("p" + std::to_string(i));
  cols.push_back("energy");
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row = {tr.times[k]};
    for (int i = 0; i < d; ++i) row.push_back(tr.states[k].q[i]);
    for (int i = 0; i < d; ++i) row.push_back(tr.states[k].p[i]);
    row.push_back(tr.energies[k]);
    rows.push_back(std::move(row));
  }
  write_csv((fs::path(cfg.output_dir) / "trajectory.csv").string(), cols, rows);
  r.parameters["x0"] = format_point(x0);
  r.add_bound("energy_drift", tr.energy_drift, cfg.tol("energy_drift"));
}

void op_green(const RunConfig& cfg, const Fixture& fx, Report& r) {
  PhasePoint x0 = resolve_x0(cfg, fx, true);
  GreenSide side;
  if (cfg.green_side == "plus") side = GreenSide::Plus;
  else if (cfg.green_side == "minus") side = GreenSide::Minus;
  else throw Error("green.side must be plus or minus");

  // A flat-like bundle converges only like 1/T, so the closed-form flow gets
  // a longer geometric schedule; integrated flows stop at 2^14.
  std::vector<double> horizons = green_default_horizons();
  if (fx.hamiltonian.exact_flow)
    for (double T = 2.0 * horizons.back(); T <= 1048576.0; T *= 2.0) horizons.push_back(T);

  GreenBundleEstimate gb = green_bundle(fx.hamiltonian, x0, side, horizons, {});
  for (const auto& w : gb.warnings) r.warnings.push_back(w);

  int d = fx.hamiltonian.dim;
  std::vector<std::string> cols = {"horizon"};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) cols.push_back("s" + std::to_string(i) + std::to_string(j));
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < gb.history.size(); ++k) {
    std::vector<double> row = {gb.horizons[k]};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row.push_back(gb.history[k](i, j));
    rows.push_back(std::move(row));
  }
  write_csv((fs::path(cfg.output_dir) / "green.csv").string(), cols, rows);

  r.parameters["x0"] = format_point(x0);
  r.parameters["side"] = cfg.green_side;
  r.add("converged", gb.converged, gb.residual, cfg.tol("green_residual"),
        "last increment, operator norm");
  r.add_bound("symmetry_defect", gb.symmetry_defect, cfg.tol("green_symmetry"));
}

void op_conjugate(const RunConfig& cfg, const Fixture& fx, Report& r) {
  PhasePoint x0 = resolve_x0(cfg, fx, false);
  double T = cfg.conjugate_horizon > 0 ? cfg.conjugate_horizon : fx.conjugate_horizon;
  ConjugateReport rep = conjugate_scan(fx.hamiltonian, x0, T, 0.05);
  for (const auto& w : rep.warnings) r.warnings.push_back(w);
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < rep.sample_times.size(); ++k)
    rows.push_back({rep.sample_times[k], rep.dets[k]});
  write_csv((fs::path(cfg.output_dir) / "conjugate.csv").string(), {"t", "det"}, rows);
  r.parameters["x0"] = format_point(x0);
  std::ostringstream os;
  for (double z : rep.zeros) os << z << " ";
  if (fx.expected.conjugate_free)
    r.add("conjugate_free", rep.zeros.empty() == *fx.expected.conjugate_free,
          static_cast<double>(rep.zeros.size()), 0.0, os.str());
  else
    r.add("scan_completed", true, static_cast<double>(rep.zeros.size()), T,
          rep.zeros.empty() ? "no conjugate points" : "zeros at " + os.str());
}

void op_characteristic(const RunConfig& cfg, const Fixture& fx, ExecPolicy policy, Report& r) {
  if (!fx.manifold) throw Error("fixture '" + cfg.fixture + "' has no manifold");
  const ParamSubmanifold& m = *fx.manifold;
  CharacteristicField cf = characteristic_field(m, {}, policy);
  for (const auto& w : cf.warnings) r.warnings.push_back(w);

  Vec theta0 = Vec::Zero(m.param_dim);
  if (!cfg.theta0.empty()) {
    if (static_cast<int>(cfg.theta0.size()) != m.param_dim)
      throw Error("theta0 needs " + std::to_string(m.param_dim) + " values");
    for (int i = 0; i < m.param_dim; ++i) theta0[i] = cfg.theta0[i];
  }
  ParamField field = make_characteristic_flow_field(m, cf);
  ParamCurve curve = characteristic_flow(field, theta0, cfg.flow_t, {});

  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < m.param_dim; ++i) cols.push_back("theta" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < curve.times.size(); ++k) {
    std::vector<double> row = {curve.times[k]};
    for (int i = 0; i < m.param_dim; ++i) row.push_back(curve.thetas[k][i]);
    rows.push_back(std::move(row));
  }
  write_csv((fs::path(cfg.output_dir) / "characteristic.csv").string(), cols, rows);

  r.add("orientable", cf.orientable, cf.orientable ? 1.0 : 0.0, 1.0);
  r.add("field_continuity", cf.max_neighbor_angle < 0.5235987755982988, cf.max_neighbor_angle,
        0.5235987755982988, "max angle between neighboring grid directions");
  if (m.param_dim == 3 &&
      (cfg.fixture == "helical-torus" || cfg.fixture == "fold-torus" ||
       cfg.fixture == "degree-zero-torus")) {
    double drift = 0.0;
    for (const auto& th : curve.thetas) drift = std::max(drift, std::abs(th[2] - theta0[2]));
    r.add_bound("leaf_constant", drift, 1e-10, "theta3 drift along the curve");
  }
}

void op_extend(const RunConfig& cfg, Report& r, ExecPolicy policy) {
  BaseMap bm = parse_basemap(cfg.basemap);
  ExtensionOptions opts;
  opts.solver_tol = 1e-12;
  ExtensionMap em = make_extension(bm, opts);
  r.parameters["basemap"] = cfg.basemap;
  int d = em.gf.base.dim;

  r.add_bound("equivariance", equivariance_defect(em.gf.base, 8), 1e-9,
              "integer shifts commute with the lift");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double zerr = 0.0;
  for (int k = 0; k < 16; ++k) {
    Vec q(d);
    for (int i = 0; i < d; ++i) q[i] = u(rng);
    SolveResult sr = solve_F(em, q, Vec::Zero(d));
    zerr = std::max(zerr, (sr.Q - em.gf.base.lift(q)).norm() + sr.P.norm());
  }
  r.add_bound("zero_section_fixed", zerr, cfg.tol("zero_section"),
              "F(q, 0) must reproduce the lifted base map with zero momentum");

  double resid = symplecticity_residual(em, 100, 0.5, cfg.seed, 1e-5, policy);
  r.add_bound("symplecticity", resid, cfg.tol("symplecticity"),
              "max |J^T Omega J - Omega| over sampled Jacobians");

  std::vector<std::string> cols;
  for (int i = 0; i < d; ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < d; ++i) cols.push_back("p" + std::to_string(i));
  for (int i = 0; i < d; ++i) cols.push_back("Q" + std::to_string(i));
  for (int i = 0; i < d; ++i) cols.push_back("P" + std::to_string(i));
  cols.push_back("iterations");
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 32; ++k) {
    Vec q(d), p(d);
    for (int i = 0; i < d; ++i) q[i] = u(rng);
    for (int i = 0; i < d; ++i) p[i] = (u(rng) - 0.5);
    SolveResult sr = solve_F(em, q, p);
    std::vector<double> row;
    for (int i = 0; i < d; ++i) row.push_back(q[i]);
    for (int i = 0; i < d; ++i) row.push_back(p[i]);
    for (int i = 0; i < d; ++i) row.push_back(sr.Q[i]);
    for (int i = 0; i < d; ++i) row.push_back(sr.P[i]);
    row.push_back(static_cast<double>(sr.iterations));
    rows.push_back(std::move(row));
  }
  write_csv((fs::path(cfg.output_dir) / "extend.csv").string(), cols, rows);
}

void op_homology(const RunConfig& cfg, Report& r) {
  HomologyAction h;
  h.A = IntMat2{cfg.matrix[0], cfg.matrix[1], cfg.matrix[2], cfg.matrix[3]};
  h.v0 = IntVec2{cfg.v0[0], cfg.v0[1]};
  HomologyIteration it = homology_iterate(h, cfg.homology_n);

  MatrixClass mc = matrix_class(h.A);
  bool zero_start = h.v0.x == 0 && h.v0.y == 0;
  IntVec2 img{};
  bool fixed_line = mat_vec_checked(h.A, h.v0, img) &&
                    ((h.A.trace() == 2 && img == h.v0) ||
                     (h.A.trace() == -2 && img.x == -h.v0.x && img.y == -h.v0.y));
  bool bounded_oracle =
      zero_start || mc == MatrixClass::FiniteOrder || (mc == MatrixClass::Parabolic && fixed_line);
  OrbitClass oracle = bounded_oracle ? OrbitClass::FiniteOrbit
                      : mc == MatrixClass::Hyperbolic ? OrbitClass::HyperbolicGrowth
                                                      : OrbitClass::ParabolicGrowth;
  r.parameters["matrix"] = std::to_string(h.A.a) + "," + std::to_string(h.A.b) + "," +
                           std::to_string(h.A.c) + "," + std::to_string(h.A.d);
  r.parameters["v0"] = std::to_string(h.v0.x) + "," + std::to_string(h.v0.y);
  r.add("classification", it.decided && it.classification == oracle && it.bounded == bounded_oracle,
        static_cast<double>(static_cast<int>(it.classification)),
        static_cast<double>(static_cast<int>(oracle)),
        orbit_class_name(it.classification) + " vs oracle " + orbit_class_name(oracle));

  if (oracle == OrbitClass::HyperbolicGrowth) {
    double lam = spectral_radius_oracle(h.A);
    double g = measured_growth(h.A, h.v0, 40);
    r.add_bound("growth_rate", (g - lam) / lam, cfg.tol("growth_rate"),
                "relative gap to the spectral radius at n = 40");
    if (it.limit_angle) {
      double gap = std::abs(*it.limit_angle - unstable_angle_oracle(h.A));
      gap = std::min(gap, 0.5 - gap);
      r.add_bound("projective_limit", gap, cfg.tol("projective_limit"),
                  "angle gap to the dominant eigendirection, mod 1/2");
    } else {
      r.add("projective_limit", false, 0.0, cfg.tol("projective_limit"), "no limit angle");
    }
  }

  std::vector<std::vector<double>> rows;
  for (size_t n = 0; n < it.sequence.size(); ++n)
    rows.push_back({static_cast<double>(n), static_cast<double>(it.sequence[n].x),
                    static_cast<double>(it.sequence[n].y)});
  write_csv((fs::path(cfg.output_dir) / "sequence.csv").string(), {"n", "x", "y"}, rows);
  if (it.overflow) r.warnings.push_back("integer overflow truncated the sequence");
}

}  // namespace

BaseMap parse_basemap(const std::string& text) {
  std::string head = text, args;
  size_t colon = text.find(':');
  if (colon != std::string::npos) {
    head = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  auto numbers = [&args] { return parse_number_list(args); };
  if (head == "identity") {
    int dim = 2;
    if (!args.empty()) dim = static_cast<int>(parse_integer_list(args).at(0));
    if (dim < 1) throw Error("identity basemap: dim must be positive");
    return make_identity_map(dim);
  }
  if (head == "translation") {
    auto cs = numbers();
    if (cs.empty()) throw Error("translation basemap needs offsets, e.g. translation:0.25,0.5");
    Vec c(static_cast<int>(cs.size()));
    for (size_t i = 0; i < cs.size(); ++i) c[static_cast<int>(i)] = cs[i];
    return make_translation_map(c);
  }
  if (head == "sine") {
    auto xs = numbers();
    if (xs.empty()) throw Error("sine basemap needs an amplitude, e.g. sine:0.05");
    int dim = xs.size() > 1 ? static_cast<int>(xs[1]) : 2;
    if (dim < 1) throw Error("sine basemap: dim must be positive");
    return make_sine_map(dim, xs[0]);
  }
  if (head == "tabulated") {
    if (args.empty()) throw Error("tabulated basemap needs a file path");
    std::ifstream in(args);
    if (!in) throw Error("cannot open displacement table: " + args);
    std::vector<double> values;
    double x;
    while (in >> x) values.push_back(x);
    if (values.size() < 3) throw Error("displacement table needs at least 3 samples");
    return make_tabulated_map(values);
  }
  throw Error("unknown basemap '" + head +
              "' (expected identity, translation, sine or tabulated)");
}

int run(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  if (const char* env = std::getenv("TONELLI_OUTPUT_DIR")) cfg.output_dir = env;
  cfg.validate();

  if (cfg.operation == "report") {
    MergedReport merged = merge_reports(cfg.output_dir);
    Report r;
    r.operation = "report";
    r.seed = cfg.seed;
    for (const auto& [file, ok] : merged.files)
      r.add(file, ok, ok ? 1.0 : 0.0, 1.0, "summary pass flag");
    write_text_atomic((fs::path(cfg.output_dir) / "report.json").string(),
                      r.to_json());
    return merged.pass ? 0 : 1;
  }

  ExecPolicy policy = exec_policy_from_name(cfg.exec_policy);
  Report r;
  r.operation = cfg.operation;
  r.fixture = cfg.fixture;
  r.seed = cfg.seed;
  r.parameters["policy"] = cfg.exec_policy;
  r.parameters["grid_resolution"] = std::to_string(cfg.grid_resolution);

  if (cfg.operation == "extend") {
    op_extend(cfg, r, policy);
  } else if (cfg.operation == "homology") {
    op_homology(cfg, r);
  } else {
    if (cfg.fixture.empty()) throw Error("operation '" + cfg.operation + "' needs a fixture");
    Fixture fx = make_fixture(cfg.fixture, fixture_options(cfg));
    if (cfg.operation == "analyze") op_analyze(cfg, fx, policy, r);
    else if (cfg.operation == "flow") op_flow(cfg, fx, r);
    else if (cfg.operation == "green") op_green(cfg, fx, r);
    else if (cfg.operation == "conjugate") op_conjugate(cfg, fx, r);
    else if (cfg.operation == "characteristic") op_characteristic(cfg, fx, policy, r);
    else throw Error("unhandled operation: " + cfg.operation);
  }

  write_report(r, cfg.output_dir);
  return r.pass() ? 0 : 1;
}

}  // namespace tonelli
