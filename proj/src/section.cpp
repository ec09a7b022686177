#include "tonelli/section.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace tonelli {

long SectionField::node_index(int i, int j, int k) const {
  return (static_cast<long>(i) * resolution[1] + j) * resolution[2] + k;
}

double SectionField::w_at(const Vec& theta) const {
  // trilinear with wrap
  double fi = wrap_coord(theta[0]) * resolution[0];
  double fj = wrap_coord(theta[1]) * resolution[1];
  double fk = wrap_coord(theta[2]) * resolution[2];
  int i0 = static_cast<int>(std::floor(fi)) % resolution[0];
  int j0 = static_cast<int>(std::floor(fj)) % resolution[1];
  int k0 = static_cast<int>(std::floor(fk)) % resolution[2];
  double si = fi - std::floor(fi), sj = fj - std::floor(fj), sk = fk - std::floor(fk);
  double acc = 0.0;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        double weight = (di ? si : 1 - si) * (dj ? sj : 1 - sj) * (dk ? sk : 1 - sk);
        acc += weight * w[node_index((i0 + di) % resolution[0], (j0 + dj) % resolution[1],
                                     (k0 + dk) % resolution[2])];
      }
  return acc;
}

namespace {

struct OrbitResult {
  double u = 0.0;      // time average of the lifted first coordinate
  double drift = 0.0;  // lifted first-coordinate gain over one period
  double closure = 0.0;
};

OrbitResult integrate_orbit(const ParamField& field, const Vec& theta0, double period,
                            double step) {
  // augmented RK4: state = (theta lifted, running integral of theta_1)
  long n = static_cast<long>(std::ceil(period / step - 1e-12));
  double h = period / static_cast<double>(n);
  Vec th = theta0;
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    Vec k1 = field(th);
    double a1 = th[0];
    Vec th2 = th + 0.5 * h * k1;
    Vec k2 = field(th2);
    double a2 = th2[0];
    Vec th3 = th + 0.5 * h * k2;
    Vec k3 = field(th3);
    double a3 = th3[0];
    Vec th4 = th + h * k3;
    Vec k4 = field(th4);
    double a4 = th4[0];
    th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    acc += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  OrbitResult res;
  res.u = acc / period;
  res.drift = th[0] - theta0[0];
  res.closure = torus_dist(wrap_torus(th), wrap_torus(theta0));
  return res;
}

}  // namespace

SectionField section_from_average(const ParamField& field, const SectionOptions& opts,
                                  ExecPolicy policy) {
  SectionField sec;
  sec.resolution = opts.grid;

  // closure precheck on a deterministic low-discrepancy seed set
  for (int s = 0; s < opts.precheck_seeds; ++s) {
    Vec seed(3);
    seed << wrap_coord(0.137 + 0.613 * s), wrap_coord(0.291 + 0.377 * s),
        wrap_coord(0.449 + 0.741 * s);
    OrbitResult orb = integrate_orbit(field, seed, opts.period, opts.flow_step);
    if (orb.closure > opts.loop_tol)
      throw Error("section_from_average: orbit fails to close over the period (error " +
                  std::to_string(orb.closure) + "); field is not periodic");
  }

  long total = static_cast<long>(opts.grid[0]) * opts.grid[1] * opts.grid[2];
  sec.w.assign(total, 0.0);
  sec.drift.assign(total, 0.0);
  std::vector<double> closure(total, 0.0);

  for_each_index(policy, total, [&](long n) {
    int i = static_cast<int>(n / (static_cast<long>(opts.grid[1]) * opts.grid[2]));
    int j = static_cast<int>((n / opts.grid[2]) % opts.grid[1]);
    int k = static_cast<int>(n % opts.grid[2]);
    Vec theta0(3);
    theta0 << static_cast<double>(i) / opts.grid[0], static_cast<double>(j) / opts.grid[1],
        static_cast<double>(k) / opts.grid[2];
    OrbitResult orb = integrate_orbit(field, theta0, opts.period, opts.flow_step);
    sec.w[n] = orb.u - theta0[0];
    sec.drift[n] = orb.drift;
    closure[n] = orb.closure;
  });

  double worst_closure = *std::max_element(closure.begin(), closure.end());
  if (worst_closure > opts.loop_tol)
    sec.warnings.push_back("section_from_average: worst nodal closure error " +
                           std::to_string(worst_closure));
  sec.min_drift = *std::min_element(sec.drift.begin(), sec.drift.end());
  if (sec.min_drift <= 0.0)
    sec.warnings.push_back(
        "section_from_average: averaged level function is not strictly increasing along the flow");

  // level-set mesh of g = theta_1 + w (mod 1); w is a plain real-valued
  // periodic function, so lifted edge differences are direct
  const int n1 = opts.grid[0], n2 = opts.grid[1], n3 = opts.grid[2];
  auto g_at = [&](int i, int j, int k) {
    // i may equal n1 for the lifted wrap along the first axis
    double lift = 0.0;
    int iw = i;
    if (iw >= n1) {
      iw -= n1;
      lift = 1.0;
    }
    return static_cast<double>(iw) / n1 + lift + sec.w[sec.node_index(iw, j % n2, k % n3)];
  };

  std::map<std::array<int, 4>, int> edge_vertex;  // (axis, i, j, k) -> vertex id
  auto edge_cross = [&](int axis, int i, int j, int k) -> int {
    std::array<int, 4> key{axis, i % n1, j % n2, k % n3};
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    double ga = g_at(i, j, k);
    double gb = axis == 0 ? g_at(i + 1, j, k) : axis == 1 ? g_at(i, j + 1, k) : g_at(i, j, k + 1);
    double lo = std::min(ga, gb), hi = std::max(ga, gb);
    double m = std::ceil(lo);
    int id = -1;
    if (m <= hi && hi > lo) {
      double s = (m - ga) / (gb - ga);
      if (s >= 0.0 && s < 1.0) {
        std::array<double, 3> v{static_cast<double>(i % n1) / n1, static_cast<double>(j % n2) / n2,
                                static_cast<double>(k % n3) / n3};
        v[axis] += s / (axis == 0 ? n1 : axis == 1 ? n2 : n3);
        v[0] = wrap_coord(v[0]);
        v[1] = wrap_coord(v[1]);
        v[2] = wrap_coord(v[2]);
        sec.vertices.push_back(v);
        id = static_cast<int>(sec.vertices.size()) - 1;
      }
    }
    edge_vertex[key] = id;
    return id;
  };

  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k) {
        // 12 edges of the cell with origin (i, j, k)
        std::vector<int> vs;
        auto add = [&](int id) {
          if (id >= 0 && std::find(vs.begin(), vs.end(), id) == vs.end()) vs.push_back(id);
        };
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            add(edge_cross(0, i, j + a, k + b));
            add(edge_cross(1, i + a, j, k + b));
            add(edge_cross(2, i + a, j + b, k));
          }
        if (vs.size() < 3) continue;
        // order around the centroid in the polygon plane (cells are small,
        // so local coordinates need no wrap handling)
        std::array<double, 3> origin{static_cast<double>(i) / n1, static_cast<double>(j) / n2,
                                     static_cast<double>(k) / n3};
        std::vector<Eigen::Vector3d> local;
        for (int id : vs) {
          Eigen::Vector3d u;
          for (int c = 0; c < 3; ++c) u[c] = torus_delta(sec.vertices[id][c], origin[c]);
          local.push_back(u);
        }
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (const auto& u : local) centroid += u;
        centroid /= static_cast<double>(local.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (const auto& u : local) cov += (u - centroid) * (u - centroid).transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        Eigen::Vector3d e1 = eig.eigenvectors().col(2);
        Eigen::Vector3d e2 = eig.eigenvectors().col(1);
        std::vector<std::pair<double, int>> ang;
        for (size_t v = 0; v < vs.size(); ++v) {
          Eigen::Vector3d r = local[v] - centroid;
          ang.emplace_back(std::atan2(r.dot(e2), r.dot(e1)), vs[v]);
        }
        std::sort(ang.begin(), ang.end());
        std::vector<int> face;
        for (auto& [a, id] : ang) face.push_back(id);
        sec.faces.push_back(std::move(face));
      }

  return sec;
}

}  // namespace tonelli
