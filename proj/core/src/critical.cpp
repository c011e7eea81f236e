#include "gradspec/critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace gradspec {

namespace {

// orthonormal tangent frame at x: state_dim x dim columns
Mat tangent_frame(const ManifoldModel& model, const Vec& x) {
  if (!model.embedded_sphere()) return Mat::Identity(model.state_dim, model.state_dim);
  // axis least aligned with x, then Gram-Schmidt
  int axis = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(x[j]) < std::abs(x[axis])) axis = j;
  Vec e = Vec::Zero(3);
  e[axis] = 1.0;
  Vec u = e - x.dot(e) * x;
  u.normalize();
  Vec v(3);
  v << x[1] * u[2] - x[2] * u[1], x[2] * u[0] - x[0] * u[2], x[0] * u[1] - x[1] * u[0];
  Mat frame(3, 2);
  frame.col(0) = u;
  frame.col(1) = v;
  return frame;
}

// Hessian of f restricted to the tangent space at a (in frame coordinates),
// together with the metric in the same frame.
void tangent_hessian(const ManifoldModel& model, const Vec& a, Mat& hess, Mat& metric,
                     Mat& frame) {
  frame = tangent_frame(model, a);
  const Chart& chart = model.charts.at(0);
  if (model.embedded_sphere()) {
    // Hess(f|M)(xi,eta) = HessF(xi,eta) - (x . gradF) <xi,eta> on the unit sphere
    double mu = a.dot(chart.grad_f(a));
    Mat amb = chart.hess_f(a) - mu * Mat::Identity(3, 3);
    hess = frame.transpose() * amb * frame;
    metric = Mat::Identity(2, 2);
    return;
  }
  if (chart.hess_f) {
    hess = chart.hess_f(a);
  } else {
    // FD of the coordinate gradient
    const int n = model.state_dim;
    auto grad = [&](const Vec& p) { return chart.grad_f(p); };
    Mat h(n, n);
    for (int j = 0; j < n; ++j) {
      double extent = chart.hi[j] - chart.lo[j];
      double step = 1e-6 * (extent > 0 ? extent : 1.0);
      Vec xp = a, xm = a;
      xp[j] += step;
      xm[j] -= step;
      h.col(j) = (grad(xp) - grad(xm)) / (2 * step);
    }
    hess = 0.5 * (h + h.transpose());
  }
  metric = chart.metric(a);
}

std::string relation_string(const std::vector<long long>& k,
                            const std::vector<std::pair<int, int>>& labels,
                            const std::vector<double>& w) {
  std::ostringstream os;
  bool first = true;
  double resid = 0;
  for (size_t j = 0; j < k.size(); ++j) {
    resid += k[j] * w[j];
    if (k[j] == 0) continue;
    if (!first) os << (k[j] > 0 ? " + " : " - ");
    else if (k[j] < 0) os << "-";
    first = false;
    long long mag = std::llabs(k[j]);
    if (mag != 1) os << mag << "*";
    os << "|chi_" << (labels[j].second + 1) << "(a" << labels[j].first << ")|";
  }
  os << " = " << resid;
  return os.str();
}

}  // namespace

std::vector<long long> find_integer_relation(const std::vector<double>& w, int bound,
                                             double tol) {
  const int d = static_cast<int>(w.size());
  if (d == 0) return {};
  int d_left = d / 2;
  int d_right = d - d_left;
  const long long base = 2LL * bound + 1;

  auto decode = [&](uint64_t code, int len, int offset, std::vector<long long>& k) {
    for (int j = 0; j < len; ++j) {
      k[offset + j] = static_cast<long long>(code % base) - bound;
      code /= base;
    }
  };

  uint64_t n_right = 1;
  for (int j = 0; j < d_right; ++j) n_right *= base;
  std::vector<std::pair<double, uint64_t>> right;
  right.reserve(n_right);
  {
    std::vector<long long> k(d, 0);
    for (uint64_t code = 0; code < n_right; ++code) {
      decode(code, d_right, d_left, k);
      double s = 0;
      for (int j = 0; j < d_right; ++j) s += k[d_left + j] * w[d_left + j];
      right.emplace_back(s, code);
    }
  }
  std::sort(right.begin(), right.end());

  uint64_t n_left = 1;
  for (int j = 0; j < d_left; ++j) n_left *= base;
  std::vector<long long> k(d, 0);
  for (uint64_t lcode = 0; lcode < n_left; ++lcode) {
    decode(lcode, d_left, 0, k);
    double s = 0;
    for (int j = 0; j < d_left; ++j) s += k[j] * w[j];
    auto lo = std::lower_bound(right.begin(), right.end(),
                               std::make_pair(-s - tol, uint64_t(0)));
    for (auto it = lo; it != right.end() && it->first <= -s + tol; ++it) {
      decode(it->second, d_right, d_left, k);
      bool all_zero = std::all_of(k.begin(), k.end(), [](long long v) { return v == 0; });
      if (!all_zero) return k;
      for (int j = d_left; j < d; ++j) k[j] = 0;
    }
    for (int j = 0; j < d_left; ++j) k[j] = 0;
  }
  return {};
}

int feasible_relation_bound(int dim, int requested) {
  int half = (dim + 1) / 2;
  for (int b = requested; b >= 1; --b) {
    double count = std::pow(2.0 * b + 1.0, half);
    if (count <= 16'000'000.0) return b;
  }
  return 1;
}

Vec lyapunov_exponents(const ManifoldModel& model, const Vec& a) {
  if (model.velocity(a).norm() >= 1e-8)
    throw NotCritical("lyapunov_exponents: ||V_f(a)|| >= 1e-8");
  Mat hess, metric, frame;
  tangent_hessian(model, a, hess, metric, frame);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(hess, metric);
  return es.eigenvalues();
}

CriticalPointRecord make_record(const ManifoldModel& model, const Vec& a) {
  if (model.velocity(a).norm() >= 1e-8)
    throw NotCritical("make_record: ||V_f(a)|| >= 1e-8");
  Mat hess, metric, frame;
  tangent_hessian(model, a, hess, metric, frame);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(hess, metric);
  CriticalPointRecord rec;
  rec.position = model.canonical(a);
  rec.value = model.f(a);
  rec.exponents = es.eigenvalues();
  for (int j = 0; j < rec.exponents.size(); ++j)
    if (std::abs(rec.exponents[j]) < 1e-8)
      throw SingularHessian("degenerate critical point: |chi_" + std::to_string(j + 1) +
                            "| < 1e-8 (Morse assumption violated)");
  rec.index = 0;
  for (int j = 0; j < rec.exponents.size(); ++j)
    if (rec.exponents[j] < 0) ++rec.index;
  rec.eigenframe = frame * es.eigenvectors();
  return rec;
}

int hessian_inertia_index(const ManifoldModel& model, const Vec& a) {
  Mat hess, metric, frame;
  tangent_hessian(model, a, hess, metric, frame);
  Eigen::SelfAdjointEigenSolver<Mat> es(hess);  // inertia of H alone (Sylvester)
  int neg = 0;
  for (int j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()[j] < 0) ++neg;
  return neg;
}

std::vector<CriticalPointRecord> find_critical_points(const ManifoldModel& model,
                                                      int grid_density, double newton_tol) {
  if (grid_density < 8) grid_density = 8;
  if (newton_tol <= 0) newton_tol = 1e-12;

  std::vector<Vec> seeds = uniform_grid(model, grid_density);
  std::vector<Vec> found;

  for (const Vec& seed : seeds) {
    Vec x = seed;
    bool ok = false;
    for (int iter = 0; iter < 80; ++iter) {
      Vec v = model.velocity(x);
      if (v.norm() < newton_tol) {
        ok = true;
        break;
      }
      Mat dv = model.dvelocity(x);
      Vec step;
      if (model.embedded_sphere()) {
        Mat frame = tangent_frame(model, x);
        Mat slice = frame.transpose() * dv * frame;
        Vec rhs = -frame.transpose() * v;
        Eigen::FullPivLU<Mat> lu(slice);
        if (!lu.isInvertible()) break;
        step = frame * lu.solve(rhs);
      } else {
        Eigen::FullPivLU<Mat> lu(dv);
        if (!lu.isInvertible()) break;
        step = lu.solve(Vec(-v));
      }
      double norm = step.norm();
      if (norm > 0.5) step *= 0.5 / norm;  // damp far-from-root jumps
      x = model.project(x + step);
    }
    if (!ok) continue;
    Vec canon = model.canonical(x);
    bool duplicate = false;
    for (const Vec& p : found)
      if (model.distance(p, canon) < 1e-6) {
        duplicate = true;
        break;
      }
    if (!duplicate) found.push_back(canon);
  }

  std::sort(found.begin(), found.end(), [](const Vec& a, const Vec& b) {
    for (int j = 0; j < a.size(); ++j) {
      if (a[j] < b[j] - 1e-9) return true;
      if (a[j] > b[j] + 1e-9) return false;
    }
    return false;
  });

  std::vector<CriticalPointRecord> records;
  for (const Vec& p : found) {
    CriticalPointRecord rec = make_record(model, p);
    rec.id = static_cast<int>(records.size());
    records.push_back(std::move(rec));
  }
  return records;
}

HypothesisReport check_hypotheses(const std::vector<CriticalPointRecord>& records,
                                  int relation_bound, double tol) {
  HypothesisReport report;
  report.relation_bound = relation_bound;
  report.tol = tol;

  report.excellent = true;
  for (size_t i = 0; i < records.size(); ++i)
    for (size_t j = i + 1; j < records.size(); ++j)
      if (std::abs(records[i].value - records[j].value) <= tol) {
        report.excellent = false;
        std::ostringstream os;
        os << "f(a" << records[i].id << ") = f(a" << records[j].id << ") = "
           << records[i].value;
        report.witnesses.push_back(os.str());
      }

  // per-point rational independence of |chi_1..n(a)|
  report.rationally_independent_per_point = true;
  for (const auto& rec : records) {
    std::vector<double> w(rec.exponents.size());
    std::vector<std::pair<int, int>> labels;
    for (int j = 0; j < rec.exponents.size(); ++j) {
      w[j] = std::abs(rec.exponents[j]);
      labels.emplace_back(rec.id, j);
    }
    int bound = feasible_relation_bound(static_cast<int>(w.size()), relation_bound);
    auto k = find_integer_relation(w, bound, tol);
    if (!k.empty()) {
      report.rationally_independent_per_point = false;
      report.witnesses.push_back("per-point: " + relation_string(k, labels, w));
    }
  }

  // joint independence across all critical points
  {
    std::vector<double> w;
    std::vector<std::pair<int, int>> labels;
    for (const auto& rec : records)
      for (int j = 0; j < rec.exponents.size(); ++j) {
        w.push_back(std::abs(rec.exponents[j]));
        labels.emplace_back(rec.id, j);
      }
    int bound = feasible_relation_bound(static_cast<int>(w.size()), relation_bound);
    if (bound < relation_bound)
      report.witnesses.push_back("joint search bound reduced to " + std::to_string(bound) +
                                 " (dimension " + std::to_string(w.size()) + ")");
    auto k = find_integer_relation(w, bound, tol);
    report.rationally_independent_joint = k.empty();
    if (!k.empty()) report.witnesses.push_back("joint: " + relation_string(k, labels, w));
  }

  // Sternberg-Chen: chi_i != sum_j k_j chi_j with k_j >= 0, sum k_j >= 2
  report.sternberg_nonresonant = true;
  for (const auto& rec : records) {
    const int n = static_cast<int>(rec.exponents.size());
    std::vector<long long> k(n, 0);
    std::function<bool(int, double, long long)> walk = [&](int pos, double sum,
                                                           long long total) -> bool {
      if (pos == n) {
        if (total < 2) return false;
        for (int i = 0; i < n; ++i)
          if (std::abs(rec.exponents[i] - sum) < tol) {
            std::ostringstream os;
            os << "Sternberg-Chen at a" << rec.id << ": chi_" << (i + 1) << " = ";
            for (int j = 0; j < n; ++j)
              if (k[j] != 0) os << k[j] << "*chi_" << (j + 1) << " ";
            report.witnesses.push_back(os.str());
            return true;
          }
        return false;
      }
      for (long long v = 0; v <= relation_bound; ++v) {
        k[pos] = v;
        if (walk(pos + 1, sum + v * rec.exponents[pos], total + v)) return true;
      }
      k[pos] = 0;
      return false;
    };
    if (walk(0, 0.0, 0)) report.sternberg_nonresonant = false;
  }

  return report;
}

}  // namespace gradspec
