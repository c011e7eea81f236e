#include "gradspec/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gradspec/parallel.hpp"

namespace gradspec {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct FlowState {
  double t = 0.0;  // elapsed |time|
  Vec x;
  Mat J;  // empty unless tracking the variational equation
};

// Integrates x' = sign * V(x) (and J' = sign * DV(x) J) from st.t to t_end.
// on_accept runs after every accepted (projected) step and may stop the run;
// steps are clipped so each time in `marks` is hit exactly, with on_mark
// called there. Throws StepFailure when the step size underflows h_min.
void dopri5(const ManifoldModel& model, double sign, FlowState& st, double t_end,
            const IntegrateOptions& opt, const std::vector<double>& marks,
            const std::function<void(const FlowState&)>& on_mark,
            const std::function<bool(const FlowState&)>& on_accept) {
  const int nx = static_cast<int>(st.x.size());
  const bool with_j = st.J.size() > 0;
  size_t mark_idx = 0;
  while (mark_idx < marks.size() && marks[mark_idx] <= st.t + 1e-15) {
    if (std::abs(marks[mark_idx] - st.t) <= 1e-15 && on_mark) on_mark(st);
    ++mark_idx;
  }

  auto rhs_x = [&](const Vec& x) { return Vec(sign * model.velocity(x)); };
  auto rhs_j = [&](const Vec& x, const Mat& j) { return Mat(sign * (model.dvelocity(x) * j)); };

  double h = std::min(opt.h_max, 1e-3);
  Vec k1x(nx), k2x(nx), k3x(nx), k4x(nx), k5x(nx), k6x(nx), k7x(nx);
  Mat k1j, k2j, k3j, k4j, k5j, k6j, k7j;

  while (st.t < t_end - 1e-14) {
    double target = t_end;
    if (mark_idx < marks.size()) target = std::min(target, marks[mark_idx]);
    h = std::min(h, target - st.t);
    if (h < opt.h_min)
      throw StepFailure("integrator step size underflow at t = " + std::to_string(st.t));

    k1x = rhs_x(st.x);
    if (with_j) k1j = rhs_j(st.x, st.J);

    Vec x2 = st.x + h * (a21 * k1x);
    Mat j2;
    if (with_j) j2 = st.J + h * (a21 * k1j);
    k2x = rhs_x(x2);
    if (with_j) k2j = rhs_j(x2, j2);

    Vec x3 = st.x + h * (a31 * k1x + a32 * k2x);
    Mat j3;
    if (with_j) j3 = st.J + h * (a31 * k1j + a32 * k2j);
    k3x = rhs_x(x3);
    if (with_j) k3j = rhs_j(x3, j3);

    Vec x4 = st.x + h * (a41 * k1x + a42 * k2x + a43 * k3x);
    Mat j4;
    if (with_j) j4 = st.J + h * (a41 * k1j + a42 * k2j + a43 * k3j);
    k4x = rhs_x(x4);
    if (with_j) k4j = rhs_j(x4, j4);

    Vec x5 = st.x + h * (a51 * k1x + a52 * k2x + a53 * k3x + a54 * k4x);
    Mat j5;
    if (with_j) j5 = st.J + h * (a51 * k1j + a52 * k2j + a53 * k3j + a54 * k4j);
    k5x = rhs_x(x5);
    if (with_j) k5j = rhs_j(x5, j5);

    Vec x6 = st.x + h * (a61 * k1x + a62 * k2x + a63 * k3x + a64 * k4x + a65 * k5x);
    Mat j6;
    if (with_j) j6 = st.J + h * (a61 * k1j + a62 * k2j + a63 * k3j + a64 * k4j + a65 * k5j);
    k6x = rhs_x(x6);
    if (with_j) k6j = rhs_j(x6, j6);

    Vec x_new = st.x + h * (b1 * k1x + b3 * k3x + b4 * k4x + b5 * k5x + b6 * k6x);
    Mat j_new;
    if (with_j) j_new = st.J + h * (b1 * k1j + b3 * k3j + b4 * k4j + b5 * k5j + b6 * k6j);
    k7x = rhs_x(x_new);
    if (with_j) k7j = rhs_j(x_new, j_new);

    Vec err_x = h * (e1 * k1x + e3 * k3x + e4 * k4x + e5 * k5x + e6 * k6x + e7 * k7x);

    double err = 0.0;
    int count = 0;
    for (int i = 0; i < nx; ++i) {
      double scale = opt.atol + opt.rtol * std::max(std::abs(st.x[i]), std::abs(x_new[i]));
      double r = err_x[i] / scale;
      err += r * r;
      ++count;
    }
    if (with_j) {
      Mat err_j = h * (e1 * k1j + e3 * k3j + e4 * k4j + e5 * k5j + e6 * k6j + e7 * k7j);
      for (int r0 = 0; r0 < err_j.rows(); ++r0)
        for (int c0 = 0; c0 < err_j.cols(); ++c0) {
          double scale = opt.atol + opt.rtol * std::max(std::abs(st.J(r0, c0)),
                                                        std::abs(j_new(r0, c0)));
          double r = err_j(r0, c0) / scale;
          err += r * r;
          ++count;
        }
    }
    err = std::sqrt(err / count);

    if (err <= 1.0) {
      st.t += h;
      st.x = model.project(x_new);
      if (with_j) st.J = j_new;
      bool hit_mark = mark_idx < marks.size() && std::abs(st.t - marks[mark_idx]) <= 1e-12;
      if (hit_mark) {
        if (on_mark) on_mark(st);
        ++mark_idx;
      }
      if (on_accept && on_accept(st)) return;
      double f = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h = std::min(opt.h_max, h * std::min(5.0, std::max(0.2, f)));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
  }
}

int capture_run(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                const Vec& x0, double sign, const LimitOptions& opt) {
  FlowState st;
  st.x = model.project(x0);

  auto try_capture = [&](const Vec& x) -> int {
    for (const auto& rec : records) {
      double d = model.distance(rec.position, x);
      if (d >= opt.capture_radius) continue;
      Vec disp = model.displacement(rec.position, x);
      Vec xi = rec.eigenframe.transpose() * disp;
      double expanding = 0.0;
      for (int j = 0; j < xi.size(); ++j) {
        bool expands = sign > 0 ? rec.exponents[j] > 0 : rec.exponents[j] < 0;
        if (expands) expanding += xi[j] * xi[j];
      }
      if (std::sqrt(expanding) <= std::max(1e-9, 1e-3 * d)) return rec.id;
    }
    return -1;
  };

  int hit = try_capture(st.x);
  if (hit >= 0) return hit;

  IntegrateOptions iopt;
  iopt.rtol = opt.rtol;
  int result = -1;
  dopri5(model, sign, st, opt.horizon, iopt, {}, nullptr, [&](const FlowState& s) {
    result = try_capture(s.x);
    return result >= 0;
  });
  if (result < 0) {
    std::ostringstream os;
    os << "limits: no convergence within horizon " << opt.horizon << " from (";
    for (int j = 0; j < x0.size(); ++j) os << (j ? "," : "") << x0[j];
    os << ")";
    throw NoConvergence(os.str());
  }
  return result;
}

}  // namespace

Trajectory integrate(const ManifoldModel& model, const Vec& x0, double t_final,
                     const IntegrateOptions& opt) {
  model.check_inside(model.project(x0));
  const double sign = t_final >= 0 ? 1.0 : -1.0;
  const double span = std::abs(t_final);
  FlowState st;
  st.x = model.project(x0);
  if (opt.with_jacobian) st.J = Mat::Identity(model.state_dim, model.state_dim);

  std::vector<double> marks;
  for (double t : opt.record_times) {
    double tau = sign * t;
    if (tau > 1e-15 && tau < span - 1e-15) marks.push_back(tau);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  Trajectory out;
  auto record = [&](const FlowState& s) {
    out.times.push_back(sign * s.t);
    out.states.push_back(s.x);
    if (opt.with_jacobian) out.jacobians.push_back(s.J);
  };
  record(st);

  if (span > 0) {
    if (opt.record_all_steps) {
      dopri5(model, sign, st, span, opt, marks, nullptr, [&](const FlowState& s) {
        record(s);
        return false;
      });
    } else {
      dopri5(model, sign, st, span, opt, marks, record, nullptr);
      record(st);
    }
  }

  if (sign < 0) {  // report with increasing times
    std::reverse(out.times.begin(), out.times.end());
    std::reverse(out.states.begin(), out.states.end());
    std::reverse(out.jacobians.begin(), out.jacobians.end());
  }
  return out;
}

std::pair<int, int> limits(const ManifoldModel& model,
                           const std::vector<CriticalPointRecord>& records, const Vec& x0,
                           const LimitOptions& opt) {
  int omega = capture_run(model, records, x0, +1.0, opt);
  int alpha = capture_run(model, records, x0, -1.0, opt);
  return {alpha, omega};
}

int omega_limit_of(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const Vec& x0, const LimitOptions& opt) {
  return capture_run(model, records, x0, +1.0, opt);
}

int alpha_limit_of(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const Vec& x0, const LimitOptions& opt) {
  return capture_run(model, records, x0, -1.0, opt);
}

BasinMap basin_map(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const std::vector<Vec>& grid, const LimitOptions& opt, int jobs) {
  BasinMap map;
  map.grid = grid;
  map.alpha_limit.assign(grid.size(), -1);
  map.omega_limit.assign(grid.size(), -1);
  std::vector<std::string> failures(grid.size());
  parallel_for(grid.size(), [&](size_t i) {
    try {
      auto [alpha, omega] = limits(model, records, grid[i], opt);
      map.alpha_limit[i] = alpha;
      map.omega_limit[i] = omega;
    } catch (const NoConvergence& e) {
      failures[i] = e.what();
    }
  }, jobs);
  for (size_t i = 0; i < grid.size(); ++i)
    if (!failures[i].empty()) throw NoConvergence(failures[i]);
  return map;
}

BasinMap basin_map(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const QuadratureGrid& grid, const LimitOptions& opt, int jobs) {
  BasinMap map = basin_map(model, records, grid.nodes, opt, jobs);
  map.weights = grid.weights;
  return map;
}

namespace {

// oriented unstable frame of a record (columns with positive exponents)
Mat unstable_frame(const CriticalPointRecord& rec) {
  const int n = static_cast<int>(rec.exponents.size());
  const int m = n - rec.index;
  Mat u(rec.eigenframe.rows(), m);
  for (int j = 0; j < m; ++j) u.col(j) = rec.eigenframe.col(rec.index + j);
  return u;
}

// modified Gram-Schmidt with positive diagonal, preserves det sign
Mat orthonormalize(Mat m) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
    double norm = m.col(j).norm();
    if (norm < 1e-300) norm = 1.0;
    m.col(j) /= norm;
  }
  return m;
}

struct ShotResult {
  int omega = -1;
  double d_min = std::numeric_limits<double>::infinity();
  Vec x_min;   // state at closest approach to the target
  Mat j_min;   // Jacobian there (if tracked)
  bool converged = false;
};

ShotResult shoot(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                 const Vec& seed, const CriticalPointRecord& target, bool with_jacobian,
                 const ShootOptions& opt) {
  ShotResult res;
  FlowState st;
  st.x = model.project(seed);
  if (with_jacobian) st.J = Mat::Identity(model.state_dim, model.state_dim);

  LimitOptions lopt;
  lopt.capture_radius = opt.capture_radius;
  lopt.horizon = opt.horizon;
  lopt.rtol = opt.rtol;

  auto try_capture = [&](const Vec& x) -> int {
    for (const auto& rec : records) {
      double d = model.distance(rec.position, x);
      if (d >= lopt.capture_radius) continue;
      Vec xi = rec.eigenframe.transpose() * model.displacement(rec.position, x);
      double expanding = 0.0;
      for (int j = 0; j < xi.size(); ++j)
        if (rec.exponents[j] > 0) expanding += xi[j] * xi[j];
      if (std::sqrt(expanding) <= std::max(1e-9, 1e-3 * d)) return rec.id;
    }
    return -1;
  };

  IntegrateOptions iopt;
  iopt.rtol = opt.rtol;

  auto observe = [&](const FlowState& s) {
    double d = model.distance(target.position, s.x);
    if (d < res.d_min) {
      res.d_min = d;
      res.x_min = s.x;
      if (with_jacobian) res.j_min = s.J;
    }
    int hit = try_capture(s.x);
    if (hit >= 0) {
      res.omega = hit;
      res.converged = true;
      return true;
    }
    return false;
  };

  observe(st);
  if (!res.converged)
    dopri5(model, +1.0, st, opt.horizon, iopt, {}, nullptr, observe);
  return res;
}

int transport_sign(const ManifoldModel& model, const CriticalPointRecord& a,
                   const CriticalPointRecord& b, const Mat& jac_at_arrival,
                   const Vec& arrival_state) {
  Mat ua = unstable_frame(a);
  Mat transported = jac_at_arrival * ua;  // spans T W^u(a) at the arrival point
  Mat f_hat = orthonormalize(transported);

  Vec v = model.velocity(arrival_state);
  Mat ub = unstable_frame(b);
  Mat basis(model.state_dim, 1 + ub.cols());
  basis.col(0) = v / v.norm();
  for (int j = 0; j < ub.cols(); ++j) basis.col(1 + j) = ub.col(j);
  Mat b_hat = orthonormalize(basis);

  double det = (b_hat.transpose() * f_hat).determinant();
  return det >= 0 ? 1 : -1;
}

}  // namespace

ConnectionCount count_connections(const ManifoldModel& model,
                                  const std::vector<CriticalPointRecord>& records,
                                  const CriticalPointRecord& a, const CriticalPointRecord& b,
                                  const ShootOptions& opt) {
  if (b.index != a.index + 1)
    throw IndexGapNotOne("count_connections: index(" + std::to_string(b.id) + ") != index(" +
                         std::to_string(a.id) + ") + 1");
  const int n = model.dim;
  const int m_u = n - a.index;
  ConnectionCount out;
  out.source = a.id;
  out.target = b.id;

  Mat ua = unstable_frame(a);

  auto seed_at = [&](double param) -> Vec {
    if (m_u == 1) return model.project(a.position + opt.delta * param * ua.col(0));
    Vec dir = std::cos(param) * ua.col(0) + std::sin(param) * ua.col(1);
    return model.project(a.position + opt.delta * dir);
  };

  auto record_orbit = [&](double param, double delta_used) -> bool {
    // re-shoot with the Jacobian for the sign; delta halving must agree
    Vec dir = m_u == 1 ? Vec(param * ua.col(0))
                       : Vec(std::cos(param) * ua.col(0) + std::sin(param) * ua.col(1));
    Vec seed = model.project(a.position + delta_used * dir);
    ShotResult full = shoot(model, records, seed, b, true, opt);
    if (full.d_min > opt.capture_radius) return false;

    Vec seed_half = model.project(a.position + 0.5 * delta_used * dir);
    ShotResult half = shoot(model, records, seed_half, b, false, opt);
    if (half.d_min > opt.capture_radius) return false;  // not Richardson-stable

    ConnectionOrbit orbit;
    orbit.seed_parameter = param;
    orbit.closest_approach = full.d_min;
    orbit.arrival_state = full.x_min;
    orbit.sign = transport_sign(model, a, b, full.j_min, full.x_min);
    out.orbits.push_back(orbit);
    return true;
  };

  if (m_u == 1) {
    for (double side : {+1.0, -1.0}) {
      ShotResult res = shoot(model, records, seed_at(side), b, false, opt);
      if (res.converged && res.omega == b.id) record_orbit(side, opt.delta);
    }
  } else if (m_u == 2) {
    const int n_shoot = std::max(opt.n_shoot, 8);
    std::vector<double> dmin(n_shoot);
    parallel_for(n_shoot, [&](size_t i) {
      double psi = 2.0 * std::numbers::pi * double(i) / n_shoot;
      dmin[i] = shoot(model, records, seed_at(psi), b, false, opt).d_min;
    }, opt.jobs);

    double dip_threshold = 0.25 * model.distance(a.position, b.position);
    auto dmin_of = [&](double psi) {
      return shoot(model, records, seed_at(psi), b, false, opt).d_min;
    };

    std::vector<double> found;
    for (int i = 0; i < n_shoot; ++i) {
      double prev = dmin[(i + n_shoot - 1) % n_shoot];
      double next = dmin[(i + 1) % n_shoot];
      if (dmin[i] > dip_threshold || dmin[i] > prev || dmin[i] > next) continue;
      // golden-section refinement of the dip
      double h = 2.0 * std::numbers::pi / n_shoot;
      double lo = 2.0 * std::numbers::pi * double(i) / n_shoot - h;
      double hi = lo + 2 * h;
      constexpr double kGolden = 0.6180339887498949;
      double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
      double f1 = dmin_of(x1), f2 = dmin_of(x2);
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kGolden * (hi - lo);
          f1 = dmin_of(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kGolden * (hi - lo);
          f2 = dmin_of(x2);
        }
      }
      double psi_star = 0.5 * (lo + hi);
      if (std::min(f1, f2) > opt.capture_radius) continue;  // dip does not reach the target
      psi_star = std::fmod(psi_star + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
      bool dup = false;
      for (double p : found) {
        double diff = std::abs(p - psi_star);
        diff = std::min(diff, 2.0 * std::numbers::pi - diff);
        if (diff < 2.0 * std::numbers::pi / n_shoot) dup = true;
      }
      if (!dup) found.push_back(psi_star);
    }

    for (size_t i = 0; i < found.size(); ++i)
      for (size_t j = i + 1; j < found.size(); ++j) {
        double diff = std::abs(found[i] - found[j]);
        diff = std::min(diff, 2.0 * std::numbers::pi - diff);
        if (diff < 10.0 * 2.0 * std::numbers::pi / n_shoot)
          throw AmbiguousCluster("count_connections: two orbits within 10x seed spacing; "
                                 "increase n_shoot");
      }

    for (double psi : found) record_orbit(psi, opt.delta);
  } else {
    throw Error("count_connections: unstable dimension " + std::to_string(m_u) +
                " not supported by the shooting pipeline");
  }

  out.signed_count = 0;
  for (const auto& orbit : out.orbits) out.signed_count += orbit.sign;
  return out;
}

std::vector<ConnectionCount> all_connections(const ManifoldModel& model,
                                             const std::vector<CriticalPointRecord>& records,
                                             const ShootOptions& opt) {
  std::vector<ConnectionCount> out;
  for (const auto& a : records)
    for (const auto& b : records)
      if (b.index == a.index + 1)
        out.push_back(count_connections(model, records, a, b, opt));
  return out;
}

}  // namespace gradspec
