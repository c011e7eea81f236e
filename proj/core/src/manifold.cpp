#include "gradspec/manifold.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gradspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec fd_gradient(const Chart& chart, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  for (int j = 0; j < n; ++j) {
    double extent = chart.hi[j] - chart.lo[j];
    double h = 1e-6 * (extent > 0 ? extent : 1.0);
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (chart.f(xp) - chart.f(xm)) / (2 * h);
  }
  return g;
}

Mat fd_hessian(const ManifoldModel& model, const Chart& chart, const Vec& x) {
  // central differences of the (analytic or FD) coordinate gradient
  const int n = static_cast<int>(x.size());
  auto grad = [&](const Vec& p) {
    return chart.grad_f ? chart.grad_f(p) : fd_gradient(chart, p);
  };
  Mat h(n, n);
  for (int j = 0; j < n; ++j) {
    double extent = chart.hi[j] - chart.lo[j];
    double step = 1e-6 * (extent > 0 ? extent : 1.0);
    Vec xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    h.col(j) = (grad(xp) - grad(xm)) / (2 * step);
  }
  (void)model;
  return 0.5 * (h + h.transpose());
}

double wrap_delta(double d) {
  d = std::fmod(d, kTwoPi);
  if (d < -std::numbers::pi) d += kTwoPi;
  if (d >= std::numbers::pi) d -= kTwoPi;
  return d;
}

// lexicographic k-subsets of {0..n-1}
std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

int shuffle_sign(const std::vector<int>& kset, const std::vector<int>& comp) {
  // parity of the permutation (kset, comp) -> (0..n-1)
  int inv = 0;
  for (int p : kset)
    for (int q : comp)
      if (p > q) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

Vec ManifoldModel::velocity(const Vec& x) const {
  const Chart& chart = charts.at(0);
  if (embedded_sphere()) {
    Vec gF = chart.grad_f(x);
    double mu = x.dot(gF);
    return gF - mu * x;
  }
  Vec df = chart.grad_f ? chart.grad_f(x) : fd_gradient(chart, x);
  Mat g = chart.metric(x);
  if (g.isIdentity(1e-14)) return df;
  return g.ldlt().solve(df);
}

Mat ManifoldModel::dvelocity(const Vec& x) const {
  const Chart& chart = charts.at(0);
  if (embedded_sphere()) {
    Vec gF = chart.grad_f(x);
    Mat h = chart.hess_f(x);
    double mu = x.dot(gF);
    return h - x * (gF + h * x).transpose() - mu * Mat::Identity(3, 3);
  }
  if (chart.hess_f) {
    Mat g = chart.metric(x);
    if (g.isIdentity(1e-14)) return chart.hess_f(x);
  }
  // FD fallback on the velocity field itself (handles position-dependent metric)
  const int n = state_dim;
  Mat dv(n, n);
  for (int j = 0; j < n; ++j) {
    double extent = chart.hi[j] - chart.lo[j];
    double h = 1e-6 * (extent > 0 ? extent : 1.0);
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    dv.col(j) = (velocity(xp) - velocity(xm)) / (2 * h);
  }
  return dv;
}

double ManifoldModel::f(const Vec& x) const { return charts.at(0).f(x); }

Mat ManifoldModel::metric(const Vec& x) const {
  if (embedded_sphere()) return Mat::Identity(3, 3);
  return charts.at(0).metric(x);
}

Vec ManifoldModel::project(const Vec& x) const {
  if (embedded_sphere()) return x / x.norm();
  return x;
}

double ManifoldModel::distance(const Vec& a, const Vec& b) const {
  return displacement(a, b).norm();
}

Vec ManifoldModel::displacement(const Vec& a, const Vec& b) const {
  if (embedded_sphere()) {
    Vec d = b - a;
    return d - a.dot(d) * a;  // tangent component at a
  }
  const Chart& chart = charts.at(0);
  Vec d = b - a;
  for (int j = 0; j < d.size(); ++j)
    if (chart.periodic[j]) d[j] = wrap_delta(d[j]);
  return d;
}

Vec ManifoldModel::canonical(const Vec& x) const {
  if (embedded_sphere()) return x / x.norm();
  const Chart& chart = charts.at(0);
  Vec c = x;
  for (int j = 0; j < c.size(); ++j)
    if (chart.periodic[j]) {
      c[j] = std::fmod(c[j], kTwoPi);
      if (c[j] < 0) c[j] += kTwoPi;
      if (c[j] > kTwoPi - 1e-9) c[j] = 0.0;  // snap 2pi-eps back to 0
    }
  return c;
}

void ManifoldModel::check_inside(const Vec& x) const {
  if (x.size() != state_dim)
    throw PointOutsideAtlas(name + ": point has wrong dimension");
  if (embedded_sphere()) {
    if (std::abs(x.squaredNorm() - 1.0) > 1e-9)
      throw PointOutsideAtlas(name + ": point violates |x|^2 = 1");
    return;
  }
  const Chart& chart = charts.at(0);
  for (int j = 0; j < x.size(); ++j) {
    if (chart.periodic[j]) continue;
    if (x[j] < chart.lo[j] - 1e-12 || x[j] > chart.hi[j] + 1e-12)
      throw PointOutsideAtlas(name + ": coordinate " + std::to_string(j) + " outside chart box");
  }
}

Vec ManifoldModel::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  if (embedded_sphere()) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec x(3);
    do {
      for (int j = 0; j < 3; ++j) x[j] = nd(rng);
    } while (x.norm() < 1e-8);
    return x / x.norm();
  }
  const Chart& chart = charts.at(0);
  Vec x(state_dim);
  for (int j = 0; j < state_dim; ++j) {
    std::uniform_real_distribution<double> ud(chart.lo[j], chart.hi[j]);
    x[j] = ud(rng);
  }
  return x;
}

Vec gradient_at(const ManifoldModel& model, const Vec& x) {
  model.check_inside(x);
  return model.velocity(x);
}

ManifoldModel builtin(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key) -> double {
    auto it = params.find(key);
    if (it == params.end()) throw BadParams(name + ": missing parameter '" + key + "'");
    return it->second;
  };

  if (name == "flat_torus2" || name == "FlatTorus2") {
    double c1 = get("c1"), c2 = get("c2");
    if (c1 == 0.0 || c2 == 0.0) throw BadParams("flat_torus2: c1 and c2 must be nonzero");
    ManifoldModel m;
    m.name = "flat_torus2";
    m.dim = 2;
    m.state_dim = 2;
    m.kind = BuiltinKind::FlatTorus2;
    m.params = {{"c1", c1}, {"c2", c2}};
    Chart chart;
    chart.lo = Vec::Zero(2);
    chart.hi = Vec::Constant(2, kTwoPi);
    chart.periodic = {true, true};
    chart.metric = [](const Vec&) { return Mat::Identity(2, 2); };
    chart.f = [c1, c2](const Vec& t) { return c1 * std::cos(t[0]) + c2 * std::cos(t[1]); };
    chart.grad_f = [c1, c2](const Vec& t) {
      Vec g(2);
      g << -c1 * std::sin(t[0]), -c2 * std::sin(t[1]);
      return g;
    };
    chart.hess_f = [c1, c2](const Vec& t) {
      Mat h = Mat::Zero(2, 2);
      h(0, 0) = -c1 * std::cos(t[0]);
      h(1, 1) = -c2 * std::cos(t[1]);
      return h;
    };
    m.charts.push_back(std::move(chart));
    return m;
  }

  if (name == "round_sphere2" || name == "RoundSphere2Embedded") {
    double a = get("a"), b = get("b"), c = get("c");
    bool height = (a == 0.0 && b == 0.0 && c == 1.0);  // degenerates to f = z
    if (!height && (a == b || b == c || a == c))
      throw BadParams("round_sphere2: a, b, c must be pairwise distinct (quadratic case)");
    ManifoldModel m;
    m.name = "round_sphere2";
    m.dim = 2;
    m.state_dim = 3;
    m.kind = BuiltinKind::RoundSphere2Embedded;
    m.params = {{"a", a}, {"b", b}, {"c", c}};
    Chart chart;
    chart.lo = Vec::Constant(3, -1.0);
    chart.hi = Vec::Constant(3, 1.0);
    chart.periodic = {false, false, false};
    chart.metric = [](const Vec&) { return Mat::Identity(3, 3); };
    if (height) {
      chart.f = [](const Vec& x) { return x[2]; };
      chart.grad_f = [](const Vec&) {
        Vec g(3);
        g << 0, 0, 1;
        return g;
      };
      chart.hess_f = [](const Vec&) { return Mat::Zero(3, 3); };
    } else {
      chart.f = [a, b, c](const Vec& x) {
        return a * x[0] * x[0] + b * x[1] * x[1] + c * x[2] * x[2];
      };
      chart.grad_f = [a, b, c](const Vec& x) {
        Vec g(3);
        g << 2 * a * x[0], 2 * b * x[1], 2 * c * x[2];
        return g;
      };
      chart.hess_f = [a, b, c](const Vec&) {
        Mat h = Mat::Zero(3, 3);
        h(0, 0) = 2 * a;
        h(1, 1) = 2 * b;
        h(2, 2) = 2 * c;
        return h;
      };
    }
    m.charts.push_back(std::move(chart));
    return m;
  }

  throw UnknownBuiltin("unknown builtin model '" + name + "'");
}

ManifoldModel negated(const ManifoldModel& model) {
  ManifoldModel m = model;
  m.name = model.name + "_neg";
  for (auto& chart : m.charts) {
    auto f0 = chart.f;
    chart.f = [f0](const Vec& x) { return -f0(x); };
    if (chart.grad_f) {
      auto g0 = chart.grad_f;
      chart.grad_f = [g0](const Vec& x) { return Vec(-g0(x)); };
    }
    if (chart.hess_f) {
      auto h0 = chart.hess_f;
      chart.hess_f = [h0](const Vec& x) { return Mat(-h0(x)); };
    }
  }
  return m;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix
  Mat jac = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jac);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

QuadratureGrid quadrature_grid(const ManifoldModel& model, int n1, int n2) {
  QuadratureGrid grid;
  if (model.kind == BuiltinKind::RoundSphere2Embedded) {
    if (n2 < 0) n2 = 2 * n1;
    grid.n1 = n1;
    grid.n2 = n2;
    std::vector<double> z, wz;
    gauss_legendre(n1, z, wz);
    double dphi = kTwoPi / n2;
    grid.nodes.reserve(static_cast<size_t>(n1) * n2);
    grid.weights.reserve(static_cast<size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
      double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
      for (int j = 0; j < n2; ++j) {
        double phi = (j + 0.5) * dphi;
        Vec x(3);
        x << s * std::cos(phi), s * std::sin(phi), z[i];
        grid.nodes.push_back(x);
        grid.weights.push_back(wz[i] * dphi);
      }
    }
    return grid;
  }
  if (n2 < 0) n2 = n1;
  grid.n1 = n1;
  grid.n2 = n2;
  double h1 = kTwoPi / n1, h2 = kTwoPi / n2;
  grid.nodes.reserve(static_cast<size_t>(n1) * n2);
  grid.weights.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      Vec x(2);
      x << (i + 0.5) * h1, (j + 0.5) * h2;  // midpoints avoid the invariant circles
      grid.nodes.push_back(x);
      grid.weights.push_back(h1 * h2);
    }
  return grid;
}

std::vector<Vec> uniform_grid(const ManifoldModel& model, int density) {
  if (model.kind == BuiltinKind::RoundSphere2Embedded) {
    auto grid = quadrature_grid(model, density, 2 * density);
    return grid.nodes;
  }
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<size_t>(density) * density);
  double h = kTwoPi / density;
  for (int i = 0; i < density; ++i)
    for (int j = 0; j < density; ++j) {
      Vec x(2);
      x << i * h, j * h;
      nodes.push_back(x);
    }
  return nodes;
}

double wedge_pair(const ManifoldModel& model, const FormSample& a, const FormSample& b,
                  const QuadratureGrid& grid) {
  const int n = model.dim;
  if (a.degree + b.degree != n)
    throw DegreeMismatch("wedge_pair: degrees " + std::to_string(a.degree) + "+" +
                         std::to_string(b.degree) + " != n=" + std::to_string(n));
  if (model.embedded_sphere() && a.degree != 0 && a.degree != n)
    throw DegreeMismatch("wedge_pair: sphere supports degrees {0, n} only");

  double total = 0.0;
  if (a.degree == 0 || a.degree == n) {
    for (size_t i = 0; i < grid.nodes.size(); ++i)
      total += grid.weights[i] * a.eval(grid.nodes[i])[0] * b.eval(grid.nodes[i])[0];
    return total;
  }
  // intermediate degree on chart models: sum over complementary index subsets
  auto ksets = subsets_of_size(n, a.degree);
  std::vector<std::vector<int>> comps;
  std::vector<int> signs;
  std::map<std::vector<int>, int> comp_index;
  auto csets = subsets_of_size(n, n - a.degree);
  for (size_t i = 0; i < csets.size(); ++i) comp_index[csets[i]] = static_cast<int>(i);
  for (const auto& ks : ksets) {
    std::vector<int> comp;
    for (int j = 0; j < n; ++j)
      if (std::find(ks.begin(), ks.end(), j) == ks.end()) comp.push_back(j);
    signs.push_back(shuffle_sign(ks, comp));
    comps.push_back(comp);
  }
  for (size_t i = 0; i < grid.nodes.size(); ++i) {
    Vec av = a.eval(grid.nodes[i]);
    Vec bv = b.eval(grid.nodes[i]);
    double density = 0.0;
    for (size_t s = 0; s < ksets.size(); ++s)
      density += signs[s] * av[s] * bv[comp_index[comps[s]]];
    total += grid.weights[i] * density;
  }
  return total;
}

}  // namespace gradspec
