#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gradspec/errors.hpp"

namespace gradspec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BuiltinKind { FlatTorus2, RoundSphere2Embedded, Custom };

// A chart is a set of analytic closures over one coordinate box. Built-in
// models carry analytic gradients and Hessians so downstream derivatives are
// exact; user-defined charts may omit them and fall back to central
// differences with step 1e-6 scaled by the chart extent.
struct Chart {
  Vec lo, hi;                   // coordinate box
  std::vector<bool> periodic;   // wrap-around per coordinate
  std::function<Mat(const Vec&)> metric;   // g(x), symmetric positive definite
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad_f;   // optional: df (covector) == nullptr -> FD
  std::function<Mat(const Vec&)> hess_f;   // optional: coordinate Hessian of f
};

// Compact model manifold with metric and Morse function. Points of the
// embedded sphere live in R^3 (state_dim 3, dim 2); everything else uses
// chart coordinates directly.
struct ManifoldModel {
  std::string name;
  int dim = 0;        // intrinsic dimension n
  int state_dim = 0;  // length of point vectors
  BuiltinKind kind = BuiltinKind::Custom;
  std::map<std::string, double> params;
  std::vector<Chart> charts;

  bool embedded_sphere() const { return kind == BuiltinKind::RoundSphere2Embedded; }

  // gradient flow field V_f(x) = g(x)^{-1} grad f(x); for the embedded sphere
  // this is the tangential projection of the ambient gradient.
  Vec velocity(const Vec& x) const;
  Mat dvelocity(const Vec& x) const;  // Jacobian of V_f, used by Newton and the
                                      // variational equation
  double f(const Vec& x) const;
  Mat metric(const Vec& x) const;

  // Pulls a drifted state back onto the model (sphere renormalization,
  // torus wrap). Safe to call on every integrator step.
  Vec project(const Vec& x) const;
  // Chart distance; wrap-around on periodic coordinates, ambient on the sphere.
  double distance(const Vec& a, const Vec& b) const;
  // Displacement b-a respecting wrap-around (tangent-plane projected on the sphere).
  Vec displacement(const Vec& a, const Vec& b) const;
  // Canonical representative used for sorting/dedup (torus: wrapped into [0,2pi)).
  Vec canonical(const Vec& x) const;

  void check_inside(const Vec& x) const;  // throws PointOutsideAtlas
  Vec random_point(std::uint64_t seed) const;
};

// Per-op wrapper mirroring the library surface: V_f(x) with analytic gradient
// when available, finite differences otherwise.
Vec gradient_at(const ManifoldModel& model, const Vec& x);

ManifoldModel builtin(const std::string& name, const std::map<std::string, double>& params);
// Same model with f replaced by -f (flow reversed); used for Poincare duality.
ManifoldModel negated(const ManifoldModel& model);

struct QuadratureGrid {
  std::vector<Vec> nodes;
  std::vector<double> weights;
  int n1 = 0, n2 = 0;
};

// Torus: tensor midpoint rule (trapezoid on periodic data, spectrally
// accurate). Sphere: Gauss-Legendre in z = cos(colatitude) x midpoint in
// longitude; nodes never sit on the poles. n2 defaults to n1 (torus) or 2*n1
// (sphere).
QuadratureGrid quadrature_grid(const ManifoldModel& model, int n1, int n2 = -1);

// Uniform sampling grid for basin classification; torus nodes start at 0 so
// invariant circles through critical points are represented.
std::vector<Vec> uniform_grid(const ManifoldModel& model, int density);

// Differential form sampled in chart coordinates. Components are indexed by
// the k-subsets of {1..n} in lexicographic order; degree 0 and n have a single
// component (for the sphere the degree-2 component is the density against the
// area form).
struct FormSample {
  int degree = 0;
  std::function<Vec(const Vec&)> eval;

  static FormSample function(std::function<double(const Vec&)> f) {
    FormSample s;
    s.degree = 0;
    s.eval = [f = std::move(f)](const Vec& x) { return Vec::Constant(1, f(x)); };
    return s;
  }
  static FormSample volume(int n, std::function<double(const Vec&)> density) {
    FormSample s;
    s.degree = n;
    s.eval = [d = std::move(density)](const Vec& x) { return Vec::Constant(1, d(x)); };
    return s;
  }
};

// <a, b> = integral of a ^ b over M by tensor-product quadrature.
double wedge_pair(const ManifoldModel& model, const FormSample& a, const FormSample& b,
                  const QuadratureGrid& grid);

// Gauss-Legendre nodes/weights on [-1,1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace gradspec
