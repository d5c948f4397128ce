#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nonloc/geometry.hpp"

namespace nonloc {

struct Rational {
  long long num = 0;
  long long den = 1;
};

// Even polynomial p(s) = sum_j coeffs[j] * s^{2j} of degree 2*order that
// matches the radial kernel and its first `order` derivatives at s = 1.
struct MatchedPolynomial {
  int order = 0;
  std::vector<double> coeffs;
  std::vector<Rational> exact;  // populated when solved in rational arithmetic

  double operator()(double s) const;  // raw polynomial, no support cutoff
};

// The pair (kappa, p^{2K}) with gamma(s) = kappa(s) + p(s)*chi(|s|<1).
//
// kappa carries the origin singularity and vanishes to order K at s = 1.
// Near the horizon edge it is evaluated through the exactly factored form
// kappa(s) = c * (1-s)^{K+1} * tail(s) / s, which keeps the high-order
// finite-difference behavior at s = 1 free of cancellation.
struct SplitKernel {
  double scale = 1.0;
  MatchedPolynomial polynomial;
  std::vector<double> tail;  // tail(s) coefficients, degree K

  double kappa(double s) const;
};

enum class ProfileFamily {
  InverseS,             // c/|s| on |s|<1
  ConicalInverseS,      // c/|s| * (1-|s|) on |s|<1
  Regularized,          // c/|s| - c*p^{2k}(s) on |s|<1, C^k at the edge
  PolynomialTruncated,  // c*p^{2K}(s) on |s|<1
};

struct RadialProfile {
  ProfileFamily family = ProfileFamily::InverseS;
  double c = 1.0;  // normalization constant (c1/c2 of the kernel families)
  int order = 0;   // k for Regularized, K for PolynomialTruncated

  // Regularized and PolynomialTruncated carry their construction.
  std::shared_ptr<const SplitKernel> split_data;
  std::shared_ptr<const MatchedPolynomial> poly;

  static RadialProfile inverse_s(double c = 1.0);
  static RadialProfile conical(double c = 1.0);
  static RadialProfile regularized(int k, double c = 1.0);
  static RadialProfile truncated_polynomial(int K, double c = 1.0);

  bool singular_at_origin() const;
};

// gamma(|s|); exactly zero for |s| >= 1. Throws std::domain_error at s = 0
// for families singular at the origin.
double eval_profile(const RadialProfile& profile, double s);

// Solve p^(m)(1) = gamma^(m)(1), m = 0..K. Exact rational elimination for
// small K, dense LU in doubles beyond that.
MatchedPolynomial match_polynomial(const RadialProfile& profile, int K);

SplitKernel split(const RadialProfile& profile, int K);

// M2 = int_{-1}^{1} s^2 gamma(|s|) ds by adaptive Simpson quadrature.
double second_moment(const RadialProfile& profile);

enum class HorizonKind { Constant, GaussianBump };

struct HorizonField {
  HorizonKind kind = HorizonKind::Constant;
  double delta0 = 0.25;

  // GaussianBump: delta0 * (1 + exp(-20 (x-1/2)^2)) in the first coordinate.
  double operator()(const Point& x) const;
  double max_radius() const;
};

enum class SymmetryClass { NonDivergence, Divergence };

struct KernelSpec {
  int dim = 1;
  RadialProfile profile;
  HorizonField horizon;
  SymmetryClass symmetry = SymmetryClass::NonDivergence;
  double coefficient_value = 1.0;
  // Optional non-constant diffusion coefficient; must be symmetric for the
  // Divergence class. Overrides coefficient_value when set.
  std::function<double(const Point&, const Point&)> coefficient_fn;

  double coefficient(const Point& x, const Point& y) const;
  double coefficient_at(const Point& x) const { return coefficient(x, x); }
  // Divergence class uses the symmetrized mean horizon.
  double horizon_at(const Point& x, const Point& y) const;
  double horizon_at(const Point& x) const { return horizon(x); }
};

// omega(x,y) = C(x,y)/delta(x,y)^{d+2} * gamma(|y-x|/delta); zero outside
// the horizon.
double eval_omega(const KernelSpec& spec, const Point& x, const Point& y);

// Plain-text key=value serialization (keys: dimension, profile,
// regularity_k, split_K, horizon_kind, delta0, coefficient).
std::map<std::string, std::string> kernel_spec_to_config(
    const KernelSpec& spec, int split_K = 0);
KernelSpec kernel_spec_from_config(
    const std::map<std::string, std::string>& kv);

}  // namespace nonloc
