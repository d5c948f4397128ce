#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "nonloc/kernel.hpp"

using namespace nonloc;

namespace {

// Fornberg weights for the m-th derivative at x0 from the given nodes.
std::vector<double> fd_weights(int m, const std::vector<double>& xs,
                               double x0) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<std::vector<double>>> d(
      n, std::vector<std::vector<double>>(n, std::vector<double>(m + 1, 0.0)));
  d[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i < n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k)
        d[i][j][k] = ((xs[i] - x0) * d[i - 1][j][k] -
                      (k ? k * d[i - 1][j][k - 1] : 0.0)) /
                     c3;
    }
    for (int k = 0; k <= std::min(i, m); ++k)
      d[i][i][k] = c1 / c2 *
                   ((k ? k * d[i - 1][i - 1][k - 1] : 0.0) -
                    (xs[i - 1] - x0) * d[i - 1][i - 1][k]);
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = d[n - 1][j][m];
  return w;
}

// One-sided m-th derivative of f at 1 from inside, step h.
double one_sided_derivative(const std::function<double(double)>& f, int m,
                            double h) {
  const int pts = m + 5;
  std::vector<double> xs(pts);
  for (int i = 0; i < pts; ++i) xs[i] = -i * h;
  const auto w = fd_weights(m, xs, 0.0);
  double acc = 0.0;
  for (int i = 0; i < pts; ++i) acc += w[i] * f(1.0 + xs[i]);
  return acc;
}

double rat(const Rational& r) {
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

}  // namespace

TEST_CASE("profile evaluation on the kernel families") {
  const auto inv = RadialProfile::inverse_s();
  CHECK(eval_profile(inv, 0.5) == 2.0);
  CHECK(eval_profile(inv, 1.2) == 0.0);
  CHECK(eval_profile(inv, 1.0) == 0.0);
  CHECK(eval_profile(inv, -0.5) == 2.0);
  CHECK_THROWS_AS((void)eval_profile(inv, 0.0), std::domain_error);

  const auto con = RadialProfile::conical();
  CHECK(eval_profile(con, 0.5) == 1.0);
  CHECK(eval_profile(con, 1.0) == 0.0);

  const auto trunc = RadialProfile::truncated_polynomial(0);
  CHECK(eval_profile(trunc, 0.5) == 1.0);
  CHECK(eval_profile(trunc, 0.0) == 1.0);
  CHECK(eval_profile(trunc, 1.0) == 0.0);
}

TEST_CASE("matching polynomials solve the derivative conditions exactly") {
  const auto inv = RadialProfile::inverse_s();

  // K = 0..2 agree with the printed formulas
  const auto p0 = match_polynomial(inv, 0);
  REQUIRE(p0.coeffs.size() == 1);
  CHECK(p0.coeffs[0] == 1.0);

  const auto p1 = match_polynomial(inv, 1);
  CHECK(p1.coeffs[0] == 1.5);
  CHECK(p1.coeffs[1] == -0.5);

  const auto p2 = match_polynomial(inv, 2);
  CHECK(p2.coeffs[0] == 15.0 / 8.0);
  CHECK(p2.coeffs[1] == -5.0 / 4.0);
  CHECK(p2.coeffs[2] == 3.0 / 8.0);

  // K = 3: the unique even degree-6 solution of p^(m)(1) = (-1)^m m!,
  // m = 0..3. (Equal to the binomial series of 1/s in powers of 1-s^2.)
  const auto p3 = match_polynomial(inv, 3);
  CHECK(p3.coeffs[0] == 35.0 / 16.0);
  CHECK(p3.coeffs[1] == -35.0 / 16.0);
  CHECK(p3.coeffs[2] == 21.0 / 16.0);
  CHECK(p3.coeffs[3] == -5.0 / 16.0);

  // exact rationals are carried along
  REQUIRE(p3.exact.size() == 4);
  CHECK(p3.exact[0].num == 35);
  CHECK(p3.exact[0].den == 16);
  CHECK(rat(p3.exact[3]) == -5.0 / 16.0);

  // direct verification of the matching system for every K
  for (int K = 0; K <= 3; ++K) {
    const auto p = match_polynomial(inv, K);
    for (int m = 0; m <= K; ++m) {
      // p^(m)(1) = sum_j c_j (2j)(2j-1)...(2j-m+1)
      double lhs = 0.0;
      for (int j = 0; j <= K; ++j) {
        double ff = 1.0;
        for (int q = 0; q < m; ++q) ff *= 2 * j - q;
        lhs += p.coeffs[j] * ff;
      }
      double rhs = 1.0;  // gamma^(m)(1) = (-1)^m m!
      for (int q = 1; q <= m; ++q) rhs *= -q;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
  }

  // scaling: coefficients are linear in the normalization constant
  const auto p2c = match_polynomial(RadialProfile::inverse_s(2.0), 2);
  CHECK(p2c.coeffs[0] == doctest::Approx(2.0 * 15.0 / 8.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)match_polynomial(RadialProfile::conical(), 1),
                  std::invalid_argument);

  // K > 4 falls back to the floating solve and still matches
  const auto p5 = match_polynomial(inv, 5);
  REQUIRE(p5.coeffs.size() == 6);
  CHECK(p5.exact.empty());
  double lhs = 0.0;
  for (int j = 0; j <= 5; ++j) lhs += p5.coeffs[j];
  CHECK(lhs == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("split: kappa vanishes at the horizon edge and recombines") {
  const auto inv = RadialProfile::inverse_s();

  const auto sk3 = split(inv, 3);
  CHECK(sk3.kappa(1.0) == 0.0);
  CHECK(sk3.kappa(1.5) == 0.0);
  CHECK_THROWS_AS((void)sk3.kappa(0.0), std::domain_error);

  // kappa(0.5) = 2 - p^6(0.5), with the exact-matching coefficients
  const double p_half = 35.0 / 16.0 - 35.0 / 16.0 * 0.25 + 21.0 / 16.0 * 0.0625 -
                        5.0 / 16.0 * 0.015625;
  CHECK(sk3.kappa(0.5) == doctest::Approx(2.0 - p_half).epsilon(1e-15));
  CHECK(sk3.kappa(0.5) == doctest::Approx(0.2822265625).epsilon(1e-15));

  // identity gamma = kappa + p on (0,1): 1e4 midpoint samples
  for (int K = 0; K <= 3; ++K) {
    const auto sk = split(inv, K);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double s = (i + 0.5) / 10000.0;
      const double resid = (sk.kappa(s) + sk.polynomial(s)) - 1.0 / s;
      worst = std::max(worst, std::abs(resid));
    }
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("kappa is C^K at the edge: one-sided derivatives vanish") {
  const auto inv = RadialProfile::inverse_s();
  for (int K = 0; K <= 3; ++K) {
    const auto sk = split(inv, K);
    const auto f = [&sk](double s) { return sk.kappa(s); };
    for (int m = 0; m <= K; ++m) {
      const double d = one_sided_derivative(f, m, 1e-4);
      CHECK(std::abs(d) <= 1e-6);
    }
  }
}

TEST_CASE("second moments match the analytic values") {
  CHECK(second_moment(RadialProfile::inverse_s()) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(second_moment(RadialProfile::conical()) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(second_moment(RadialProfile::truncated_polynomial(0)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  // regularized k: 1 - 2 sum_j c_j/(2j+3)
  const auto p1 = match_polynomial(RadialProfile::inverse_s(), 1);
  const double expect = 1.0 - 2.0 * (p1.coeffs[0] / 3.0 + p1.coeffs[1] / 5.0);
  CHECK(second_moment(RadialProfile::regularized(1)) ==
        doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("omega evaluation: scaling, support, heterogeneous horizon") {
  KernelSpec spec;
  spec.dim = 1;
  spec.profile = RadialProfile::inverse_s();
  spec.horizon = {HorizonKind::Constant, 1.0};
  CHECK(eval_omega(spec, {0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}) == 2.0);

  spec.horizon.delta0 = 0.25;
  CHECK(eval_omega(spec, {0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}) == 0.0);

  spec.horizon = {HorizonKind::GaussianBump, 1.0};
  CHECK(spec.horizon({0.5, 0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(spec.horizon({0.0, 0.0, 0.0}) > 1.0);
  CHECK(spec.horizon.max_radius() == 2.0);

  CHECK_THROWS_AS((void)eval_omega(spec, {0.5, 0.0, 0.0}, {0.5, 0.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("omega compact support over random pairs, all families") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const RadialProfile profiles[] = {
      RadialProfile::inverse_s(), RadialProfile::conical(),
      RadialProfile::regularized(2), RadialProfile::truncated_polynomial(3)};
  for (const auto& profile : profiles) {
    KernelSpec spec;
    spec.dim = 2;
    spec.profile = profile;
    spec.horizon = {HorizonKind::Constant, 0.3};
    for (int t = 0; t < 500; ++t) {
      const Point x{unit(rng), unit(rng), 0.0};
      const Point y{unit(rng), unit(rng), 0.0};
      const double r = std::hypot(y[0] - x[0], y[1] - x[1]);
      if (r >= 0.3) CHECK(eval_omega(spec, x, y) == 0.0);
    }
  }
}

TEST_CASE("divergence class: omega is symmetric for symmetric C and delta") {
  KernelSpec spec;
  spec.dim = 1;
  spec.profile = RadialProfile::inverse_s();
  spec.horizon = {HorizonKind::GaussianBump, 0.25};
  spec.symmetry = SymmetryClass::Divergence;
  spec.coefficient_fn = [](const Point& x, const Point& y) {
    return 1.0 + 0.5 * (x[0] + y[0]);
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const Point x{unit(rng), 0.0, 0.0};
    const Point y{unit(rng), 0.0, 0.0};
    if (x[0] == y[0]) continue;
    CHECK(eval_omega(spec, x, y) == eval_omega(spec, y, x));
  }
}

TEST_CASE("kernel spec round-trips through the key=value config") {
  KernelSpec spec;
  spec.dim = 2;
  spec.profile = RadialProfile::regularized(2);
  spec.horizon = {HorizonKind::GaussianBump, 0.125};
  const auto kv = kernel_spec_to_config(spec, 1);
  CHECK(kv.at("dimension") == "2");
  CHECK(kv.at("profile") == "regularized");
  CHECK(kv.at("regularity_k") == "2");
  CHECK(kv.at("horizon_kind") == "gaussian_bump");

  const KernelSpec back = kernel_spec_from_config(kv);
  CHECK(back.dim == 2);
  CHECK(back.profile.family == ProfileFamily::Regularized);
  CHECK(back.profile.order == 2);
  CHECK(back.horizon.kind == HorizonKind::GaussianBump);
  CHECK(back.horizon.delta0 == 0.125);
  CHECK(eval_profile(back.profile, 0.7) ==
        eval_profile(spec.profile, 0.7));
}
