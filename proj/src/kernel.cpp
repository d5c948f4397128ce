#include "nonloc/kernel.hpp"

#include <boost/rational.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace nonloc {

namespace {

using Rat = boost::rational<long long>;

long long falling_factorial(long long n, long long m) {
  long long r = 1;
  for (long long i = 0; i < m; ++i) r *= (n - i);
  return r;
}

long long factorial(long long m) { return falling_factorial(m, m); }

// Exact solve of the (K+1)x(K+1) matching system for gamma(s) = 1/s:
//   sum_j ff(2j, m) c_j = (-1)^m m!,  m = 0..K.
std::vector<Rat> solve_matching_exact(int K) {
  const int n = K + 1;
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
  std::vector<Rat> b(n);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j)
      a[m][j] = Rat(2 * j >= m ? falling_factorial(2 * j, m) : 0);
    b[m] = Rat((m % 2 == 0 ? 1 : -1) * factorial(m));
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a[piv][col] == Rat(0)) ++piv;
    if (piv == n) throw std::runtime_error("singular matching system");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Rat(0)) continue;
      const Rat f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rat> out(n);
  for (int r = 0; r < n; ++r) out[r] = b[r] / a[r][r];
  return out;
}

std::vector<double> solve_matching_double(int K, double c) {
  const int n = K + 1;
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j)
      a(m, j) = 2 * j >= m
                    ? static_cast<double>(falling_factorial(2 * j, m))
                    : 0.0;
    b(m) = c * (m % 2 == 0 ? 1.0 : -1.0) *
           static_cast<double>(factorial(m));
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error("singular matching system");
  Eigen::VectorXd x = lu.solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

// Divide poly by (1 - s); requires a root at s = 1.
template <typename T>
std::vector<T> divide_one_minus_s(const std::vector<T>& poly) {
  std::vector<T> q(poly.size() - 1);
  q[0] = poly[0];
  for (std::size_t i = 1; i < q.size(); ++i) q[i] = poly[i] + q[i - 1];
  return q;
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-3);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, rel_tol * scale, 40);
}

}  // namespace

double MatchedPolynomial::operator()(double s) const {
  const double t = s * s;
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * t + *it;
  return acc;
}

double SplitKernel::kappa(double s) const {
  s = std::abs(s);
  if (s == 0.0)
    throw std::domain_error("kappa is singular at s = 0");
  if (s >= 1.0) return 0.0;
  if (s < 0.5) return scale / s - polynomial(s);
  const double u = 1.0 - s;
  double f = 1.0;
  for (int i = 0; i <= polynomial.order; ++i) f *= u;
  double acc = 0.0;
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) acc = acc * s + *it;
  return f * acc / s;
}

RadialProfile RadialProfile::inverse_s(double c) {
  RadialProfile p;
  p.family = ProfileFamily::InverseS;
  p.c = c;
  return p;
}

RadialProfile RadialProfile::conical(double c) {
  RadialProfile p;
  p.family = ProfileFamily::ConicalInverseS;
  p.c = c;
  return p;
}

RadialProfile RadialProfile::regularized(int k, double c) {
  RadialProfile p;
  p.family = ProfileFamily::Regularized;
  p.c = c;
  p.order = k;
  p.split_data = std::make_shared<SplitKernel>(split(inverse_s(c), k));
  return p;
}

RadialProfile RadialProfile::truncated_polynomial(int K, double c) {
  RadialProfile p;
  p.family = ProfileFamily::PolynomialTruncated;
  p.c = c;
  p.order = K;
  p.poly = std::make_shared<MatchedPolynomial>(match_polynomial(inverse_s(c), K));
  return p;
}

bool RadialProfile::singular_at_origin() const {
  return family != ProfileFamily::PolynomialTruncated;
}

double eval_profile(const RadialProfile& profile, double s) {
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  switch (profile.family) {
    case ProfileFamily::InverseS:
      if (s == 0.0)
        throw std::domain_error("profile is singular at s = 0");
      return profile.c / s;
    case ProfileFamily::ConicalInverseS:
      if (s == 0.0)
        throw std::domain_error("profile is singular at s = 0");
      return profile.c / s * (1.0 - s);
    case ProfileFamily::Regularized:
      return profile.split_data->kappa(s);
    case ProfileFamily::PolynomialTruncated:
      return (*profile.poly)(s);
  }
  return 0.0;
}

MatchedPolynomial match_polynomial(const RadialProfile& profile, int K) {
  if (profile.family != ProfileFamily::InverseS)
    throw std::invalid_argument(
        "match_polynomial requires the InverseS profile");
  if (K < 0) throw std::invalid_argument("matching order must be >= 0");

  MatchedPolynomial p;
  p.order = K;
  if (K <= 4) {
    const auto exact = solve_matching_exact(K);
    p.coeffs.reserve(exact.size());
    for (const auto& r : exact)
      p.coeffs.push_back(profile.c * static_cast<double>(r.numerator()) /
                         static_cast<double>(r.denominator()));
    if (profile.c == 1.0) {
      p.exact.reserve(exact.size());
      for (const auto& r : exact)
        p.exact.push_back({r.numerator(), r.denominator()});
    }
  } else {
    p.coeffs = solve_matching_double(K, profile.c);
  }
  return p;
}

SplitKernel split(const RadialProfile& profile, int K) {
  SplitKernel sk;
  sk.scale = profile.c;
  sk.polynomial = match_polynomial(profile, K);

  if (K <= 4) {
    // numerator of gamma - p over the common denominator s, for c = 1:
    // n(s) = 1 - s p1(s), with p1 the unit-coefficient solution
    const auto p1 = solve_matching_exact(K);
    std::vector<Rat> num(2 * K + 2, Rat(0));
    num[0] = Rat(1);
    for (int j = 0; j <= K; ++j) num[2 * j + 1] -= p1[j];
    for (int i = 0; i <= K; ++i) {
      // exact divisibility: the trailing relation must close to zero
      auto q = divide_one_minus_s(num);
      if (num.back() + q.back() != Rat(0))
        throw std::runtime_error("split: kappa does not vanish to order K");
      num = std::move(q);
    }
    sk.tail.reserve(num.size());
    for (const auto& r : num)
      sk.tail.push_back(profile.c * static_cast<double>(r.numerator()) /
                        static_cast<double>(r.denominator()));
  } else {
    std::vector<double> num(2 * K + 2, 0.0);
    num[0] = profile.c;
    for (int j = 0; j <= K; ++j) num[2 * j + 1] -= sk.polynomial.coeffs[j];
    for (int i = 0; i <= K; ++i) {
      auto q = divide_one_minus_s(num);
      if (std::abs(num.back() + q.back()) > 1e-9 * std::abs(profile.c))
        throw std::runtime_error("split: kappa does not vanish to order K");
      num = std::move(q);
    }
    sk.tail = std::move(num);
  }
  return sk;
}

double second_moment(const RadialProfile& profile) {
  const auto f = [&profile](double s) {
    if (s <= 0.0) return 0.0;
    return s * s * eval_profile(profile, s);
  };
  return 2.0 * integrate(f, 0.0, 1.0, 1e-11);
}

double HorizonField::operator()(const Point& x) const {
  if (kind == HorizonKind::Constant) return delta0;
  const double d = x[0] - 0.5;
  return delta0 * (1.0 + std::exp(-20.0 * d * d));
}

double HorizonField::max_radius() const {
  return kind == HorizonKind::Constant ? delta0 : 2.0 * delta0;
}

double KernelSpec::coefficient(const Point& x, const Point& y) const {
  return coefficient_fn ? coefficient_fn(x, y) : coefficient_value;
}

double KernelSpec::horizon_at(const Point& x, const Point& y) const {
  if (symmetry == SymmetryClass::Divergence)
    return 0.5 * (horizon(x) + horizon(y));
  return horizon(x);
}

double eval_omega(const KernelSpec& spec, const Point& x, const Point& y) {
  double r2 = 0.0;
  for (int j = 0; j < spec.dim; ++j) {
    const double d = y[j] - x[j];
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  const double delta = spec.horizon_at(x, y);
  if (r >= delta) return 0.0;
  double dpow = delta * delta;  // delta^{d+2}
  for (int j = 0; j < spec.dim; ++j) dpow *= delta;
  return spec.coefficient(x, y) / dpow * eval_profile(spec.profile, r / delta);
}

namespace {

std::string profile_name(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::InverseS: return "inverse_s";
    case ProfileFamily::ConicalInverseS: return "conical";
    case ProfileFamily::Regularized: return "regularized";
    case ProfileFamily::PolynomialTruncated: return "truncated";
  }
  return "inverse_s";
}

}  // namespace

std::map<std::string, std::string> kernel_spec_to_config(
    const KernelSpec& spec, int split_K) {
  std::map<std::string, std::string> kv;
  kv["dimension"] = std::to_string(spec.dim);
  kv["profile"] = profile_name(spec.profile.family);
  kv["regularity_k"] = std::to_string(
      spec.profile.family == ProfileFamily::Regularized ? spec.profile.order
                                                        : -1);
  kv["split_K"] = std::to_string(
      spec.profile.family == ProfileFamily::PolynomialTruncated
          ? spec.profile.order
          : split_K);
  kv["horizon_kind"] = spec.horizon.kind == HorizonKind::Constant
                           ? "constant"
                           : "gaussian_bump";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", spec.horizon.delta0);
  kv["delta0"] = buf;
  std::snprintf(buf, sizeof(buf), "%.17g", spec.coefficient_value);
  kv["coefficient"] = buf;
  return kv;
}

KernelSpec kernel_spec_from_config(
    const std::map<std::string, std::string>& kv) {
  const auto get = [&kv](const std::string& key,
                         const std::string& fallback) -> std::string {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  KernelSpec spec;
  spec.dim = std::stoi(get("dimension", "1"));
  spec.horizon.delta0 = std::stod(get("delta0", "0.25"));
  const std::string hk = get("horizon_kind", "constant");
  if (hk == "constant")
    spec.horizon.kind = HorizonKind::Constant;
  else if (hk == "gaussian_bump")
    spec.horizon.kind = HorizonKind::GaussianBump;
  else
    throw std::invalid_argument("unknown horizon_kind: " + hk);
  spec.coefficient_value = std::stod(get("coefficient", "1"));
  const double c = 1.0;  // profile normalization; CLI keeps c = 1
  const std::string name = get("profile", "inverse_s");
  const int k = std::stoi(get("regularity_k", "-1"));
  const int K = std::stoi(get("split_K", "0"));
  if (name == "inverse_s")
    spec.profile = RadialProfile::inverse_s(c);
  else if (name == "conical")
    spec.profile = RadialProfile::conical(c);
  else if (name == "regularized")
    spec.profile = RadialProfile::regularized(std::max(k, 0), c);
  else if (name == "truncated")
    spec.profile = RadialProfile::truncated_polynomial(K, c);
  else
    throw std::invalid_argument("unknown profile: " + name);
  return spec;
}

}  // namespace nonloc
