#include "nonloc/solve.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace nonloc {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::runtime_error("operator produced a non-finite value");
}

}  // namespace

SolveReport solve_dirichlet(const ApplyFn& apply, std::span<const double> f,
                            double tol, std::int64_t max_iter,
                            SolveMethod method,
                            const ApplyFn& apply_transpose) {
  const std::size_t n = f.size();
  SolveReport report;
  report.method = method;
  report.solution.assign(n, 0.0);

  const double fnorm = norm2(f);
  if (fnorm == 0.0) {
    report.converged = true;
    return report;
  }
  if (method == SolveMethod::CGNR && !apply_transpose)
    throw std::invalid_argument("CGNR needs the transpose application");

  std::vector<double>& u = report.solution;
  std::vector<double> r(f.begin(), f.end());  // f - A*0

  if (method == SolveMethod::CG) {
    std::vector<double> p = r;
    double rr = dot(r, r);
    for (std::int64_t it = 0; it < max_iter; ++it) {
      if (std::sqrt(rr) / fnorm <= tol) break;
      const std::vector<double> ap = apply(p);
      check_finite(ap);
      const double pap = dot(p, ap);
      if (pap == 0.0) break;
      const double alpha = rr / pap;
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      const double rr_next = dot(r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      report.iterations = it + 1;
    }
  } else {
    // CG on A^T A u = A^T f; r tracks the unnormalized residual f - A u.
    std::vector<double> z = apply_transpose(r);
    std::vector<double> p = z;
    double zz = dot(z, z);
    for (std::int64_t it = 0; it < max_iter; ++it) {
      if (norm2(r) / fnorm <= tol) break;
      const std::vector<double> ap = apply(p);
      check_finite(ap);
      const double denom = dot(ap, ap);
      if (denom == 0.0) break;
      const double alpha = zz / denom;
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      z = apply_transpose(r);
      check_finite(z);
      const double zz_next = dot(z, z);
      const double beta = zz_next / zz;
      zz = zz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      report.iterations = it + 1;
    }
  }

  // Recompute the true residual rather than trusting the recurrence.
  const std::vector<double> au = apply(u);
  double rn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = f[i] - au[i];
    rn += d * d;
  }
  report.final_residual = std::sqrt(rn) / fnorm;
  report.converged = report.final_residual <= tol;
  return report;
}

SolveMethod choose_method(const KernelSpec& spec) {
  const bool symmetric = spec.horizon.kind == HorizonKind::Constant &&
                         !spec.coefficient_fn;
  return symmetric ? SolveMethod::CG : SolveMethod::CGNR;
}

std::vector<double> dense_direct_solve(std::span<const double> a_rowmajor,
                                       std::span<const double> rhs) {
  const auto n = static_cast<Eigen::Index>(rhs.size());
  if (std::ssize(a_rowmajor) != n * n)
    throw std::invalid_argument("dense_direct_solve: shape mismatch");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      a(a_rowmajor.data(), n, n);
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace nonloc
