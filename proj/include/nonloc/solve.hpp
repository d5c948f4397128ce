#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nonloc/kernel.hpp"

namespace nonloc {

enum class SolveMethod { CG, CGNR };

struct SolveReport {
  SolveMethod method = SolveMethod::CG;
  std::int64_t iterations = 0;
  double final_residual = 0.0;  // relative 2-norm ||f - A u|| / ||f||
  bool converged = false;
  std::vector<double> solution;
};

using ApplyFn = std::function<std::vector<double>(std::span<const double>)>;

// Matrix-free Krylov solve of A u = f where A is the negated nonlocal
// operator -L^P. CG assumes symmetry (constant horizon, symmetric
// coefficient); CGNR runs CG on the normal equations and needs the
// transpose application.
SolveReport solve_dirichlet(const ApplyFn& apply, std::span<const double> f,
                            double tol, std::int64_t max_iter,
                            SolveMethod method = SolveMethod::CG,
                            const ApplyFn& apply_transpose = {});

// Picks CG when the configuration yields a symmetric matrix.
SolveMethod choose_method(const KernelSpec& spec);

// Partial-pivot LU solve of the row-major n x n system (oracle path).
std::vector<double> dense_direct_solve(std::span<const double> a_rowmajor,
                                       std::span<const double> rhs);

}  // namespace nonloc
