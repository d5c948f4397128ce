#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nonloc/bench.hpp"
#include "nonloc/config.hpp"
#include "nonloc/hodlr.hpp"
#include "nonloc/operators.hpp"
#include "nonloc/solve.hpp"

namespace {

using namespace nonloc;

constexpr int kExitUsage = 1;
constexpr int kExitConformance = 2;

class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double v) { return format_double(v); }

int cmd_split(const RunConfig& cfg) {
  const RadialProfile profile = RadialProfile::inverse_s();
  const MatchedPolynomial p = match_polynomial(profile, cfg.split_K);
  const SplitKernel sk = split(profile, cfg.split_K);

  std::cerr << "p^{2K} coefficients (K = " << cfg.split_K << "):\n";
  for (int j = 0; j < static_cast<int>(p.coeffs.size()); ++j) {
    std::cerr << "  s^" << 2 * j << ": ";
    if (j < static_cast<int>(p.exact.size())) {
      std::cerr << p.exact[j].num;
      if (p.exact[j].den != 1) std::cerr << "/" << p.exact[j].den;
      std::cerr << " = ";
    }
    std::cerr << fmt(p.coeffs[j]) << "\n";
  }

  CsvOut out(cfg.out);
  out.stream() << config_comment(cfg) << "\n";
  out.stream() << "s,gamma,p,kappa\n";
  for (int j = 0; j <= 100; ++j) {
    const double s = j / 100.0;
    out.stream() << fmt(s) << ",";
    if (s == 0.0)
      out.stream() << "inf," << fmt(p(s)) << ",inf\n";
    else
      out.stream() << fmt(s < 1.0 ? 1.0 / s : 0.0) << "," << fmt(p(s)) << ","
                   << fmt(sk.kappa(s)) << "\n";
  }
  return 0;
}

int cmd_apply(const RunConfig& cfg) {
  const Grid grid = Grid::make(cfg.dim, cfg.n);
  const KernelSpec spec = truncated_spec_from_config(cfg);
  const BenchRecord rec = run_apply_case(spec, grid, cfg.seed, 1);

  CsvOut out(cfg.out);
  out.stream() << config_comment(cfg) << "\n";
  out.stream() << "N,recur_calls,step2_ops,step3_ops,dense_pairs,"
                  "max_rel_err_vs_dense\n";
  out.stream() << rec.N << "," << rec.recur_calls << "," << rec.step2_ops
               << "," << rec.step3_ops << "," << rec.dense_pairs << ","
               << fmt(rec.max_rel_err_vs_dense) << "\n";
  std::cerr << "fast " << rec.fast_wall_ns << " ns, dense "
            << rec.dense_wall_ns << " ns, max rel err "
            << fmt(rec.max_rel_err_vs_dense) << "\n";
  if (rec.max_rel_err_vs_dense > 1e-10) {
    std::cerr << "conformance failure: fast and dense disagree\n";
    return kExitConformance;
  }
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.sweep.size() < 4)
    throw CLI::ValidationError("bench", "--sweep needs at least 4 sizes");
  std::vector<BenchRecord> recs;
  for (int n : cfg.sweep) {
    const Grid grid = Grid::make(cfg.dim, n);
    const KernelSpec spec = truncated_spec_from_config(cfg);
    recs.push_back(run_apply_case(spec, grid, cfg.seed, 1));
  }

  CsvOut out(cfg.out);
  out.stream() << config_comment(cfg) << "\n";
  out.stream() << "N,recur_calls,step2_ops,step3_ops,dense_pairs,"
                  "fast_wall_ns,dense_wall_ns,max_rel_err_vs_dense\n";
  std::vector<double> N, recur, ops23, pairs, fastw, densew;
  for (const auto& r : recs) {
    out.stream() << r.N << "," << r.recur_calls << "," << r.step2_ops << ","
                 << r.step3_ops << "," << r.dense_pairs << ","
                 << r.fast_wall_ns << "," << r.dense_wall_ns << ","
                 << fmt(r.max_rel_err_vs_dense) << "\n";
    N.push_back(static_cast<double>(r.N));
    recur.push_back(static_cast<double>(r.recur_calls));
    ops23.push_back(static_cast<double>(r.step2_ops + r.step3_ops));
    pairs.push_back(static_cast<double>(r.dense_pairs));
    fastw.push_back(static_cast<double>(r.fast_wall_ns));
    densew.push_back(static_cast<double>(r.dense_wall_ns));
  }
  out.stream() << "# slope_recur_calls=" << fmt(fit_loglog_slope(N, recur))
               << "\n";
  out.stream() << "# slope_step23_ops=" << fmt(fit_loglog_slope(N, ops23))
               << "\n";
  out.stream() << "# slope_dense_pairs=" << fmt(fit_loglog_slope(N, pairs))
               << "\n";
  out.stream() << "# slope_fast_wall_ns=" << fmt(fit_loglog_slope(N, fastw))
               << "\n";
  out.stream() << "# slope_dense_wall_ns=" << fmt(fit_loglog_slope(N, densew))
               << "\n";
  for (const auto& r : recs)
    if (r.max_rel_err_vs_dense > 1e-10) {
      std::cerr << "conformance failure: fast and dense disagree\n";
      return kExitConformance;
    }
  return 0;
}

int cmd_rank_profile(const RunConfig& cfg) {
  const int regs[] = {-1, 0, 1, 2, 3};
  const auto rows =
      rank_profile(regs, cfg.dim, cfg.n, cfg.delta0, cfg.epsilon);
  CsvOut out(cfg.out);
  out.stream() << config_comment(cfg) << "\n";
  out.stream() << "regularity_k,N,delta,epsilon,stored_floats,dense_floats,"
                  "ratio,max_rank\n";
  for (const auto& r : rows)
    out.stream() << r.regularity_k << "," << r.n << "," << fmt(r.delta) << ","
                 << fmt(r.epsilon) << "," << r.stored_floats << ","
                 << r.dense_floats << "," << fmt(r.ratio) << "," << r.max_rank
                 << "\n";
  return 0;
}

std::vector<double> manufactured_star(const Grid& grid) {
  std::vector<double> u(grid.total, 1.0);
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    for (int j = 0; j < grid.dim; ++j)
      u[i] *= std::sin(2.0 * std::numbers::pi * x[j]) * x[j] * (1.0 - x[j]);
  }
  return u;
}

int cmd_solve(const RunConfig& cfg) {
  const Grid grid = Grid::make(cfg.dim, cfg.n);
  const KernelSpec spec = truncated_spec_from_config(cfg);
  const std::int64_t max_iter =
      cfg.max_iter > 0 ? cfg.max_iter : 10 * grid.total;

  std::vector<double> ustar;
  std::vector<double> f;
  if (cfg.rhs == "manufactured") {
    ustar = manufactured_star(grid);
    f = apply_truncated_dense(spec, grid, InclusionRule::Leaf, ustar);
    for (double& v : f) v = -v;
  } else if (cfg.rhs == "constant") {
    f.assign(grid.total, 1.0);
  } else if (cfg.rhs.rfind("file:", 0) == 0) {
    std::ifstream in(cfg.rhs.substr(5));
    if (!in)
      throw std::invalid_argument("cannot open rhs file: " + cfg.rhs.substr(5));
    double v;
    while (in >> v) f.push_back(v);
    if (std::ssize(f) != grid.total)
      throw std::invalid_argument("rhs file length does not match N");
  } else {
    throw CLI::ValidationError("solve", "unknown --rhs: " + cfg.rhs);
  }

  const SolveMethod method = choose_method(spec);
  SolveReport report;
  if (method == SolveMethod::CG) {
    TruncatedOperator op(spec, grid);
    const auto apply = [&](std::span<const double> u) {
      auto out = op.apply(u);
      for (double& v : out) v = -v;
      return out;
    };
    report = solve_dirichlet(apply, f, cfg.tol, max_iter, SolveMethod::CG);
  } else {
    auto a =
        assemble_dense_matrix(spec, grid, InclusionRule::Leaf, ApplyForm::Mass);
    for (double& v : a) v = -v;
    const auto apply = [&](std::span<const double> u) {
      std::vector<double> out(grid.total, 0.0);
      for (std::int64_t i = 0; i < grid.total; ++i) {
        double acc = 0.0;
        for (std::int64_t j = 0; j < grid.total; ++j)
          acc += a[i * grid.total + j] * u[j];
        out[i] = acc;
      }
      return out;
    };
    const auto apply_t = [&](std::span<const double> u) {
      std::vector<double> out(grid.total, 0.0);
      for (std::int64_t i = 0; i < grid.total; ++i)
        for (std::int64_t j = 0; j < grid.total; ++j)
          out[j] += a[i * grid.total + j] * u[i];
      return out;
    };
    report =
        solve_dirichlet(apply, f, cfg.tol, max_iter, SolveMethod::CGNR, apply_t);
  }

  double manufactured_err = -1.0;
  if (!ustar.empty()) {
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < grid.total; ++i) {
      num = std::max(num, std::abs(report.solution[i] - ustar[i]));
      den = std::max(den, std::abs(ustar[i]));
    }
    manufactured_err = num / den;
  }

  CsvOut out(cfg.out);
  out.stream() << config_comment(cfg) << "\n";
  out.stream() << "method,N,iterations,final_residual,converged,"
                  "manufactured_rel_err\n";
  out.stream() << (method == SolveMethod::CG ? "CG" : "CGNR") << ","
               << grid.total << "," << report.iterations << ","
               << fmt(report.final_residual) << ","
               << (report.converged ? 1 : 0) << ","
               << (manufactured_err >= 0.0 ? fmt(manufactured_err) : "")
               << "\n";
  out.stream() << "# solution\n";
  out.stream() << "index,x,u\n";
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    out.stream() << i << ",";
    for (int j = 0; j < grid.dim; ++j)
      out.stream() << (j ? ";" : "") << fmt(x[j]);
    out.stream() << "," << fmt(report.solution[i]) << "\n";
  }
  std::cerr << (method == SolveMethod::CG ? "CG" : "CGNR") << " iterations "
            << report.iterations << ", residual "
            << fmt(report.final_residual) << "\n";
  if (!report.converged) {
    std::cerr << "solver did not reach tol within max_iter\n";
    return kExitConformance;
  }
  return 0;
}

// The config file provides defaults; explicit flags override them.
std::string config_path_from_argv(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  const std::string config_path = config_path_from_argv(argc, argv);
  if (!config_path.empty()) {
    try {
      cfg = apply_config_file(cfg, config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  CLI::App app{"Nonlocal-operator fast summation benchmark"};
  app.require_subcommand(1);
  std::string config_opt;
  app.add_option("--config", config_opt, "key=value config file");

  const auto add_common = [&cfg, &config_opt](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "spatial dimension (1-3)");
    sub->add_option("--n", cfg.n, "nodes per axis (power of two)");
    sub->add_option("--delta0", cfg.delta0, "horizon parameter");
    sub->add_option("--horizon", cfg.horizon, "constant | gaussian_bump");
    sub->add_option("--profile", cfg.profile,
                    "inverse_s | conical | regularized | truncated");
    sub->add_option("--k", cfg.regularity_k, "kernel regularity class");
    sub->add_option("--K", cfg.split_K, "polynomial matching order");
    sub->add_option("--epsilon", cfg.epsilon, "compression precision");
    sub->add_option("--tol", cfg.tol, "solver tolerance");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output CSV path (default stdout)");
    sub->add_option("--config", config_opt, "key=value config file")
        ->group("");  // consumed in the pre-scan; hidden here
  };

  CLI::App* split_cmd = app.add_subcommand("split", "kernel splitting report");
  add_common(split_cmd);
  CLI::App* apply_cmd =
      app.add_subcommand("apply", "fast apply with oracle comparison");
  add_common(apply_cmd);
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "N-sweep with fitted scaling rates");
  add_common(bench_cmd);
  std::string sweep_opt;
  bench_cmd->add_option("--sweep", sweep_opt, "comma-separated n values");
  CLI::App* rank_cmd =
      app.add_subcommand("rank-profile", "compression vs kernel regularity");
  add_common(rank_cmd);
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "volume-constrained Dirichlet solve");
  add_common(solve_cmd);
  solve_cmd->add_option("--rhs", cfg.rhs,
                        "manufactured | constant | file:<path>");
  solve_cmd->add_option("--max-iter", cfg.max_iter, "iteration cap (0 = 10N)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!sweep_opt.empty()) {
    cfg.sweep.clear();
    std::stringstream ss(sweep_opt);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.sweep.push_back(std::stoi(item));
  }

  try {
    if (split_cmd->parsed()) {
      cfg.command = "split";
      return cmd_split(cfg);
    }
    if (apply_cmd->parsed()) {
      cfg.command = "apply";
      return cmd_apply(cfg);
    }
    if (bench_cmd->parsed()) {
      cfg.command = "bench";
      return cmd_bench(cfg);
    }
    if (rank_cmd->parsed()) {
      cfg.command = "rank-profile";
      return cmd_rank_profile(cfg);
    }
    if (solve_cmd->parsed()) {
      cfg.command = "solve";
      return cmd_solve(cfg);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConformance;
  }
  return kExitUsage;
}
