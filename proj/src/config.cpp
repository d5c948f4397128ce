#include "nonloc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nonloc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_sweep(const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

RunConfig apply_config_file(RunConfig base, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dim" || key == "dimension") base.dim = std::stoi(value);
    else if (key == "n") base.n = std::stoi(value);
    else if (key == "delta0") base.delta0 = std::stod(value);
    else if (key == "horizon" || key == "horizon_kind") base.horizon = value;
    else if (key == "profile") base.profile = value;
    else if (key == "k" || key == "regularity_k") base.regularity_k = std::stoi(value);
    else if (key == "K" || key == "split_K") base.split_K = std::stoi(value);
    else if (key == "epsilon") base.epsilon = std::stod(value);
    else if (key == "tol") base.tol = std::stod(value);
    else if (key == "seed") base.seed = std::stoull(value);
    else if (key == "out") base.out = value;
    else if (key == "rhs") base.rhs = value;
    else if (key == "sweep") base.sweep = parse_sweep(value);
    else if (key == "max_iter") base.max_iter = std::stoll(value);
    else if (key == "coefficient") { /* constant 1 is the only CLI coefficient */ }
    else
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
  }
  return base;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_comment(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# config: command=" << cfg.command << " dim=" << cfg.dim
     << " n=" << cfg.n << " delta0=" << format_double(cfg.delta0)
     << " horizon=" << cfg.horizon << " profile=" << cfg.profile
     << " regularity_k=" << cfg.regularity_k << " split_K=" << cfg.split_K
     << " epsilon=" << format_double(cfg.epsilon)
     << " tol=" << format_double(cfg.tol) << " seed=" << cfg.seed;
  if (!cfg.rhs.empty()) os << " rhs=" << cfg.rhs;
  if (!cfg.sweep.empty()) {
    os << " sweep=";
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
      os << (i ? "," : "") << cfg.sweep[i];
  }
  return os.str();
}

HorizonField horizon_from_config(const RunConfig& cfg) {
  HorizonField h;
  h.delta0 = cfg.delta0;
  if (cfg.horizon == "constant")
    h.kind = HorizonKind::Constant;
  else if (cfg.horizon == "gaussian_bump" || cfg.horizon == "bump")
    h.kind = HorizonKind::GaussianBump;
  else
    throw std::invalid_argument("unknown horizon kind: " + cfg.horizon);
  return h;
}

KernelSpec spec_from_config(const RunConfig& cfg) {
  KernelSpec spec;
  spec.dim = cfg.dim;
  spec.horizon = horizon_from_config(cfg);
  if (cfg.profile == "inverse_s")
    spec.profile = RadialProfile::inverse_s();
  else if (cfg.profile == "conical")
    spec.profile = RadialProfile::conical();
  else if (cfg.profile == "regularized")
    spec.profile = RadialProfile::regularized(std::max(cfg.regularity_k, 0));
  else if (cfg.profile == "truncated")
    spec.profile = RadialProfile::truncated_polynomial(cfg.split_K);
  else
    throw std::invalid_argument("unknown profile: " + cfg.profile);
  return spec;
}

KernelSpec truncated_spec_from_config(const RunConfig& cfg) {
  KernelSpec spec;
  spec.dim = cfg.dim;
  spec.horizon = horizon_from_config(cfg);
  spec.profile = RadialProfile::truncated_polynomial(cfg.split_K);
  return spec;
}

}  // namespace nonloc
