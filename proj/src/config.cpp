#include "asdlab/config.hpp"

#include <fstream>
#include <sstream>

#include "asdlab/util.hpp"

namespace asdlab {

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto as_double = [&](double lo, double hi) {
    double v = std::stod(value);
    if (v < lo || v > hi) throw invalid_argument_error("config: " + key + " out of range");
    return v;
  };
  auto as_int = [&](int lo, int hi) {
    int v = std::stoi(value);
    if (v < lo || v > hi) throw invalid_argument_error("config: " + key + " out of range");
    return v;
  };
  if (key == "grid.r")
    cfg.grid.r = as_double(1e-3, 1e3);
  else if (key == "grid.n_eta")
    cfg.grid.n_eta = as_int(2, 256);
  else if (key == "grid.n_xi1")
    cfg.grid.n_xi1 = as_int(2, 256);
  else if (key == "grid.n_xi2")
    cfg.grid.n_xi2 = as_int(2, 256);
  else if (key == "grid.L")
    cfg.grid.L = as_double(1e-3, 1e3);
  else if (key == "grid.n_t")
    cfg.grid.n_t = as_int(2, 4096);
  else if (key == "grid.mode") {
    if (value == "truncated")
      cfg.grid.mode = TimeMode::truncated;
    else if (value == "periodic")
      cfg.grid.mode = TimeMode::periodic;
    else
      throw invalid_argument_error("config: grid.mode must be truncated or periodic");
  } else if (key == "green.a")
    cfg.green_a = as_double(1e-9, 1e6);
  else if (key == "green.kmax")
    cfg.green_kmax = as_int(8, 512);
  else if (key == "perturb.tol")
    cfg.perturb_tol = as_double(1e-15, 1.0);
  else if (key == "perturb.max_iter")
    cfg.perturb_max_iter = as_int(1, 10000);
  else if (key == "cutoff.T")
    cfg.cutoff_T = as_double(0.0, 1e3);
  else if (key == "cutoff.delta1") {
    if (value == "auto") {
      cfg.cutoff_delta1_auto = true;
      cfg.cutoff_delta1 = 0.0;
    } else {
      cfg.cutoff_delta1_auto = false;
      cfg.cutoff_delta1 = as_double(1e-9, 1.0);
    }
  } else if (key == "meandim.eps")
    cfg.meandim_eps = as_double(1e-9, 10.0);
  else if (key == "meandim.windows")
    cfg.meandim_windows = as_int(1, 64);
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else
    throw invalid_argument_error("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_argument_error("config: line " + std::to_string(lineno) + " is not key=value");
    auto strip = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_override(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> m;
  auto num = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  m["grid.r"] = num(grid.r);
  m["grid.n_eta"] = std::to_string(grid.n_eta);
  m["grid.n_xi1"] = std::to_string(grid.n_xi1);
  m["grid.n_xi2"] = std::to_string(grid.n_xi2);
  m["grid.L"] = num(grid.L);
  m["grid.n_t"] = std::to_string(grid.n_t);
  m["grid.mode"] = to_string(grid.mode);
  m["green.a"] = num(green_a);
  m["green.kmax"] = std::to_string(green_kmax);
  m["perturb.tol"] = num(perturb_tol);
  m["perturb.max_iter"] = std::to_string(perturb_max_iter);
  m["cutoff.T"] = num(cutoff_T);
  m["cutoff.delta1"] = cutoff_delta1_auto ? std::string("auto") : num(cutoff_delta1);
  m["meandim.eps"] = num(meandim_eps);
  m["meandim.windows"] = std::to_string(meandim_windows);
  m["seed"] = std::to_string(seed);
  return m;
}

}  // namespace asdlab
