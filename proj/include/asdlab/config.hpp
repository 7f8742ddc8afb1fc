#ifndef ASDLAB_CONFIG_HPP
#define ASDLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "asdlab/grid.hpp"

namespace asdlab {

// Plain key=value run configuration.  Unknown keys are rejected; numeric
// ranges are validated; the resolved map is echoed into every report.
struct RunConfig {
  GridSpec grid;
  double green_a = 2.0;
  int green_kmax = 48;
  double perturb_tol = 1e-9;
  int perturb_max_iter = 60;
  double cutoff_T = 2.0;
  double cutoff_delta1 = 0.0;  // 0 = "auto" (from the budget, clamped to the grid)
  bool cutoff_delta1_auto = true;
  double meandim_eps = 0.3;
  int meandim_windows = 5;
  std::uint64_t seed = 1;

  std::map<std::string, std::string> resolved() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace asdlab

#endif
