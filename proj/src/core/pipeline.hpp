#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planner.hpp"
#include "scene.hpp"

namespace hpm {

// One capability block from the job config. Exactly one geometry source is
// used: a raw-stock box, an imported solid file, or an MMN-driven variant.
struct CapabilityConfig {
  std::string name;
  double rate = 1.0;
  bool raw_stock = false;
  std::array<double, 3> box_min{}, box_max{};  // raw stock
  std::string solid_file;                      // hand-made primitive import
  std::optional<Mode> import_mode;
  std::optional<Variant> variant;
  ScenePtr mmn_scene;
  std::string mmn_file;
  ScenePtr assembly_scene;
  std::string assembly_file;
  int orientation = 0;
  double lambda = 0.0;
};

struct JobConfig {
  GridSpec workspace;
  ScenePtr target_scene;
  std::string target_file;
  std::vector<CapabilityConfig> capabilities;
  double tolerance_mm = 0.0;
  CorrelateMethod method = CorrelateMethod::Fft;
  int k_best = 1;
  int max_depth = 8;
  int enrichment_budget = 0;
  std::uint64_t seed = 0;
};

JobConfig parse_job_config(const std::string& json_text);
JobConfig load_job_config(const std::string& path);

struct StageFlags {
  bool no_timestamp = false;
  std::optional<CorrelateMethod> method;
  std::optional<int> k_best;
  std::optional<double> tolerance_mm;
};

// Runs one pipeline stage against a job directory; artifacts are written
// deterministically. Returns the process exit status (check: nonzero when not
// manufacturable; verify: nonzero on symbolic/geometric mismatch).
int run_stage(const std::string& stage, const JobConfig& config,
              const std::string& job_dir, const StageFlags& flags,
              std::string* log);

}  // namespace hpm
