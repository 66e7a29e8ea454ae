// hpm command-line front end. Each subcommand runs one pipeline stage against
// a job directory; all geometry work happens behind the shared-library C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpm.h"

int main(int argc, char** argv) {
  CLI::App app{"hybrid additive/subtractive process planning"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags after the subcommand name

  std::string config;
  std::string job_dir = ".";
  int k_best = -1;
  double tolerance_mm = -1.0;
  std::string method;
  bool no_timestamp = false;

  app.add_option("--config", config, "job configuration JSON")->required();
  app.add_option("--job-dir", job_dir, "artifact directory (default: cwd)");
  app.add_option("--k-best", k_best, "number of plans to search for");
  app.add_option("--tolerance-mm", tolerance_mm, "surface tolerance override");
  app.add_option("--method", method, "correlation backend")
      ->check(CLI::IsMember({"direct", "fft"}));
  app.add_flag("--no-timestamp", no_timestamp,
               "omit timestamps from artifacts (reproducible output)");

  const std::vector<std::string> stages = {
      "voxelize", "primitive", "decompose", "check", "plan", "verify", "report"};
  const std::vector<std::string> blurbs = {
      "rasterize the target onto the workspace grid",
      "build manufacturing primitives from the capability specs",
      "compute the canonical atomic decomposition",
      "classify atoms against the target and run the early feasibility test",
      "search for the k cheapest valid process plans",
      "re-evaluate planned expressions with voxel Booleans",
      "collate stage artifacts into a report"};
  for (std::size_t i = 0; i < stages.size(); ++i)
    app.add_subcommand(stages[i], blurbs[i]);

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  int method_id = -1;
  if (method == "direct") method_id = HPM_METHOD_DIRECT;
  if (method == "fft") method_id = HPM_METHOD_FFT;

  int exit_code = 0;
  char* log = nullptr;
  hpm_status st =
      hpm_run_stage(stage.c_str(), config.c_str(), job_dir.c_str(),
                    no_timestamp ? 1 : 0, method_id, k_best, tolerance_mm,
                    &exit_code, &log);
  if (st != HPM_OK) {
    std::fprintf(stderr, "error: %s\n", hpm_last_error());
    return 1;
  }
  if (log) {
    std::fputs(log, stdout);
    hpm_string_free(log);
  }
  return exit_code;
}
