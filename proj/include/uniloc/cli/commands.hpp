#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uniloc/cli/config.hpp"
#include "uniloc/cli/pipeline.hpp"

namespace uniloc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitSolverFailures = 4,  // refinement finished but some objects failed
};

// Each command also writes the resolved configuration to <out>/config.txt.
void cmd_generate(const RunConfig& cfg, const std::string& out_dir);

// Writes <out>/labels.txt and <out>/report.txt.
RefineOutput cmd_refine(const std::string& scene_dir, SensorSelection sensors, const RunConfig& cfg,
                        const std::string& out_dir);

// gt_files[i] and det_files[i] form frame i. Writes <out>/metrics.txt and
// <out>/metrics.csv when out_dir is non-empty.
std::vector<MetricRow> cmd_eval(const std::vector<std::string>& gt_files, const std::vector<std::string>& det_files,
                                const RunConfig& cfg, const std::string& out_dir);

// One in-memory generate/refine/eval run per (value, seed); returns the CSV
// and writes it to <out>/sweep.csv.
std::string cmd_sweep(const RunConfig& base, const std::string& param, const std::vector<std::string>& values,
                      int seeds, SensorSelection sensors, const std::string& out_dir);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uniloc::cli
