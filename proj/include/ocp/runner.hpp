#pragma once

#include <string>
#include <vector>

#include "ocp/config.hpp"
#include "ocp/harness.hpp"

namespace ocp {

// Worker-thread cap: OCP_THREADS if set, hardware concurrency otherwise.
int worker_threads();

std::string format_number(double v);  // %.9g, the fixed output precision

struct SuiteResult {
    std::vector<RunSummary> summaries;  // sorted by run seed
    bool all_lemma_pass = false;
};

// Derived inputs of one run in a suite.
struct RunPlan {
    ThresholdGrid grid;
    LossParams params;
    HyperParams hyper;
};
RunPlan plan_run(const RunConfig& config);

// Executes one run of a suite (run `index` under the config's base seed)
// without touching the filesystem.
RunLog run_once(const RunConfig& config, int index, const RunOptions& options = {});

// Runs every seed of the suite (in parallel across worker threads) and, when
// `write_files` is set, emits per-step CSVs, per-run summaries, aggregate.csv
// and config.txt under the config's output directory.
SuiteResult run_suite(const RunConfig& config, bool write_files);

// CLI entry points. Each returns a process exit code.
int cmd_run(const RunConfig& config);
int cmd_sweep(const RunConfig& config, const std::string& axis, const std::vector<std::string>& values);
int cmd_check(const std::string& dir);
int cmd_make_replay(const RunConfig& config, const std::string& path);

// File emission helpers, exposed for tests.
void write_step_csv(const RunLog& log, const std::string& path);
void write_summary(const RunSummary& summary, const std::string& path);
void write_aggregate(const std::vector<RunSummary>& summaries, const std::string& path);

}  // namespace ocp
