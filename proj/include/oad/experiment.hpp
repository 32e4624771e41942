#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oad/config.hpp"
#include "oad/report.hpp"
#include "oad/scheduler.hpp"

namespace oad {

/// "<mode>[_<strategy>_r<rate>][_<teacher>]_s<seed>", e.g.
/// "online_uniform_r0.01_gt_s0", "baseline_s0", "continual_gt_s0".
std::string make_run_id(const RunMeta& meta);

/// Per-run RNG seed: mix_seed(master_seed, fnv1a(run_id)).
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& run_id);

struct RunSpec {
  RunMeta meta;          // meta.seed is the master seed
  OnlineConfig online;   // online.seed is the derived per-run seed
};

/// Baseline + continual references followed by every
/// strategy x rate x teacher combination, for one master seed.
std::vector<RunSpec> plan_matrix(const ExperimentConfig& cfg, std::uint64_t master_seed);

/// Single run of `mode` with the config's online settings.
RunSpec plan_single(const ExperimentConfig& cfg, RunMode mode, std::uint64_t master_seed);

/// Stream and pre-trained student shared by every run of one master seed.
struct SeedContext {
  FrameStream stream;
  StudentModel pretrained;
};

StudentModel pretrain_for_seed(const ExperimentConfig& cfg, std::uint64_t master_seed);
SeedContext prepare_seed(const ExperimentConfig& cfg, std::uint64_t master_seed);

struct RunOutcome {
  RunSpec spec;
  RunResult result;
  SummaryRow summary;
  std::string error;  // empty on success
};

RunOutcome execute_run(const RunSpec& spec, const SeedContext& context);

/// Runs every spec on up to `jobs` threads. Outcomes come back in spec order
/// and do not depend on `jobs`. Failures are captured per run.
std::vector<RunOutcome> execute_runs(const std::vector<RunSpec>& specs,
                                     const std::map<std::uint64_t, SeedContext>& contexts,
                                     std::size_t jobs);

/// Runs `fn(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// One offline fine-tune; strategy "-" marks the strategy-independent
/// references (rate 0 and rate 1).
SummaryRow run_offline_cell(const ExperimentConfig& cfg, std::uint64_t master_seed,
                            const SeedContext& context, const OfflineCorpora& corpora,
                            const std::string& strategy, double rate);

/// Offline sweep for one master seed: rate 0 and rate 1 references plus
/// strategies x offline rates.
std::vector<SummaryRow> run_offline_sweep(const ExperimentConfig& cfg, std::uint64_t master_seed,
                                          const SeedContext& context, std::size_t jobs);

}  // namespace oad
