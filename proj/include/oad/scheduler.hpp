#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "oad/query.hpp"
#include "oad/streamgen.hpp"
#include "oad/student.hpp"
#include "oad/teacher.hpp"

namespace oad {

enum class RunMode { online, continual, baseline, offline };

std::string_view to_string(RunMode mode);
RunMode parse_mode(std::string_view name);

struct OnlineConfig {
  std::size_t window_frames = 1500;
  double rate = 0.01;
  StrategyKind strategy = StrategyKind::uniform;
  TeacherKind teacher;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  std::size_t continual_interval = 128;
  RunMode mode = RunMode::online;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
  TrainRecipe recipe() const;
};

/// Cumulative cost of a run. Everything except wall_ms is deterministic.
struct EfficiencyLedger {
  std::uint64_t trainings = 0;
  std::uint64_t teacher_calls = 0;
  std::uint64_t train_sample_epochs = 0;
  double stream_seconds = 0.0;
  double wall_ms = 0.0;  // informational only; never written to CSV
};

struct WindowRecord {
  std::size_t window = 0;
  std::uint64_t model_version = 0;  // version serving the window's last frame
  std::size_t frames = 0;
  double mpjpe_px = 0.0;            // against ground truth
  EfficiencyLedger ledger;          // cumulative through the end of the window
  bool boundary = false;            // an activity starts inside this window
};

struct RunResult {
  std::vector<WindowRecord> records;
  EfficiencyLedger ledger;
};

/// Windowed protocol: window i is served by the model trained at the end of
/// window i-1 (window 0 by `pretrained`). Every full window is evaluated,
/// subsampled with the strategy, teacher-labelled and used to fine-tune a
/// copy that replaces the serving model at the boundary. A trailing partial
/// window is evaluated only. In baseline mode nothing is trained.
RunResult run_online(const OnlineConfig& cfg, const FrameStream& stream,
                     const StudentModel& pretrained);

/// Same bookkeeping with training disabled.
RunResult run_baseline(const OnlineConfig& cfg, const FrameStream& stream,
                       const StudentModel& pretrained);

/// Trains on every frame of every `continual_interval` chunk. Reporting stays
/// on the window grid; each frame is scored by the model serving it.
RunResult run_continual(const OnlineConfig& cfg, const FrameStream& stream,
                        const StudentModel& pretrained);

struct OfflineSummary {
  double mpjpe_px = 0.0;
  std::size_t selected = 0;
  EfficiencyLedger ledger;
};

/// One-shot fine-tuning on budget(rate, |train|) samples picked by the
/// strategy (scored with the pre-trained model), evaluated on `test` against
/// ground truth. rate = 0 evaluates `pretrained` unchanged.
OfflineSummary run_offline(const StudentModel& pretrained, std::span<const Frame> train,
                           std::span<const Frame> test, double rate, StrategyKind strategy,
                           const OnlineConfig& cfg);

struct OfflineCorpora {
  std::vector<Frame> train;
  std::vector<Frame> test;
};

/// Splits every activity of the stream in time: the first (1 - test_fraction)
/// of its frames train, the rest test.
OfflineCorpora make_offline_corpora(const FrameStream& stream, double test_fraction);

/// Serving model after a training event. Throws ContractViolation unless
/// trained.version == serving.version + 1.
StudentModel swap_contract(const StudentModel& serving, StudentModel trained);

/// MPJPE of `model` on `frames` against ground truth.
double evaluate(const StudentModel& model, std::span<const Frame> frames);

}  // namespace oad
