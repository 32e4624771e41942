#include "oad/scheduler.hpp"

#include <chrono>
#include <unordered_map>

#include "oad/errors.hpp"
#include "oad/metrics.hpp"

namespace oad {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::online: return "online";
    case RunMode::continual: return "continual";
    case RunMode::baseline: return "baseline";
    case RunMode::offline: return "offline";
  }
  return "?";
}

RunMode parse_mode(std::string_view name) {
  for (RunMode m : {RunMode::online, RunMode::continual, RunMode::baseline, RunMode::offline}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

void OnlineConfig::validate() const {
  if (window_frames < 1) throw ConfigError("online.window_frames must be >= 1");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("online.rate must lie in (0, 1]");
  if (continual_interval < 1) throw ConfigError("online.continual_interval must be >= 1");
  if (epochs < 1) throw ConfigError("online.epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("online.lr must be > 0");
  if (teacher.sigma_px < 0.0) throw ConfigError("teacher sigma must be >= 0");
}

TrainRecipe OnlineConfig::recipe() const {
  TrainRecipe r;
  r.epochs = epochs;
  r.learning_rate = learning_rate;
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// One teacher call per frame index per run; repeats are served from cache.
class LabelCache {
 public:
  LabelCache(TeacherKind kind, std::uint64_t seed, double canvas_px)
      : kind_(kind), seed_(seed), canvas_px_(canvas_px) {}

  const Pose& label(const Frame& frame) {
    auto it = cache_.find(frame.index);
    if (it == cache_.end()) {
      it = cache_.emplace(frame.index, teacher_label(frame, kind_, seed_, canvas_px_)).first;
    }
    return it->second;
  }

  std::uint64_t calls() const { return cache_.size(); }

 private:
  TeacherKind kind_;
  std::uint64_t seed_;
  double canvas_px_;
  std::unordered_map<std::uint64_t, Pose> cache_;
};

std::uint64_t teacher_seed(const OnlineConfig& cfg) {
  return derive_seed(cfg.seed, seed_tag::teacher);
}

bool window_has_boundary(std::size_t begin, std::size_t end, std::size_t frames_per_activity) {
  // First activity start at or after `begin`.
  const std::size_t next = (begin + frames_per_activity - 1) / frames_per_activity *
                           frames_per_activity;
  return next < end;
}

}  // namespace

double evaluate(const StudentModel& model, std::span<const Frame> frames) {
  require(!frames.empty(), "evaluation needs at least one frame");
  double total = 0.0;
  std::size_t joints = 0;
  for (const Frame& f : frames) {
    total += joint_error_sum(predict(model, f.features).pose, f.pose);
    joints += f.pose.joints();
  }
  return total / static_cast<double>(joints);
}

StudentModel swap_contract(const StudentModel& serving, StudentModel trained) {
  require(trained.version == serving.version + 1,
          "model swap from version " + std::to_string(serving.version) + " to " +
              std::to_string(trained.version) + " is not a single-step update");
  return trained;
}

RunResult run_online(const OnlineConfig& cfg, const FrameStream& stream,
                     const StudentModel& pretrained) {
  cfg.validate();
  const std::size_t n = stream.size();
  const std::size_t w = cfg.window_frames;
  if (n < w) {
    throw ConfigError("stream has " + std::to_string(n) + " frames, fewer than one window (" +
                      std::to_string(w) + ")");
  }
  const bool train = cfg.mode != RunMode::baseline;
  const auto& scfg = stream.config();
  const auto start = Clock::now();

  LabelCache labels(cfg.teacher, teacher_seed(cfg), scfg.canvas_px);
  LabelFn teacher = [&labels](const Frame& f) { return labels.label(f); };
  StudentModel serving = pretrained;
  RunResult result;
  EfficiencyLedger& ledger = result.ledger;

  for (std::size_t begin = 0, window = 0; begin < n; begin += w, ++window) {
    const std::size_t end = std::min(n, begin + w);
    const std::vector<Frame> frames = stream.range(begin, end);

    WindowRecord rec;
    rec.window = window;
    rec.model_version = serving.version;
    rec.frames = frames.size();
    rec.mpjpe_px = evaluate(serving, frames);
    rec.boundary = window_has_boundary(begin, end, scfg.frames_per_activity);

    if (train && frames.size() == w) {
      const std::size_t k = budget(cfg.rate, w);
      Rng rng(derive_seed(cfg.seed, seed_tag::select, window));
      const Selection sel = select(cfg.strategy, frames, k, serving, teacher, rng);
      std::vector<TrainingSample> batch;
      batch.reserve(sel.indices.size());
      for (std::size_t i : sel.indices) {
        batch.push_back({frames[i].features, labels.label(frames[i])});
      }
      StudentModel trained = train_student(serving, batch, cfg.recipe(),
                                           derive_seed(cfg.seed, seed_tag::shuffle, window));
      serving = swap_contract(serving, std::move(trained));
      ledger.trainings += 1;
      ledger.train_sample_epochs += batch.size() * cfg.epochs;
    }
    ledger.teacher_calls = labels.calls();
    ledger.stream_seconds = static_cast<double>(end) / scfg.frames_per_second;
    ledger.wall_ms = elapsed_ms(start);
    rec.ledger = ledger;
    result.records.push_back(rec);
  }
  return result;
}

RunResult run_baseline(const OnlineConfig& cfg, const FrameStream& stream,
                       const StudentModel& pretrained) {
  OnlineConfig base = cfg;
  base.mode = RunMode::baseline;
  return run_online(base, stream, pretrained);
}

RunResult run_continual(const OnlineConfig& cfg, const FrameStream& stream,
                        const StudentModel& pretrained) {
  cfg.validate();
  const std::size_t n = stream.size();
  const std::size_t interval = cfg.continual_interval;
  const std::size_t w = cfg.window_frames;
  if (n < interval) {
    throw ConfigError("stream has " + std::to_string(n) + " frames, fewer than one interval (" +
                      std::to_string(interval) + ")");
  }
  const auto& scfg = stream.config();
  const auto start = Clock::now();

  LabelCache labels(cfg.teacher, teacher_seed(cfg), scfg.canvas_px);
  StudentModel serving = pretrained;
  RunResult result;
  EfficiencyLedger& ledger = result.ledger;

  std::vector<TrainingSample> chunk;
  chunk.reserve(interval);
  double window_error = 0.0;
  std::size_t window_joints = 0;
  std::size_t window_begin = 0;
  std::uint64_t chunk_index = 0;

  for (std::size_t t = 0; t < n; ++t) {
    const Frame f = stream.frame(t);
    window_error += joint_error_sum(predict(serving, f.features).pose, f.pose);
    window_joints += f.pose.joints();
    const std::uint64_t version_seen = serving.version;

    chunk.push_back({f.features, labels.label(f)});
    if (chunk.size() == interval) {
      StudentModel trained = train_student(serving, chunk, cfg.recipe(),
                                           derive_seed(cfg.seed, seed_tag::shuffle, chunk_index));
      serving = swap_contract(serving, std::move(trained));
      ledger.trainings += 1;
      ledger.train_sample_epochs += chunk.size() * cfg.epochs;
      chunk.clear();
      ++chunk_index;
    }

    if (t + 1 == n || (t + 1 - window_begin) == w) {
      WindowRecord rec;
      rec.window = window_begin / w;
      rec.model_version = version_seen;
      rec.frames = t + 1 - window_begin;
      rec.mpjpe_px = window_error / static_cast<double>(window_joints);
      rec.boundary = window_has_boundary(window_begin, t + 1, scfg.frames_per_activity);
      ledger.teacher_calls = labels.calls();
      ledger.stream_seconds = static_cast<double>(t + 1) / scfg.frames_per_second;
      ledger.wall_ms = elapsed_ms(start);
      rec.ledger = ledger;
      result.records.push_back(rec);
      window_error = 0.0;
      window_joints = 0;
      window_begin = t + 1;
    }
  }
  return result;
}

OfflineSummary run_offline(const StudentModel& pretrained, std::span<const Frame> train,
                           std::span<const Frame> test, double rate, StrategyKind strategy,
                           const OnlineConfig& cfg) {
  if (train.empty() || test.empty()) throw ConfigError("offline corpora must be non-empty");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("offline rate must lie in [0, 1]");
  const auto start = Clock::now();
  OfflineSummary summary;
  if (rate == 0.0) {
    summary.mpjpe_px = evaluate(pretrained, test);
    summary.ledger.wall_ms = elapsed_ms(start);
    return summary;
  }

  LabelCache labels(cfg.teacher, teacher_seed(cfg), pretrained.canvas_px);
  LabelFn teacher = [&labels](const Frame& f) { return labels.label(f); };
  const std::size_t k = budget(rate, train.size());
  Rng rng(derive_seed(cfg.seed, seed_tag::select, 0));
  const Selection sel = select(strategy, train, k, pretrained, teacher, rng);
  std::vector<TrainingSample> batch;
  batch.reserve(sel.indices.size());
  for (std::size_t i : sel.indices) batch.push_back({train[i].features, labels.label(train[i])});
  const StudentModel tuned =
      train_student(pretrained, batch, cfg.recipe(), derive_seed(cfg.seed, seed_tag::shuffle, 0));

  summary.mpjpe_px = evaluate(tuned, test);
  summary.selected = batch.size();
  summary.ledger.trainings = 1;
  summary.ledger.teacher_calls = labels.calls();
  summary.ledger.train_sample_epochs = batch.size() * cfg.epochs;
  summary.ledger.wall_ms = elapsed_ms(start);
  return summary;
}

OfflineCorpora make_offline_corpora(const FrameStream& stream, double test_fraction) {
  require(test_fraction > 0.0 && test_fraction < 1.0, "test fraction must lie in (0, 1)");
  const std::size_t per = stream.config().frames_per_activity;
  OfflineCorpora out;
  for (std::size_t begin = 0; begin < stream.size(); begin += per) {
    const std::size_t end = std::min(stream.size(), begin + per);
    const auto split = begin + static_cast<std::size_t>(
                                   static_cast<double>(end - begin) * (1.0 - test_fraction));
    for (std::size_t t = begin; t < end; ++t) {
      (t < split ? out.train : out.test).push_back(stream.frame(t));
    }
  }
  if (out.train.empty() || out.test.empty()) throw ConfigError("offline split left a corpus empty");
  return out;
}

}  // namespace oad
