#include "oad/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oad/errors.hpp"

namespace oad {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::random: return "random";
    case StrategyKind::max_error: return "error";
    case StrategyKind::max_uncertainty: return "uncertainty";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (StrategyKind kind : kAllStrategies) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::size_t budget(double rate, std::size_t n) {
  require(rate > 0.0 && rate <= 1.0, "sampling rate must lie in (0, 1]");
  require(n >= 1, "window must hold at least one frame");
  // The 1e-9 slack keeps exact halves (0.015 * 100) from rounding down on
  // representation error.
  const auto k =
      static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5 + 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

namespace {
void check_budget(std::size_t n, std::size_t k) {
  require(k >= 1 && k <= n, "selection budget " + std::to_string(k) + " outside [1, " +
                                std::to_string(n) + "]");
}
}  // namespace

std::vector<std::size_t> select_uniform(std::size_t n, std::size_t k) {
  check_budget(n, k);
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = j * n / k;
  return out;
}

std::vector<std::size_t> select_random(std::size_t n, std::size_t k, Rng& rng) {
  check_budget(n, k);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<double> score_error(const StudentModel& student, std::span<const Frame> frames,
                                std::span<const Pose> teacher_labels) {
  require(teacher_labels.size() == frames.size(),
          "error scoring needs a teacher label for every frame");
  std::vector<double> scores(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Pose predicted = predict(student, frames[i].features).pose;
    const Pose& label = teacher_labels[i];
    require(label.joints() == predicted.joints(), "teacher label has wrong joint count");
    double total = 0.0;
    for (std::size_t j = 0; j < label.joints(); ++j) {
      total += std::hypot(predicted.x(j) - label.x(j), predicted.y(j) - label.y(j));
    }
    scores[i] = total / static_cast<double>(label.joints());
  }
  return scores;
}

std::vector<double> score_uncertainty(const StudentModel& student, std::span<const Frame> frames) {
  std::vector<double> scores(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    scores[i] = uncertainty_score(student, frames[i].features);
  }
  return scores;
}

std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t k) {
  require(k <= scores.size(), "budget exceeds the number of scores");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

Selection select(StrategyKind strategy, std::span<const Frame> window, std::size_t k,
                 const StudentModel& student, const LabelFn& teacher, Rng& rng) {
  check_budget(window.size(), k);
  Selection sel;
  switch (strategy) {
    case StrategyKind::uniform:
      sel.indices = select_uniform(window.size(), k);
      break;
    case StrategyKind::random:
      sel.indices = select_random(window.size(), k, rng);
      break;
    case StrategyKind::max_error: {
      require(static_cast<bool>(teacher), "error strategy needs a teacher");
      std::vector<Pose> labels;
      labels.reserve(window.size());
      for (const Frame& f : window) labels.push_back(teacher(f));
      sel.teacher_calls = window.size();
      sel.scores = score_error(student, window, labels);
      sel.indices = select_top(sel.scores, k);
      break;
    }
    case StrategyKind::max_uncertainty:
      sel.scores = score_uncertainty(student, window);
      sel.indices = select_top(sel.scores, k);
      break;
  }
  return sel;
}

}  // namespace oad
