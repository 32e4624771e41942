#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oad/rng.hpp"
#include "oad/streamgen.hpp"
#include "oad/student.hpp"

namespace oad {

enum class StrategyKind { uniform, random, max_error, max_uncertainty };

/// "uniform" | "random" | "error" | "uncertainty".
std::string_view to_string(StrategyKind kind);
/// Throws ConfigError("unknown strategy '...'") for anything else.
StrategyKind parse_strategy(std::string_view name);

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::uniform, StrategyKind::random,
                                                  StrategyKind::max_error,
                                                  StrategyKind::max_uncertainty};

struct Selection {
  std::vector<std::size_t> indices;  // sorted, unique, window-relative
  std::vector<double> scores;        // per window frame; empty for uniform / random
  std::uint64_t teacher_calls = 0;   // labels requested while scoring
};

/// max(1, round_half_up(rate * n)).
std::size_t budget(double rate, std::size_t n);

std::vector<std::size_t> select_uniform(std::size_t n, std::size_t k);
std::vector<std::size_t> select_random(std::size_t n, std::size_t k, Rng& rng);

/// Mean per-joint distance (px) between the student's prediction and the
/// teacher label, per frame.
std::vector<double> score_error(const StudentModel& student, std::span<const Frame> frames,
                                std::span<const Pose> teacher_labels);

std::vector<double> score_uncertainty(const StudentModel& student, std::span<const Frame> frames);

/// Indices of the k largest scores, ties to the lower index, sorted ascending.
std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t k);

/// Teacher access for the error strategy: returns the label of a frame.
using LabelFn = std::function<Pose(const Frame&)>;

/// Dispatch. `student` is the model serving the window. The error strategy
/// labels every frame through `teacher` before ranking.
Selection select(StrategyKind strategy, std::span<const Frame> window, std::size_t k,
                 const StudentModel& student, const LabelFn& teacher, Rng& rng);

}  // namespace oad
