#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oad/query.hpp"
#include "oad/scheduler.hpp"
#include "oad/streamgen.hpp"
#include "oad/student.hpp"
#include "oad/teacher.hpp"

namespace oad {

struct StudentSettings {
  std::size_t grid = 16;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t pretrain_size = 4000;
  std::size_t pretrain_epochs = 30;
};

/// Everything one invocation needs. Defaults:
/// 1500-frame windows, 10 epochs at lr 1e-3, continual interval 128, rates
/// {1%, 20%}, a noisy teacher calibrated to 7.87 px.
struct ExperimentConfig {
  StreamConfig stream;
  /// World seed override; when empty the world follows the master seed.
  std::optional<std::uint64_t> stream_seed;
  StudentSettings student;
  OnlineConfig online;
  std::vector<StrategyKind> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<double> rates{0.01, 0.2};
  std::vector<std::string> teachers{"gt", "noisy"};
  double noisy_teacher_mpjpe_px = 7.87;
  std::vector<double> offline_rates{0.01, 0.05, 0.1, 0.2, 0.4};
  double offline_test_fraction = 0.25;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";

  /// Resolves a teacher name ("gt" | "noisy") against this config.
  TeacherKind teacher(std::string_view name) const;
  StudentShape student_shape() const;
  /// Stream for a master seed (honours stream_seed).
  StreamConfig stream_for(std::uint64_t master_seed) const;
};

/// Strict JSON parsing: unknown keys and bad values raise ConfigError naming
/// the offending key. Missing file raises IoError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view json_text);

}  // namespace oad
