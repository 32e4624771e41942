#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "oad/config.hpp"
#include "oad/numkit.hpp"

namespace oad::cli {

struct Options {
  std::string command;  // online | continual | baseline | offline | matrix | gradcheck
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  bool svg = false;
  std::optional<std::string> strategy;
  std::optional<double> rate;
  std::optional<std::string> teacher;
  std::optional<std::size_t> windows;
  std::optional<std::filesystem::path> pretrained;
  std::size_t jobs = 1;
};

/// Loads the config (or defaults) and applies command-line overrides.
ExperimentConfig resolve_config(const Options& options);

/// Stream length override: exactly `windows` x window_frames frames,
/// stretching activities when the default stream is too short.
void apply_window_override(ExperimentConfig& cfg, std::size_t windows);

int cmd_single(const ExperimentConfig& cfg, RunMode mode, const Options& options, std::ostream& out);
int cmd_offline(const ExperimentConfig& cfg, const Options& options, std::ostream& out);
int cmd_matrix(const ExperimentConfig& cfg, const Options& options, std::ostream& out,
               std::ostream& err);

inline constexpr double kGradcheckTolerance = 1e-4;

/// Runs the fixed fixture suite; prints the worst relative error. Exit 0 iff
/// it is below kGradcheckTolerance.
int cmd_gradcheck(std::ostream& out, const numkit::GradientFn& gradient = numkit::analytic_gradient);

/// Dispatch; exceptions become exit code 1 with a message on `err`.
int run(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace oad::cli
