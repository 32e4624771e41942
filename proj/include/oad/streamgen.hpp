#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "oad/rng.hpp"

namespace oad {

/// J joints as interleaved pixel coordinates (x0, y0, x1, y1, ...).
struct Pose {
  std::vector<double> xy;

  Pose() = default;
  explicit Pose(std::size_t joints) : xy(2 * joints, 0.0) {}
  explicit Pose(std::vector<double> coords) : xy(std::move(coords)) {}

  std::size_t joints() const { return xy.size() / 2; }
  double x(std::size_t j) const { return xy[2 * j]; }
  double y(std::size_t j) const { return xy[2 * j + 1]; }
  double& x(std::size_t j) { return xy[2 * j]; }
  double& y(std::size_t j) { return xy[2 * j + 1]; }

  bool operator==(const Pose&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct StreamConfig {
  std::size_t joints = 8;
  double canvas_px = 128.0;
  std::size_t feature_dim = 32;
  double frames_per_second = 50.0;
  std::size_t activities = 6;
  std::size_t frames_per_activity = 1200;
  Range amplitude_px{4.0, 20.0};
  Range angular_frequency{0.005, 0.05};  // rad / frame
  double observation_noise = 0.01;
  double margin_fraction = 0.1;
  std::uint64_t seed = 0;
  /// Truncates the stream to this many frames when set.
  std::optional<std::size_t> frame_limit;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;

  double margin_lo() const { return margin_fraction * canvas_px; }
  double margin_hi() const { return canvas_px - margin_fraction * canvas_px; }
};

struct ActivitySpec {
  Pose anchor;
  std::vector<double> amplitude;  // per joint, px
  std::vector<double> frequency;  // per joint, rad / frame
  std::vector<double> phase_x;
  std::vector<double> phase_y;
};

/// Fixed "camera": features = tanh(M (vec(pose)/canvas - 0.5) + b) + noise.
struct EmbedMap {
  std::size_t feature_dim = 0;
  std::size_t pose_dim = 0;
  std::vector<double> matrix;  // row-major feature_dim x pose_dim
  std::vector<double> bias;
};

struct Frame {
  std::uint64_t index = 0;
  std::vector<double> features;
  Pose pose;
  std::size_t activity = 0;
};

/// Everything a seed fixes about the simulated world.
struct World {
  StreamConfig config;
  EmbedMap embed;
  std::vector<ActivitySpec> activities;
};

World make_world(const StreamConfig& cfg);

EmbedMap make_embed(const StreamConfig& cfg);

/// Features for a pose; `rng` supplies the observation noise.
std::vector<double> observe(const Pose& pose, const EmbedMap& embed, double canvas_px,
                            double noise_sigma, Rng& rng);

/// Concatenated activities, generated on demand by frame index.
class FrameStream {
 public:
  explicit FrameStream(World world);

  std::size_t size() const { return size_; }
  const World& world() const { return world_; }
  const StreamConfig& config() const { return world_.config; }

  /// Pure in (world, t): safe to call concurrently and in any order.
  Frame frame(std::uint64_t t) const;
  Pose pose_at(std::uint64_t t) const;
  std::size_t activity_of(std::uint64_t t) const;

  /// First frame index of every activity inside the stream (starts with 0).
  std::vector<std::uint64_t> boundaries() const;

  std::vector<Frame> materialize() const;
  std::vector<Frame> range(std::uint64_t begin, std::uint64_t end) const;

 private:
  World world_;
  std::size_t size_ = 0;
};

FrameStream build_stream(const StreamConfig& cfg);

/// Activity-free corpus: poses uniform over the margin box, features through
/// the stream's EmbedMap. Frames are indexed 0..size-1 with activity 0.
std::vector<Frame> build_pretrain_corpus(const StreamConfig& cfg, std::size_t size,
                                         std::uint64_t seed);

/// CSV dump, one frame per line: t, activity_id, 2J pose values, d features,
/// fixed 6-decimal floats. No header.
void write_stream_csv(const FrameStream& stream, std::ostream& out);

}  // namespace oad
