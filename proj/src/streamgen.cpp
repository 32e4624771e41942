#include "oad/streamgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "oad/errors.hpp"

namespace oad {

void StreamConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("stream: " + msg); };
  if (joints < 1) fail("joints must be >= 1");
  if (feature_dim < 1) fail("feature_dim must be >= 1");
  if (activities < 1) fail("activities must be >= 1");
  if (frames_per_activity < 1) fail("frames_per_activity must be >= 1");
  if (!(canvas_px > 0.0)) fail("canvas_px must be > 0");
  if (!(frames_per_second > 0.0)) fail("frames_per_second must be > 0");
  if (!(margin_fraction >= 0.0 && margin_fraction < 0.5)) fail("margin must leave a nonempty interior");
  if (!(observation_noise >= 0.0)) fail("observation noise must be >= 0");
  if (!(amplitude_px.lo >= 0.0 && amplitude_px.lo <= amplitude_px.hi)) fail("bad amplitude range");
  if (!(angular_frequency.lo >= 0.0 && angular_frequency.lo <= angular_frequency.hi)) {
    fail("bad frequency range");
  }
  if (frame_limit && *frame_limit < 1) fail("frame limit must be >= 1");
}

EmbedMap make_embed(const StreamConfig& cfg) {
  EmbedMap embed;
  embed.feature_dim = cfg.feature_dim;
  embed.pose_dim = 2 * cfg.joints;
  Rng rng(derive_seed(cfg.seed, seed_tag::embed));
  // Scale keeps pre-activations in tanh's responsive range for poses spanning
  // the canvas (inputs lie in [-0.5, 0.5]).
  const double scale = 6.0 / std::sqrt(static_cast<double>(embed.pose_dim));
  embed.matrix.resize(embed.feature_dim * embed.pose_dim);
  for (double& m : embed.matrix) m = scale * rng.normal();
  embed.bias.resize(embed.feature_dim);
  for (double& b : embed.bias) b = 0.1 * rng.normal();
  return embed;
}

World make_world(const StreamConfig& cfg) {
  cfg.validate();
  World world;
  world.config = cfg;
  world.embed = make_embed(cfg);
  const double lo = cfg.margin_lo();
  const double hi = cfg.margin_hi();
  for (std::size_t k = 0; k < cfg.activities; ++k) {
    Rng rng(derive_seed(cfg.seed, seed_tag::activity, k));
    ActivitySpec spec;
    spec.anchor = Pose(cfg.joints);
    for (double& c : spec.anchor.xy) c = rng.uniform(lo, hi);
    for (std::size_t j = 0; j < cfg.joints; ++j) {
      spec.amplitude.push_back(rng.uniform(cfg.amplitude_px.lo, cfg.amplitude_px.hi));
      spec.frequency.push_back(rng.uniform(cfg.angular_frequency.lo, cfg.angular_frequency.hi));
      spec.phase_x.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
      spec.phase_y.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    world.activities.push_back(std::move(spec));
  }
  return world;
}

std::vector<double> observe(const Pose& pose, const EmbedMap& embed, double canvas_px,
                            double noise_sigma, Rng& rng) {
  require(pose.xy.size() == embed.pose_dim, "pose does not match the embedding");
  std::vector<double> centered(pose.xy.size());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] = pose.xy[i] / canvas_px - 0.5;
  std::vector<double> x(embed.feature_dim);
  for (std::size_t r = 0; r < embed.feature_dim; ++r) {
    const double* row = embed.matrix.data() + r * embed.pose_dim;
    double acc = embed.bias[r];
    for (std::size_t c = 0; c < embed.pose_dim; ++c) acc += row[c] * centered[c];
    x[r] = std::tanh(acc);
    if (noise_sigma > 0.0) x[r] += noise_sigma * rng.normal();
  }
  return x;
}

FrameStream::FrameStream(World world) : world_(std::move(world)) {
  const auto& cfg = world_.config;
  size_ = cfg.activities * cfg.frames_per_activity;
  if (cfg.frame_limit) size_ = std::min(size_, *cfg.frame_limit);
}

std::size_t FrameStream::activity_of(std::uint64_t t) const {
  return static_cast<std::size_t>(t / world_.config.frames_per_activity);
}

Pose FrameStream::pose_at(std::uint64_t t) const {
  require(t < size_, "frame index " + std::to_string(t) + " is past the end of the stream");
  const auto& cfg = world_.config;
  const auto& spec = world_.activities[activity_of(t)];
  const double lo = cfg.margin_lo();
  const double hi = cfg.margin_hi();
  const double time = static_cast<double>(t);
  Pose pose(cfg.joints);
  for (std::size_t j = 0; j < cfg.joints; ++j) {
    const double w = spec.frequency[j];
    pose.x(j) = std::clamp(spec.anchor.x(j) + spec.amplitude[j] * std::sin(w * time + spec.phase_x[j]),
                           lo, hi);
    pose.y(j) = std::clamp(spec.anchor.y(j) + spec.amplitude[j] * std::cos(w * time + spec.phase_y[j]),
                           lo, hi);
  }
  return pose;
}

Frame FrameStream::frame(std::uint64_t t) const {
  const auto& cfg = world_.config;
  Frame f;
  f.index = t;
  f.pose = pose_at(t);
  f.activity = activity_of(t);
  Rng rng(derive_seed(cfg.seed, seed_tag::observe, t));
  f.features = observe(f.pose, world_.embed, cfg.canvas_px, cfg.observation_noise, rng);
  return f;
}

std::vector<std::uint64_t> FrameStream::boundaries() const {
  std::vector<std::uint64_t> out;
  const auto step = world_.config.frames_per_activity;
  for (std::uint64_t t = 0; t < size_; t += step) out.push_back(t);
  return out;
}

std::vector<Frame> FrameStream::range(std::uint64_t begin, std::uint64_t end) const {
  require(begin <= end && end <= size_, "frame range out of bounds");
  std::vector<Frame> frames;
  frames.reserve(end - begin);
  for (std::uint64_t t = begin; t < end; ++t) frames.push_back(frame(t));
  return frames;
}

std::vector<Frame> FrameStream::materialize() const { return range(0, size_); }

FrameStream build_stream(const StreamConfig& cfg) { return FrameStream(make_world(cfg)); }

std::vector<Frame> build_pretrain_corpus(const StreamConfig& cfg, std::size_t size,
                                         std::uint64_t seed) {
  cfg.validate();
  require(size >= 1, "pre-training corpus size must be >= 1");
  const EmbedMap embed = make_embed(cfg);
  const double lo = cfg.margin_lo();
  const double hi = cfg.margin_hi();
  std::vector<Frame> corpus;
  corpus.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    Rng pose_rng(derive_seed(seed, seed_tag::corpus_pose, i));
    Frame f;
    f.index = i;
    f.pose = Pose(cfg.joints);
    for (double& c : f.pose.xy) c = pose_rng.uniform(lo, hi);
    Rng noise_rng(derive_seed(seed, seed_tag::corpus_observe, i));
    f.features = observe(f.pose, embed, cfg.canvas_px, cfg.observation_noise, noise_rng);
    corpus.push_back(std::move(f));
  }
  return corpus;
}

void write_stream_csv(const FrameStream& stream, std::ostream& out) {
  char buf[64];
  for (std::uint64_t t = 0; t < stream.size(); ++t) {
    const Frame f = stream.frame(t);
    out << t << ',' << f.activity;
    for (double v : f.pose.xy) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out << buf;
    }
    for (double v : f.features) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace oad
