#include "oad/config.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oad/errors.hpp"

namespace oad {

using nlohmann::json;

TeacherKind ExperimentConfig::teacher(std::string_view name) const {
  if (name == "gt") return TeacherKind::ground_truth();
  if (name == "noisy") return TeacherKind::noisy(sigma_for_mpjpe(noisy_teacher_mpjpe_px));
  throw ConfigError("unknown teacher '" + std::string(name) + "' (expected gt or noisy)");
}

StudentShape ExperimentConfig::student_shape() const {
  StudentShape shape;
  shape.input_dim = stream.feature_dim;
  shape.joints = stream.joints;
  shape.grid = student.grid;
  shape.canvas_px = stream.canvas_px;
  shape.hidden = student.hidden;
  return shape;
}

StreamConfig ExperimentConfig::stream_for(std::uint64_t master_seed) const {
  StreamConfig cfg = stream;
  cfg.seed = stream_seed.value_or(master_seed);
  return cfg;
}

namespace {

class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("'" + name() + "' must be a JSON object");
    for (const auto& item : node_.items()) {
      if (!allowed.count(item.key())) throw ConfigError("unknown key '" + qualify(item.key()) + "'");
    }
  }

  const json* find(const std::string& key) const {
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& target) const {
    const json* value = find(key);
    if (!value) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!value->is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        static_assert(std::is_unsigned_v<T>);
        if (!value->is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value->is_string()) throw ConfigError("");
      }
      target = value->get<T>();
    } catch (const std::exception&) {
      throw ConfigError("bad value for '" + qualify(key) + "'");
    }
  }

  Range range(const std::string& key, Range fallback) const {
    const json* value = find(key);
    if (!value) return fallback;
    if (!value->is_array() || value->size() != 2 || !(*value)[0].is_number() ||
        !(*value)[1].is_number()) {
      throw ConfigError("'" + qualify(key) + "' must be a [lo, hi] pair");
    }
    return {(*value)[0].get<double>(), (*value)[1].get<double>()};
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& target) const {
    const json* value = find(key);
    if (!value) return;
    if (!value->is_array() || value->empty()) {
      throw ConfigError("'" + qualify(key) + "' must be a non-empty array");
    }
    std::vector<T> out;
    for (const auto& item : *value) {
      if constexpr (std::is_same_v<T, double>) {
        if (!item.is_number()) throw ConfigError("bad entry in '" + qualify(key) + "'");
      } else if constexpr (std::is_integral_v<T>) {
        if (!item.is_number_unsigned()) throw ConfigError("bad entry in '" + qualify(key) + "'");
      } else {
        if (!item.is_string()) throw ConfigError("bad entry in '" + qualify(key) + "'");
      }
      out.push_back(item.get<T>());
    }
    target = std::move(out);
  }

  std::string qualify(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string name() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& node_;
  std::string path_;
};

void check_rate(double rate, const std::string& key) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("'" + key + "' rates must lie in (0, 1]");
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  const Section root(doc, "",
                     {"stream", "student", "teacher", "online", "offline", "strategy",
                      "strategies", "rates", "teachers", "seeds", "output_dir"});

  if (const json* node = root.find("stream")) {
    const Section s(*node, "stream",
                    {"joints", "canvas_px", "feature_dim", "frames_per_second", "activities",
                     "frames_per_activity", "amplitude_px", "angular_frequency",
                     "observation_noise", "margin_fraction", "seed"});
    auto& sc = cfg.stream;
    s.read("joints", sc.joints);
    s.read("canvas_px", sc.canvas_px);
    s.read("feature_dim", sc.feature_dim);
    s.read("frames_per_second", sc.frames_per_second);
    s.read("activities", sc.activities);
    s.read("frames_per_activity", sc.frames_per_activity);
    sc.amplitude_px = s.range("amplitude_px", sc.amplitude_px);
    sc.angular_frequency = s.range("angular_frequency", sc.angular_frequency);
    s.read("observation_noise", sc.observation_noise);
    s.read("margin_fraction", sc.margin_fraction);
    if (s.find("seed")) {
      std::uint64_t seed = 0;
      s.read("seed", seed);
      cfg.stream_seed = seed;
    }
  }
  cfg.stream.validate();

  if (const json* node = root.find("student")) {
    const Section s(*node, "student", {"grid", "hidden", "pretrain_size", "pretrain_epochs"});
    s.read("grid", cfg.student.grid);
    s.read_list("hidden", cfg.student.hidden);
    s.read("pretrain_size", cfg.student.pretrain_size);
    s.read("pretrain_epochs", cfg.student.pretrain_epochs);
    if (cfg.student.grid < 2) throw ConfigError("'student.grid' must be >= 2");
    if (cfg.student.pretrain_size < 1) throw ConfigError("'student.pretrain_size' must be >= 1");
    for (auto h : cfg.student.hidden) {
      if (h < 1) throw ConfigError("'student.hidden' widths must be >= 1");
    }
  }

  if (const json* node = root.find("teacher")) {
    const Section s(*node, "teacher", {"noisy_mpjpe_px"});
    s.read("noisy_mpjpe_px", cfg.noisy_teacher_mpjpe_px);
    if (!(cfg.noisy_teacher_mpjpe_px >= 0.0)) {
      throw ConfigError("'teacher.noisy_mpjpe_px' must be >= 0");
    }
  }

  std::string online_teacher = "gt";
  if (const json* node = root.find("online")) {
    const Section s(*node, "online",
                    {"window_frames", "rate", "strategy", "teacher", "epochs", "lr",
                     "continual_interval"});
    auto& oc = cfg.online;
    s.read("window_frames", oc.window_frames);
    s.read("rate", oc.rate);
    if (s.find("strategy")) {
      std::string name;
      s.read("strategy", name);
      oc.strategy = parse_strategy(name);
    }
    s.read("teacher", online_teacher);
    s.read("epochs", oc.epochs);
    s.read("lr", oc.learning_rate);
    s.read("continual_interval", oc.continual_interval);
  }
  cfg.online.teacher = cfg.teacher(online_teacher);
  cfg.online.validate();

  if (const json* node = root.find("offline")) {
    const Section s(*node, "offline", {"rates", "test_fraction"});
    s.read_list("rates", cfg.offline_rates);
    s.read("test_fraction", cfg.offline_test_fraction);
    for (double r : cfg.offline_rates) check_rate(r, "offline.rates");
    if (!(cfg.offline_test_fraction > 0.0 && cfg.offline_test_fraction < 1.0)) {
      throw ConfigError("'offline.test_fraction' must lie in (0, 1)");
    }
  }

  if (root.find("strategy") && root.find("strategies")) {
    throw ConfigError("give either 'strategy' or 'strategies', not both");
  }
  if (root.find("strategy")) {
    std::string name;
    root.read("strategy", name);
    cfg.online.strategy = parse_strategy(name);
    cfg.strategies = {cfg.online.strategy};
  }
  if (root.find("strategies")) {
    std::vector<std::string> names;
    root.read_list("strategies", names);
    cfg.strategies.clear();
    for (const auto& n : names) cfg.strategies.push_back(parse_strategy(n));
  }
  root.read_list("rates", cfg.rates);
  for (double r : cfg.rates) check_rate(r, "rates");
  root.read_list("teachers", cfg.teachers);
  for (const auto& t : cfg.teachers) cfg.teacher(t);
  root.read_list("seeds", cfg.seeds);
  if (root.find("output_dir")) {
    std::string dir;
    root.read("output_dir", dir);
    cfg.output_dir = dir;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config_text(text);
}

}  // namespace oad
