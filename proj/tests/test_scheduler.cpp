#include <doctest.h>

#include "oad/errors.hpp"
#include "oad/metrics.hpp"
#include "oad/scheduler.hpp"

using namespace oad;

namespace {

StreamConfig small_stream(std::size_t activities, std::size_t per_activity, std::uint64_t seed = 1) {
  StreamConfig s;
  s.joints = 2;
  s.canvas_px = 32.0;
  s.feature_dim = 6;
  s.activities = activities;
  s.frames_per_activity = per_activity;
  s.amplitude_px = {1.0, 3.0};
  s.seed = seed;
  return s;
}

StudentModel small_student(std::uint64_t seed = 5) {
  StudentShape shape;
  shape.input_dim = 6;
  shape.joints = 2;
  shape.grid = 4;
  shape.canvas_px = 32.0;
  shape.hidden = {8};
  return make_student(shape, seed);
}

OnlineConfig small_online(std::size_t w, double rate, std::size_t epochs = 1) {
  OnlineConfig c;
  c.window_frames = w;
  c.rate = rate;
  c.epochs = epochs;
  c.continual_interval = 16;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("online: window and training counts") {
  const FrameStream stream = build_stream(small_stream(3, 150));  // N = 450
  const auto result = run_online(small_online(150, 0.1), stream, small_student());
  CHECK(result.records.size() == 3);
  CHECK(result.ledger.trainings == 3);

  const auto partial = run_online(small_online(100, 0.1), stream, small_student());
  CHECK(partial.records.size() == 5);
  CHECK(partial.ledger.trainings == 4);
  CHECK(partial.records.back().frames == 50);
}

TEST_CASE("online: versions 0,1,2,... without gaps, window i served by model i") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  const auto result = run_online(small_online(40, 0.1), stream, small_student());
  REQUIRE(result.records.size() == 5);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    CHECK(result.records[i].window == i);
    CHECK(result.records[i].model_version == i);
  }
}

TEST_CASE("baseline: no training, identical versions, same window-0 error") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  const StudentModel m = small_student();
  const auto online = run_online(small_online(40, 0.1), stream, m);
  const auto base = run_baseline(small_online(40, 0.1), stream, m);
  REQUIRE(base.records.size() == online.records.size());
  CHECK(base.ledger.trainings == 0);
  CHECK(base.ledger.train_sample_epochs == 0);
  CHECK(base.ledger.teacher_calls == 0);
  for (const auto& r : base.records) CHECK(r.model_version == m.version);
  CHECK(base.records[0].mpjpe_px == online.records[0].mpjpe_px);
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    CHECK(base.records[i].mpjpe_px == doctest::Approx(evaluate(m, stream.range(40 * i, std::min<std::size_t>(200, 40 * i + 40)))).epsilon(1e-12));
  }
}

TEST_CASE("swap contract") {
  StudentModel a = small_student();
  a.version = 3;
  StudentModel b = a;
  b.version = 4;
  CHECK(swap_contract(a, b).version == 4);
  b.version = 3;
  CHECK_THROWS_AS(swap_contract(a, b), ContractViolation);
  b.version = 2;
  CHECK_THROWS_AS(swap_contract(a, b), ContractViolation);
  b.version = 5;
  CHECK_THROWS_AS(swap_contract(a, b), ContractViolation);
}

TEST_CASE("continual: trainings = floor(N / interval), ledger arithmetic") {
  StreamConfig s = small_stream(2, 100);
  s.frame_limit = 160;
  const FrameStream stream = build_stream(s);
  OnlineConfig c = small_online(40, 0.1, 2);
  c.continual_interval = 16;
  const auto result = run_continual(c, stream, small_student());
  CHECK(result.ledger.trainings == 10);
  CHECK(result.ledger.train_sample_epochs == 10 * 16 * 2);
  CHECK(result.ledger.teacher_calls == 160);
  REQUIRE(result.records.size() == 4);
  for (const auto& r : result.records) CHECK(r.frames == 40);

  OnlineConfig odd = c;
  odd.continual_interval = 30;  // 160 = 5 * 30 + 10
  CHECK(run_continual(odd, stream, small_student()).ledger.trainings == 5);
}

TEST_CASE("continual: version seen at each window's last frame") {
  StreamConfig s = small_stream(1, 96);
  const FrameStream stream = build_stream(s);
  OnlineConfig c = small_online(32, 0.1);
  c.continual_interval = 16;
  const auto result = run_continual(c, stream, small_student());
  REQUIRE(result.records.size() == 3);
  // The last frame of window i (t = 32i + 31) is served by the model trained
  // after 2i + 1 full chunks.
  CHECK(result.records[0].model_version == 1);
  CHECK(result.records[1].model_version == 3);
  CHECK(result.records[2].model_version == 5);
}

TEST_CASE("ledger linearity over rates") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  for (double rate : {0.05, 0.1, 0.25, 1.0}) {
    const auto r = run_online(small_online(50, rate, 3), stream, small_student());
    CHECK(r.ledger.train_sample_epochs == 4 * budget(rate, 50) * 3);
  }
}

TEST_CASE("ledger is monotone and stream seconds follow frames") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  const auto r = run_online(small_online(30, 0.2), stream, small_student());
  std::size_t frames = 0;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    frames += r.records[i].frames;
    CHECK(r.records[i].ledger.stream_seconds == doctest::Approx(frames / 50.0));
    CHECK(r.records[i].mpjpe_px >= 0.0);
    if (i) {
      CHECK(r.records[i].ledger.trainings >= r.records[i - 1].ledger.trainings);
      CHECK(r.records[i].ledger.teacher_calls >= r.records[i - 1].ledger.teacher_calls);
      CHECK(r.records[i].ledger.train_sample_epochs >= r.records[i - 1].ledger.train_sample_epochs);
    }
  }
}

TEST_CASE("error strategy labels whole windows once") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  OnlineConfig c = small_online(50, 0.1);
  c.strategy = StrategyKind::max_error;
  CHECK(run_online(c, stream, small_student()).ledger.teacher_calls == 200);
  c.strategy = StrategyKind::random;
  CHECK(run_online(c, stream, small_student()).ledger.teacher_calls == 4 * 5);
}

TEST_CASE("boundary flags mark windows where an activity starts") {
  const FrameStream stream = build_stream(small_stream(3, 100));
  const auto r = run_baseline(small_online(60, 0.1), stream, small_student());
  // Windows: [0,60) [60,120) [120,180) [180,240) [240,300)
  REQUIRE(r.records.size() == 5);
  CHECK(r.records[0].boundary);
  CHECK(r.records[1].boundary);
  CHECK_FALSE(r.records[2].boundary);
  CHECK(r.records[3].boundary);
  CHECK_FALSE(r.records[4].boundary);
}

TEST_CASE("determinism of full runs") {
  const FrameStream stream = build_stream(small_stream(2, 100));
  for (StrategyKind k : kAllStrategies) {
    OnlineConfig c = small_online(50, 0.2, 2);
    c.strategy = k;
    c.teacher = TeacherKind::noisy(1.0);
    const auto a = run_online(c, stream, small_student());
    const auto b = run_online(c, stream, small_student());
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].mpjpe_px == b.records[i].mpjpe_px);
      CHECK(a.records[i].ledger.train_sample_epochs == b.records[i].ledger.train_sample_epochs);
    }
  }
}

TEST_CASE("evaluation is against ground truth, never teacher labels") {
  // A very noisy teacher changes training but the window-0 score is the
  // pretrained model against true poses either way.
  const FrameStream stream = build_stream(small_stream(2, 100));
  const StudentModel m = small_student();
  OnlineConfig gt = small_online(50, 0.2);
  OnlineConfig noisy = gt;
  noisy.teacher = TeacherKind::noisy(10.0);
  const auto a = run_online(gt, stream, m);
  const auto b = run_online(noisy, stream, m);
  const double truth = evaluate(m, stream.range(0, 50));
  CHECK(a.records[0].mpjpe_px == truth);
  CHECK(b.records[0].mpjpe_px == truth);
}

TEST_CASE("errors: short stream and invalid config") {
  const FrameStream stream = build_stream(small_stream(1, 30));
  CHECK_THROWS_AS(run_online(small_online(31, 0.1), stream, small_student()), ConfigError);
  OnlineConfig c = small_online(40, 0.1);
  c.continual_interval = 31;
  CHECK_THROWS_AS(run_continual(c, stream, small_student()), ConfigError);
  CHECK_THROWS_AS(run_online(small_online(10, 0.0), stream, small_student()), ConfigError);
  CHECK_THROWS_AS(run_online(small_online(0, 0.1), stream, small_student()), ConfigError);
}

TEST_CASE("offline: split, rate 0 reference, full-rate degeneracy") {
  const FrameStream stream = build_stream(small_stream(3, 80));
  const auto corpora = make_offline_corpora(stream, 0.25);
  CHECK(corpora.train.size() == 180);
  CHECK(corpora.test.size() == 60);
  CHECK(corpora.train.front().index == 0);
  CHECK(corpora.test.front().index == 60);

  const StudentModel m = small_student();
  OnlineConfig c = small_online(50, 0.1, 2);
  const auto zero = run_offline(m, corpora.train, corpora.test, 0.0, StrategyKind::uniform, c);
  CHECK(zero.ledger.trainings == 0);
  CHECK(zero.mpjpe_px == evaluate(m, corpora.test));

  const auto ref = run_offline(m, corpora.train, corpora.test, 1.0, StrategyKind::uniform, c);
  CHECK(ref.ledger.trainings == 1);
  CHECK(ref.selected == 180);
  CHECK(ref.ledger.train_sample_epochs == 360);
  for (StrategyKind k : kAllStrategies) {
    const auto s = run_offline(m, corpora.train, corpora.test, 1.0, k, c);
    CHECK(s.mpjpe_px == ref.mpjpe_px);
  }
  const auto tenth = run_offline(m, corpora.train, corpora.test, 0.1, StrategyKind::random, c);
  CHECK(tenth.selected == 18);

  CHECK_THROWS_AS(run_offline(m, {}, corpora.test, 0.1, StrategyKind::uniform, c), ConfigError);
  CHECK_THROWS_AS(run_offline(m, corpora.train, corpora.test, 1.5, StrategyKind::uniform, c),
                  ConfigError);
}

TEST_CASE("mode names") {
  for (RunMode m : {RunMode::online, RunMode::continual, RunMode::baseline, RunMode::offline}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("batch"), ConfigError);
}
