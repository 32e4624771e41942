#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oad/errors.hpp"
#include "oad/query.hpp"

using namespace oad;

namespace {

StudentShape tiny_shape() {
  StudentShape s;
  s.input_dim = 4;
  s.joints = 2;
  s.grid = 4;
  s.canvas_px = 32;
  s.hidden = {8};
  return s;
}

std::vector<Frame> random_window(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Frame> frames(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames[i].index = 1000 + i;
    frames[i].features.resize(4);
    for (double& v : frames[i].features) v = rng.uniform(-1, 1);
    frames[i].pose = Pose(2);
    for (double& c : frames[i].pose.xy) c = rng.uniform(4, 28);
  }
  return frames;
}

void check_selection_shape(const std::vector<std::size_t>& idx, std::size_t n, std::size_t k) {
  REQUIRE(idx.size() == k);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    CHECK(idx[i] < n);
    if (i) CHECK(idx[i] > idx[i - 1]);
  }
}

}  // namespace

TEST_CASE("strategy names parse exactly") {
  for (StrategyKind k : kAllStrategies) CHECK(parse_strategy(to_string(k)) == k);
  CHECK(to_string(StrategyKind::max_error) == "error");
  CHECK(to_string(StrategyKind::max_uncertainty) == "uncertainty");
  CHECK_THROWS_WITH_AS(parse_strategy("maxerr"), "unknown strategy 'maxerr'", ConfigError);
  CHECK_THROWS_AS(parse_strategy("Uniform"), ConfigError);
}

TEST_CASE("budget arithmetic") {
  CHECK(budget(0.01, 1500) == 15);
  CHECK(budget(1.0, 7) == 7);
  CHECK(budget(0.001, 100) == 1);
  CHECK(budget(0.05, 400) == 20);
  CHECK(budget(0.015, 100) == 2);  // half rounds up
  CHECK(budget(0.2, 400) == 80);
  CHECK_THROWS_AS(budget(0.0, 10), ContractViolation);
  CHECK_THROWS_AS(budget(1.5, 10), ContractViolation);
  CHECK_THROWS_AS(budget(-0.1, 10), ContractViolation);
}

TEST_CASE("uniform selection strides") {
  CHECK(select_uniform(10, 2) == std::vector<std::size_t>{0, 5});
  CHECK(select_uniform(7, 3) == std::vector<std::size_t>{0, 2, 4});
  std::vector<std::size_t> all(9);
  std::iota(all.begin(), all.end(), std::size_t{0});
  CHECK(select_uniform(9, 9) == all);
  const auto stride = select_uniform(1500, 15);
  for (std::size_t j = 0; j < 15; ++j) CHECK(stride[j] == 100 * j);
  CHECK_THROWS_AS(select_uniform(3, 4), ContractViolation);
  CHECK_THROWS_AS(select_uniform(3, 0), ContractViolation);
}

TEST_CASE("random selection: full budget, determinism, shape") {
  Rng a(5), b(5);
  std::vector<std::size_t> all(12);
  std::iota(all.begin(), all.end(), std::size_t{0});
  CHECK(select_random(12, 12, a) == all);
  Rng c(77), d(77);
  const auto first = select_random(100, 10, c);
  CHECK(first == select_random(100, 10, d));
  check_selection_shape(first, 100, 10);
  CHECK_THROWS_AS(select_random(3, 4, a), ContractViolation);
}

TEST_CASE("random selection is uniform over indices (Monte Carlo)") {
  // 10,000 draws of one index out of 10: each count is Binomial(10000, 0.1)
  // with sd 30, so +-150 is a 5-sigma band.
  Rng rng(2024);
  std::vector<int> counts(10, 0);
  for (int trial = 0; trial < 10000; ++trial) counts[select_random(10, 1, rng)[0]] += 1;
  for (int c : counts) {
    CHECK(c >= 850);
    CHECK(c <= 1150);
  }
}

TEST_CASE("select_top: order, ties, full budget, scale invariance") {
  CHECK(select_top(std::vector<double>{3, 1, 2}, 2) == std::vector<std::size_t>{0, 2});
  CHECK(select_top(std::vector<double>{4, 4, 4, 4}, 2) == std::vector<std::size_t>{0, 1});
  CHECK(select_top(std::vector<double>{1, 5, 5, 2}, 2) == std::vector<std::size_t>{1, 2});
  CHECK(select_top(std::vector<double>{0.1, 0.3}, 2) == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(select_top(std::vector<double>{1}, 2), ContractViolation);

  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t k = 1 + rng.below(n);
    std::vector<double> s(n);
    // Coarse values so ties actually occur.
    for (double& v : s) v = static_cast<double>(rng.below(6));
    const auto base = select_top(s, k);
    check_selection_shape(base, n, k);
    const double c = rng.uniform(0.1, 50.0);
    std::vector<double> scaled = s;
    for (double& v : scaled) v *= c;
    CHECK(select_top(scaled, k) == base);
    // Every selected score dominates every unselected one.
    const std::set<std::size_t> chosen(base.begin(), base.end());
    double min_in = 1e300, max_out = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen.count(i)) min_in = std::min(min_in, s[i]);
      else max_out = std::max(max_out, s[i]);
    }
    CHECK(min_in >= max_out);
  }
}

TEST_CASE("score_error: zero, 3-4-5, permutation equivariance") {
  StudentShape shape = tiny_shape();
  shape.joints = 1;
  const StudentModel m = make_student(shape, 4);
  auto frames = random_window(5, 9);
  for (auto& f : frames) f.pose = Pose(1);
  std::vector<Pose> labels;
  for (const auto& f : frames) labels.push_back(predict(m, f.features).pose);
  for (double s : score_error(m, frames, labels)) CHECK(s == 0.0);

  labels[2].x(0) += 3.0;
  labels[2].y(0) += 4.0;
  const auto scores = score_error(m, frames, labels);
  CHECK(scores[2] == doctest::Approx(5.0).epsilon(1e-12));

  std::vector<Frame> rev(frames.rbegin(), frames.rend());
  std::vector<Pose> rev_labels(labels.rbegin(), labels.rend());
  const auto rev_scores = score_error(m, rev, rev_labels);
  for (std::size_t i = 0; i < 5; ++i) CHECK(rev_scores[4 - i] == scores[i]);

  labels.pop_back();
  CHECK_THROWS_AS(score_error(m, frames, labels), ContractViolation);
}

TEST_CASE("select dispatch: uniform on a 1500-frame window") {
  const StudentModel m = make_student(tiny_shape(), 1);
  std::vector<Frame> window(1500);
  for (std::size_t i = 0; i < window.size(); ++i) window[i].index = i;
  Rng rng(0);
  const Selection sel = select(StrategyKind::uniform, window, budget(0.01, 1500), m, nullptr, rng);
  REQUIRE(sel.indices.size() == 15);
  for (std::size_t j = 0; j < 15; ++j) CHECK(sel.indices[j] == 100 * j);
  CHECK(sel.teacher_calls == 0);
  CHECK(sel.scores.empty());
}

TEST_CASE("select dispatch: uncertainty picks a maximal-entropy frame") {
  // Zero input weights on a zero-bias trunk leave a frame with all-zero
  // features at exactly zero logits (entropy 1) when the output bias is 0.
  StudentModel m = make_student(tiny_shape(), 6);
  auto& out = m.params.layers.back();
  std::fill(out.bias.begin(), out.bias.end(), 0.0);
  for (std::size_t c = 0; c < out.weight.size(); ++c) out.weight[c] *= 4.0;
  auto window = random_window(30, 3);
  window[17].features.assign(4, 0.0);
  Rng rng(0);
  for (std::size_t k : {1u, 3u, 10u}) {
    const Selection sel = select(StrategyKind::max_uncertainty, window, k, m, nullptr, rng);
    CHECK(std::find(sel.indices.begin(), sel.indices.end(), 17) != sel.indices.end());
    CHECK(sel.teacher_calls == 0);
    CHECK(sel.scores[17] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("select dispatch: teacher accounting and shapes for every strategy") {
  const StudentModel m = make_student(tiny_shape(), 2);
  const auto window = random_window(50, 4);
  std::size_t calls = 0;
  LabelFn teacher = [&calls](const Frame& f) {
    ++calls;
    return f.pose;
  };
  for (StrategyKind kind : kAllStrategies) {
    calls = 0;
    Rng rng(12);
    const Selection sel = select(kind, window, 7, m, teacher, rng);
    check_selection_shape(sel.indices, 50, 7);
    if (kind == StrategyKind::max_error) {
      CHECK(sel.teacher_calls == 50);
      CHECK(calls == 50);
    } else {
      CHECK(sel.teacher_calls == 0);
      CHECK(calls == 0);
    }
    Rng again(12);
    CHECK(select(kind, window, 7, m, teacher, again).indices == sel.indices);
  }
  Rng rng(1);
  CHECK_THROWS_AS(select(StrategyKind::uniform, window, 51, m, teacher, rng), ContractViolation);
}

TEST_CASE("uniform at full rate is the identity") {
  for (std::size_t n : {1u, 5u, 400u}) {
    const auto idx = select_uniform(n, budget(1.0, n));
    for (std::size_t i = 0; i < n; ++i) CHECK(idx[i] == i);
  }
}
