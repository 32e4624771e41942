#include <doctest.h>

#include <cmath>

#include "oad/errors.hpp"
#include "oad/teacher.hpp"

using namespace oad;

namespace {
Frame sample_frame(std::uint64_t index, std::size_t joints = 8) {
  Frame f;
  f.index = index;
  f.pose = Pose(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    f.pose.x(j) = 30.0 + 7.0 * j;
    f.pose.y(j) = 90.0 - 5.0 * j;
  }
  return f;
}
}  // namespace

TEST_CASE("ground truth and zero-sigma oracle return the pose exactly") {
  const Frame f = sample_frame(3);
  CHECK(teacher_label(f, TeacherKind::ground_truth(), 1, 128) == f.pose);
  CHECK(teacher_label(f, TeacherKind::noisy(0.0), 1, 128) == f.pose);
}

TEST_CASE("sigma_for_mpjpe closed form") {
  CHECK(sigma_for_mpjpe(0.0) == 0.0);
  CHECK(sigma_for_mpjpe(7.87) == doctest::Approx(6.2794).epsilon(1e-3 / 6.2794));
  CHECK(sigma_for_mpjpe(1.2533) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(sigma_for_mpjpe(-1.0), ContractViolation);
  CHECK_THROWS_AS(TeacherKind::noisy(-0.5), ContractViolation);
}

TEST_CASE("noisy oracle is calibrated (Monte Carlo, 20,000 joints)") {
  // E||N(0, s^2 I_2)|| = s sqrt(pi/2): the empirical mean distance must land
  // within 2% of the target for every calibrated level.
  for (double target : {7.87, 4.0, 1.0}) {
    const TeacherKind kind = TeacherKind::noisy(sigma_for_mpjpe(target));
    double total = 0.0;
    std::size_t joints = 0;
    for (std::uint64_t i = 0; i < 2500; ++i) {
      const Frame f = sample_frame(i);
      const Pose label = teacher_label(f, kind, 77, 128.0);
      for (std::size_t j = 0; j < 8; ++j) {
        total += std::hypot(label.x(j) - f.pose.x(j), label.y(j) - f.pose.y(j));
        ++joints;
      }
    }
    CHECK(joints == 20000);
    CHECK(total / joints == doctest::Approx(target).epsilon(0.02));
  }
}

TEST_CASE("labels are keyed by (seed, frame index), not call order") {
  const TeacherKind kind = TeacherKind::noisy(3.0);
  const Frame a = sample_frame(10), b = sample_frame(11);
  const Pose la = teacher_label(a, kind, 5, 128);
  const Pose lb = teacher_label(b, kind, 5, 128);
  CHECK(teacher_label(b, kind, 5, 128) == lb);
  CHECK(teacher_label(a, kind, 5, 128) == la);
  CHECK(la != teacher_label(a, kind, 6, 128));
}

TEST_CASE("noisy labels are clamped to the canvas") {
  Frame f = sample_frame(0, 1);
  f.pose.x(0) = 0.5;
  f.pose.y(0) = 127.5;
  const TeacherKind kind = TeacherKind::noisy(50.0);
  for (std::uint64_t i = 0; i < 200; ++i) {
    f.index = i;
    const Pose label = teacher_label(f, kind, 1, 128.0);
    CHECK(label.x(0) >= 0.0);
    CHECK(label.y(0) <= 128.0);
  }
}
