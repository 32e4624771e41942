#include "oad/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oad/errors.hpp"

namespace oad {

TeacherKind TeacherKind::noisy(double sigma_px) {
  require(sigma_px >= 0.0, "teacher noise sigma must be >= 0");
  return {Variant::noisy_oracle, sigma_px};
}

std::string TeacherKind::name() const { return is_ground_truth() ? "gt" : "noisy"; }

double sigma_for_mpjpe(double target_mpjpe_px) {
  require(target_mpjpe_px >= 0.0, "target MPJPE must be >= 0");
  return target_mpjpe_px / std::sqrt(std::numbers::pi / 2.0);
}

Pose teacher_label(const Frame& frame, const TeacherKind& kind, std::uint64_t seed,
                   double canvas_px) {
  if (kind.is_ground_truth() || kind.sigma_px == 0.0) return frame.pose;
  Rng rng(derive_seed(seed, seed_tag::teacher, frame.index));
  Pose label = frame.pose;
  for (double& c : label.xy) c = std::clamp(c + kind.sigma_px * rng.normal(), 0.0, canvas_px);
  return label;
}

}  // namespace oad
