#pragma once

#include <cstdint>
#include <string>

#include "oad/streamgen.hpp"

namespace oad {

/// Label source for distillation: exact ground truth, or ground truth plus
/// iid isotropic Gaussian pixel noise (a stand-in for a heavyweight pose
/// network with a known average error).
struct TeacherKind {
  enum class Variant { ground_truth, noisy_oracle };

  Variant variant = Variant::ground_truth;
  double sigma_px = 0.0;

  static TeacherKind ground_truth() { return {}; }
  /// Throws ContractViolation if sigma is negative.
  static TeacherKind noisy(double sigma_px);

  bool is_ground_truth() const { return variant == Variant::ground_truth; }
  /// "gt" or "noisy".
  std::string name() const;
};

/// Noise sigma whose expected per-joint error E||N(0, s^2 I_2)|| = s sqrt(pi/2)
/// equals `target_mpjpe_px`.
double sigma_for_mpjpe(double target_mpjpe_px);

/// Label for one frame. Noise is keyed by (seed, frame.index) so labels do not
/// depend on call order. Noisy labels are clamped to [0, canvas].
Pose teacher_label(const Frame& frame, const TeacherKind& kind, std::uint64_t seed,
                   double canvas_px);

}  // namespace oad
