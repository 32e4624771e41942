#pragma once

#include <span>

#include "oad/streamgen.hpp"

namespace oad {

/// Mean per-joint position error in pixels: mean over frames and joints of
/// the Euclidean distance between corresponding joints.
double mpjpe(std::span<const Pose> predicted, std::span<const Pose> reference);

/// Sum of per-joint distances for one frame (helper for streaming means).
double joint_error_sum(const Pose& predicted, const Pose& reference);

}  // namespace oad
