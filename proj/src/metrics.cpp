#include "oad/metrics.hpp"

#include <cmath>

#include "oad/errors.hpp"

namespace oad {

double joint_error_sum(const Pose& predicted, const Pose& reference) {
  require(predicted.xy.size() == reference.xy.size(), "poses differ in joint count");
  double total = 0.0;
  for (std::size_t j = 0; j < predicted.joints(); ++j) {
    total += std::hypot(predicted.x(j) - reference.x(j), predicted.y(j) - reference.y(j));
  }
  return total;
}

double mpjpe(std::span<const Pose> predicted, std::span<const Pose> reference) {
  require(predicted.size() == reference.size(), "pose sets differ in frame count");
  require(!predicted.empty(), "mpjpe of an empty pose set");
  double total = 0.0;
  std::size_t joints = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    total += joint_error_sum(predicted[i], reference[i]);
    joints += predicted[i].joints();
  }
  require(joints > 0, "mpjpe over zero joints");
  return total / static_cast<double>(joints);
}

}  // namespace oad
