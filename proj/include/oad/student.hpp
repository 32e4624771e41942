#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "oad/numkit.hpp"
#include "oad/streamgen.hpp"

namespace oad {

struct StudentShape {
  std::size_t input_dim = 32;
  std::size_t joints = 8;
  std::size_t grid = 16;
  double canvas_px = 128.0;
  std::vector<std::size_t> hidden{64, 64};
};

/// Dense trunk emitting J heatmaps of G x G logits. Cell c = row * G + col,
/// centred at ((col + 0.5) * canvas / G, (row + 0.5) * canvas / G).
struct StudentModel {
  numkit::MlpParams params;
  std::size_t joints = 0;
  std::size_t grid = 0;
  double canvas_px = 0.0;
  std::uint64_t version = 0;

  std::size_t cells() const { return grid * grid; }
  double cell_px() const { return canvas_px / static_cast<double>(grid); }
  std::size_t input_dim() const { return params.input_dim(); }
};

StudentModel make_student(const StudentShape& shape, std::uint64_t seed);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Prediction {
  Pose pose;
  std::vector<double> confidence;  // peak cell probability per joint
  std::vector<double> entropy;     // heatmap entropy / ln(G^2) per joint
};

/// Gaussian heatmaps (sigma = one cell) around each joint, each block
/// normalised to sum 1.
std::vector<double> render_target(const Pose& pose, std::size_t grid, double canvas_px);

/// Probability-weighted mean of cell centres.
Point2 soft_argmax(std::span<const double> block, std::size_t grid, double canvas_px);

/// Decodes raw logits (J blocks of G^2) the same way predict() does.
Prediction decode_logits(std::span<const double> logits, std::size_t joints, std::size_t grid,
                         double canvas_px);

Prediction predict(const StudentModel& model, std::span<const double> features);

/// Mean normalised heatmap entropy over joints, in [0, 1].
double uncertainty_score(const StudentModel& model, std::span<const double> features);

struct TrainingSample {
  std::vector<double> features;
  Pose label;
};

struct TrainRecipe {
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
};

struct TrainResult {
  StudentModel model;
  std::vector<double> epoch_loss;  // mean per-sample loss seen during each epoch
};

/// Warm-started fine-tuning on a copy of `model`: targets rendered once,
/// seeded shuffle per epoch, minibatch cross-entropy summed over joints,
/// fresh Adam state. The result has version + 1; `model` is not touched.
TrainResult fine_tune(const StudentModel& model, std::span<const TrainingSample> batch,
                      const TrainRecipe& recipe, std::uint64_t seed);

StudentModel train_student(const StudentModel& model, std::span<const TrainingSample> batch,
                           const TrainRecipe& recipe, std::uint64_t seed);

/// Fresh model trained on ground-truth labels of `corpus`; version 0.
StudentModel pretrain_student(const StudentShape& shape, std::span<const Frame> corpus,
                              const TrainRecipe& recipe, std::uint64_t seed);

/// Text checkpoint; layout documented in README ("Checkpoint format").
void save_checkpoint(const StudentModel& model, std::ostream& out);
StudentModel load_checkpoint(std::istream& in);

}  // namespace oad
