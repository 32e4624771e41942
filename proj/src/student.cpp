#include "oad/student.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "oad/errors.hpp"

namespace oad {

StudentModel make_student(const StudentShape& shape, std::uint64_t seed) {
  require(shape.grid >= 2, "heatmap grid must be at least 2x2");
  require(shape.joints >= 1, "student needs at least one joint");
  require(shape.canvas_px > 0.0, "canvas must be positive");
  std::vector<std::size_t> dims{shape.input_dim};
  dims.insert(dims.end(), shape.hidden.begin(), shape.hidden.end());
  dims.push_back(shape.joints * shape.grid * shape.grid);
  Rng rng(derive_seed(seed, seed_tag::init));
  StudentModel model;
  model.params = numkit::make_mlp(dims, rng);
  model.joints = shape.joints;
  model.grid = shape.grid;
  model.canvas_px = shape.canvas_px;
  return model;
}

std::vector<double> render_target(const Pose& pose, std::size_t grid, double canvas_px) {
  const double cell = canvas_px / static_cast<double>(grid);
  const double inv_two_var = 1.0 / (2.0 * cell * cell);
  const std::size_t cells = grid * grid;
  std::vector<double> target(pose.joints() * cells);
  for (std::size_t j = 0; j < pose.joints(); ++j) {
    double* block = target.data() + j * cells;
    double total = 0.0;
    for (std::size_t row = 0; row < grid; ++row) {
      const double dy = (static_cast<double>(row) + 0.5) * cell - pose.y(j);
      for (std::size_t col = 0; col < grid; ++col) {
        const double dx = (static_cast<double>(col) + 0.5) * cell - pose.x(j);
        const double g = std::exp(-(dx * dx + dy * dy) * inv_two_var);
        block[row * grid + col] = g;
        total += g;
      }
    }
    for (std::size_t c = 0; c < cells; ++c) block[c] /= total;
  }
  return target;
}

Point2 soft_argmax(std::span<const double> block, std::size_t grid, double canvas_px) {
  require(block.size() == grid * grid, "heatmap block has the wrong number of cells");
  const double cell = canvas_px / static_cast<double>(grid);
  Point2 p;
  for (std::size_t row = 0; row < grid; ++row) {
    for (std::size_t col = 0; col < grid; ++col) {
      const double mass = block[row * grid + col];
      p.x += mass * (static_cast<double>(col) + 0.5) * cell;
      p.y += mass * (static_cast<double>(row) + 0.5) * cell;
    }
  }
  return p;
}

Prediction decode_logits(std::span<const double> logits, std::size_t joints, std::size_t grid,
                         double canvas_px) {
  const std::size_t cells = grid * grid;
  require(logits.size() == joints * cells, "logit count does not match joints x grid");
  const auto probs = numkit::block_softmax(logits, cells);
  const double max_entropy = std::log(static_cast<double>(cells));
  Prediction pred;
  pred.pose = Pose(joints);
  pred.confidence.resize(joints);
  pred.entropy.resize(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    const std::span<const double> block(probs.data() + j * cells, cells);
    const Point2 p = soft_argmax(block, grid, canvas_px);
    pred.pose.x(j) = p.x;
    pred.pose.y(j) = p.y;
    pred.confidence[j] = *std::max_element(block.begin(), block.end());
    double h = 0.0;
    for (double q : block) {
      if (q > 0.0) h -= q * std::log(q);
    }
    pred.entropy[j] = std::clamp(h / max_entropy, 0.0, 1.0);
  }
  return pred;
}

Prediction predict(const StudentModel& model, std::span<const double> features) {
  return decode_logits(numkit::mlp_logits(model.params, features), model.joints, model.grid,
                       model.canvas_px);
}

double uncertainty_score(const StudentModel& model, std::span<const double> features) {
  const Prediction pred = predict(model, features);
  return std::accumulate(pred.entropy.begin(), pred.entropy.end(), 0.0) /
         static_cast<double>(pred.entropy.size());
}

namespace {

struct PreparedSample {
  std::span<const double> features;
  std::vector<double> target;
};

std::vector<double> run_epochs(numkit::MlpParams& params, std::span<const PreparedSample> samples,
                               std::size_t cells, const TrainRecipe& recipe,
                               std::uint64_t seed) {
  require(recipe.batch_size >= 1, "batch size must be >= 1");
  numkit::AdamHyper hyper;
  hyper.learning_rate = recipe.learning_rate;
  numkit::AdamState adam = numkit::AdamState::fresh(params, hyper);
  numkit::MlpParams grads = numkit::zeros_like(params);

  std::vector<std::size_t> order(samples.size());
  std::vector<double> epoch_loss;
  for (std::size_t epoch = 0; epoch < recipe.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, seed_tag::shuffle, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += recipe.batch_size) {
      const std::size_t stop = std::min(order.size(), start + recipe.batch_size);
      grads.for_each([](double& g) { g = 0.0; });
      for (std::size_t b = start; b < stop; ++b) {
        const PreparedSample& s = samples[order[b]];
        const auto trace = numkit::mlp_forward(params, s.features);
        const auto probs = numkit::block_softmax(trace.logits(), cells);
        const auto lg = numkit::ce_loss_grad(probs, s.target);
        if (!std::isfinite(lg.loss)) throw NumericDomainError("training loss is not finite");
        loss_sum += lg.loss;
        numkit::mlp_backward_accumulate(params, trace, lg.dlogits, grads);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      grads.for_each([scale](double& g) { g *= scale; });
      numkit::adam_step(params, grads, adam);
    }
    epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return epoch_loss;
}

}  // namespace

TrainResult fine_tune(const StudentModel& model, std::span<const TrainingSample> batch,
                      const TrainRecipe& recipe, std::uint64_t seed) {
  require(!batch.empty(), "training batch is empty");
  std::vector<PreparedSample> prepared;
  prepared.reserve(batch.size());
  for (const auto& s : batch) {
    require(s.features.size() == model.input_dim(), "training sample has wrong feature count");
    require(s.label.joints() == model.joints, "training label has wrong joint count");
    prepared.push_back({s.features, render_target(s.label, model.grid, model.canvas_px)});
  }
  TrainResult result{model, {}};
  result.epoch_loss = run_epochs(result.model.params, prepared, model.cells(), recipe, seed);
  result.model.version = model.version + 1;
  return result;
}

StudentModel train_student(const StudentModel& model, std::span<const TrainingSample> batch,
                           const TrainRecipe& recipe, std::uint64_t seed) {
  return fine_tune(model, batch, recipe, seed).model;
}

StudentModel pretrain_student(const StudentShape& shape, std::span<const Frame> corpus,
                              const TrainRecipe& recipe, std::uint64_t seed) {
  require(!corpus.empty(), "pre-training corpus is empty");
  StudentModel model = make_student(shape, seed);
  std::vector<PreparedSample> prepared;
  prepared.reserve(corpus.size());
  for (const auto& f : corpus) {
    prepared.push_back({f.features, render_target(f.pose, model.grid, model.canvas_px)});
  }
  run_epochs(model.params, prepared, model.cells(), recipe, derive_seed(seed, seed_tag::pretrain));
  model.version = 0;
  return model;
}

void save_checkpoint(const StudentModel& model, std::ostream& out) {
  char buf[40];
  out << "oad-student 1\n";
  out << "joints " << model.joints << " grid " << model.grid << " version " << model.version
      << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", model.canvas_px);
  out << "canvas " << buf << '\n';
  out << "layers " << model.params.layers.size() << '\n';
  auto write_row = [&](const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  };
  for (const auto& layer : model.params.layers) {
    out << "layer " << layer.in << ' ' << layer.out << '\n';
    write_row(layer.weight);
    write_row(layer.bias);
  }
  if (!out) throw IoError("failed to write checkpoint");
}

StudentModel load_checkpoint(std::istream& in) {
  auto expect = [&](const char* word) {
    std::string token;
    if (!(in >> token) || token != word) {
      throw IoError(std::string("checkpoint: expected '") + word + "'");
    }
  };
  StudentModel model;
  std::size_t format = 0;
  std::size_t layers = 0;
  expect("oad-student");
  if (!(in >> format) || format != 1) throw IoError("checkpoint: unsupported format version");
  expect("joints");
  in >> model.joints;
  expect("grid");
  in >> model.grid;
  expect("version");
  in >> model.version;
  expect("canvas");
  in >> model.canvas_px;
  expect("layers");
  in >> layers;
  if (!in) throw IoError("checkpoint: malformed header");
  for (std::size_t l = 0; l < layers; ++l) {
    numkit::Layer layer;
    expect("layer");
    in >> layer.in >> layer.out;
    if (!in) throw IoError("checkpoint: malformed layer header");
    layer.weight.resize(layer.in * layer.out);
    layer.bias.resize(layer.out);
    for (double& w : layer.weight) in >> w;
    for (double& b : layer.bias) in >> b;
    if (!in) throw IoError("checkpoint: truncated layer " + std::to_string(l));
    model.params.layers.push_back(std::move(layer));
  }
  model.params.validate();
  require(model.params.output_dim() == model.joints * model.grid * model.grid,
          "checkpoint output width does not match joints x grid");
  return model;
}

}  // namespace oad
