#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oad/rng.hpp"

namespace oad::numkit {

/// Dense affine layer. `weight` is row-major out x in.
struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  double& w(std::size_t row, std::size_t col) { return weight[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weight[row * in + col]; }
};

/// Multilayer perceptron: tanh on every hidden layer, identity on the last.
/// The same type carries gradients and Adam moments (shape-alike buffers).
struct MlpParams {
  std::vector<Layer> layers;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t parameter_count() const;

  /// Throws ContractViolation if dimensions do not chain or a buffer has the
  /// wrong length, NumericDomainError if any entry is non-finite.
  void validate() const;

  /// Visits every scalar (weights then bias, layer by layer).
  void for_each(const std::function<void(double&)>& fn);
};

/// Xavier-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// `dims` lists layer widths from input to output (at least two entries).
MlpParams make_mlp(std::span<const std::size_t> dims, Rng& rng);

/// Same shapes as `like`, every entry zero.
MlpParams zeros_like(const MlpParams& like);

struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;  // W a + b, per layer
  std::vector<std::vector<double>> act;  // tanh(pre) on hidden layers, pre on the last

  const std::vector<double>& logits() const { return act.back(); }
};

ForwardTrace mlp_forward(const MlpParams& params, std::span<const double> x);

/// Logits only; skips the trace copies. Bit-identical to mlp_forward().logits().
std::vector<double> mlp_logits(const MlpParams& params, std::span<const double> x);

/// Softmax applied independently to each contiguous block of `block_size`.
std::vector<double> block_softmax(std::span<const double> logits, std::size_t block_size);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> dlogits;
};

/// Cross-entropy -sum t ln p, with its gradient with respect to the logits
/// that produced `probs` through a block softmax (p - t).
LossGrad ce_loss_grad(std::span<const double> probs, std::span<const double> targets);

/// Reverse-mode gradients for the scalar loss whose logit gradient is
/// `dlogits`.
MlpParams mlp_backward(const MlpParams& params, const ForwardTrace& trace,
                       std::span<const double> dlogits);

/// As mlp_backward, but adds into `grads` (which must be shaped like
/// `params`). Used by minibatch loops to avoid reallocating.
void mlp_backward_accumulate(const MlpParams& params, const ForwardTrace& trace,
                             std::span<const double> dlogits, MlpParams& grads);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
};

struct AdamState {
  MlpParams m;
  MlpParams v;
  std::uint64_t step = 0;
  AdamHyper hyper;

  static AdamState fresh(const MlpParams& like, AdamHyper hyper = {});
};

/// One bias-corrected Adam step, in the form
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   alpha_t = lr * sqrt(1 - b2^t) / (1 - b1^t),
///   p <- p - alpha_t * m / (sqrt(v) + eps).
/// Throws NumericDomainError on a non-finite gradient (params untouched).
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state);

/// One labelled example for the gradient checker: the loss is
/// ce(block_softmax(f(input)), target).
struct GradSample {
  std::vector<double> input;
  std::vector<double> target;
  std::size_t block_size = 1;
};

/// Scalar loss of `params` on `sample`.
double sample_loss(const MlpParams& params, const GradSample& sample);

/// Analytic gradient provider; defaults to the library's backward pass.
using GradientFn = std::function<MlpParams(const MlpParams&, const GradSample&)>;

MlpParams analytic_gradient(const MlpParams& params, const GradSample& sample);

/// Max over parameters of |a - n| / max(1e-8, |a| + |n|) where n is the
/// central difference with step h.
double grad_check(const MlpParams& params, const GradSample& sample, double h = 1e-4,
                  const GradientFn& gradient = analytic_gradient);

struct GradCheckFixture {
  MlpParams params;
  GradSample sample;
};

/// Fixed suite: `models` random small networks (1-2 hidden layers, at most a
/// few hundred parameters) with `samples_per_model` random samples each.
std::vector<GradCheckFixture> gradcheck_fixtures(std::uint64_t seed = 2024,
                                                 std::size_t models = 10,
                                                 std::size_t samples_per_model = 3);

/// Worst grad_check error over a fixture suite.
double gradcheck_suite(std::span<const GradCheckFixture> fixtures, double h = 1e-4,
                       const GradientFn& gradient = analytic_gradient);

}  // namespace oad::numkit
