#include "oad/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oad/errors.hpp"

namespace oad::numkit {

std::size_t MlpParams::input_dim() const { return layers.empty() ? 0 : layers.front().in; }

std::size_t MlpParams::output_dim() const { return layers.empty() ? 0 : layers.back().out; }

std::size_t MlpParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) count += layer.weight.size() + layer.bias.size();
  return count;
}

void MlpParams::validate() const {
  require(!layers.empty(), "mlp has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    require(layer.in > 0 && layer.out > 0, "layer " + std::to_string(l) + " has a zero dimension");
    require(layer.weight.size() == layer.in * layer.out,
            "layer " + std::to_string(l) + " weight buffer has wrong size");
    require(layer.bias.size() == layer.out,
            "layer " + std::to_string(l) + " bias buffer has wrong size");
    if (l > 0) {
      require(layers[l - 1].out == layer.in,
              "layer " + std::to_string(l) + " input does not match previous output");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weight.begin(), layer.weight.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw NumericDomainError("layer " + std::to_string(l) + " has a non-finite entry");
    }
  }
}

void MlpParams::for_each(const std::function<void(double&)>& fn) {
  for (auto& layer : layers) {
    for (double& w : layer.weight) fn(w);
    for (double& b : layer.bias) fn(b);
  }
}

MlpParams make_mlp(std::span<const std::size_t> dims, Rng& rng) {
  require(dims.size() >= 2, "mlp needs at least an input and an output width");
  MlpParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    require(layer.in > 0 && layer.out > 0, "mlp widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    layer.weight.resize(layer.in * layer.out);
    for (double& w : layer.weight) w = rng.uniform(-limit, limit);
    layer.bias.assign(layer.out, 0.0);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams zeros_like(const MlpParams& like) {
  MlpParams zeros = like;
  zeros.for_each([](double& v) { v = 0.0; });
  return zeros;
}

namespace {

void affine(const Layer& layer, std::span<const double> in, std::vector<double>& out) {
  out.resize(layer.out);
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double* row = layer.weight.data() + r * layer.in;
    double acc = 0.0;
    for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * in[c];
    out[r] = acc + layer.bias[r];
  }
}

void check_input(const MlpParams& params, std::span<const double> x) {
  require(!params.layers.empty(), "mlp has no layers");
  require(x.size() == params.input_dim(),
          "input has " + std::to_string(x.size()) + " entries, mlp expects " +
              std::to_string(params.input_dim()));
}

}  // namespace

ForwardTrace mlp_forward(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  ForwardTrace trace;
  trace.input.assign(x.begin(), x.end());
  trace.pre.resize(params.layers.size());
  trace.act.resize(params.layers.size());
  std::span<const double> current = trace.input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    affine(params.layers[l], current, trace.pre[l]);
    trace.act[l] = trace.pre[l];
    if (l + 1 < params.layers.size()) {
      for (double& a : trace.act[l]) a = std::tanh(a);
    }
    current = trace.act[l];
  }
  return trace;
}

std::vector<double> mlp_logits(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    affine(params.layers[l], a, next);
    if (l + 1 < params.layers.size()) {
      for (double& v : next) v = std::tanh(v);
    }
    std::swap(a, next);
  }
  return a;
}

std::vector<double> block_softmax(std::span<const double> logits, std::size_t block_size) {
  require(block_size > 0, "softmax block size must be positive");
  require(logits.size() % block_size == 0,
          "logit count " + std::to_string(logits.size()) + " is not a multiple of block size " +
              std::to_string(block_size));
  std::vector<double> probs(logits.size());
  for (std::size_t start = 0; start < logits.size(); start += block_size) {
    const auto block = logits.subspan(start, block_size);
    const double peak = *std::max_element(block.begin(), block.end());
    double total = 0.0;
    for (std::size_t i = 0; i < block_size; ++i) {
      probs[start + i] = std::exp(block[i] - peak);
      total += probs[start + i];
    }
    for (std::size_t i = 0; i < block_size; ++i) probs[start + i] /= total;
  }
  return probs;
}

LossGrad ce_loss_grad(std::span<const double> probs, std::span<const double> targets) {
  require(probs.size() == targets.size(), "probabilities and targets differ in length");
  LossGrad out;
  out.dlogits.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) {
      throw NumericDomainError("cross-entropy needs strictly positive probabilities (entry " +
                               std::to_string(i) + ")");
    }
    if (targets[i] != 0.0) out.loss -= targets[i] * std::log(probs[i]);
    out.dlogits[i] = probs[i] - targets[i];
  }
  return out;
}

void mlp_backward_accumulate(const MlpParams& params, const ForwardTrace& trace,
                             std::span<const double> dlogits, MlpParams& grads) {
  const std::size_t depth = params.layers.size();
  require(depth > 0, "mlp has no layers");
  require(trace.pre.size() == depth && trace.act.size() == depth,
          "trace does not belong to this mlp");
  require(grads.layers.size() == depth, "gradient buffer does not match mlp");
  require(dlogits.size() == params.output_dim(), "dlogits length does not match mlp output");
  require(trace.input.size() == params.input_dim(), "trace input does not match mlp");

  std::vector<double> delta(dlogits.begin(), dlogits.end());
  std::vector<double> upstream;
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = params.layers[l];
    Layer& grad = grads.layers[l];
    require(trace.act[l].size() == layer.out, "trace does not belong to this mlp");
    require(grad.weight.size() == layer.weight.size() && grad.bias.size() == layer.bias.size(),
            "gradient buffer does not match mlp");
    const std::vector<double>& below = l == 0 ? trace.input : trace.act[l - 1];

    for (std::size_t r = 0; r < layer.out; ++r) {
      const double d = delta[r];
      grad.bias[r] += d;
      if (d == 0.0) continue;
      double* row = grad.weight.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) row[c] += d * below[c];
    }
    if (l == 0) break;

    upstream.assign(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      const double* row = layer.weight.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) upstream[c] += row[c] * d;
    }
    // below holds tanh activations here: d tanh = 1 - a^2.
    for (std::size_t c = 0; c < layer.in; ++c) upstream[c] *= 1.0 - below[c] * below[c];
    std::swap(delta, upstream);
  }
}

MlpParams mlp_backward(const MlpParams& params, const ForwardTrace& trace,
                       std::span<const double> dlogits) {
  MlpParams grads = zeros_like(params);
  mlp_backward_accumulate(params, trace, dlogits, grads);
  return grads;
}

AdamState AdamState::fresh(const MlpParams& like, AdamHyper hyper) {
  AdamState state;
  state.m = zeros_like(like);
  state.v = zeros_like(like);
  state.hyper = hyper;
  return state;
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state) {
  const std::size_t depth = params.layers.size();
  require(grads.layers.size() == depth && state.m.layers.size() == depth &&
              state.v.layers.size() == depth,
          "adam buffers do not match parameters");
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& p = params.layers[l];
    const auto& g = grads.layers[l];
    require(g.weight.size() == p.weight.size() && g.bias.size() == p.bias.size() &&
                state.m.layers[l].weight.size() == p.weight.size() &&
                state.v.layers[l].weight.size() == p.weight.size() &&
                state.m.layers[l].bias.size() == p.bias.size() &&
                state.v.layers[l].bias.size() == p.bias.size(),
            "adam buffers do not match parameters");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(g.weight.begin(), g.weight.end(), finite) ||
        !std::all_of(g.bias.begin(), g.bias.end(), finite)) {
      throw NumericDomainError("non-finite gradient in layer " + std::to_string(l));
    }
  }

  const AdamHyper& h = state.hyper;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double alpha =
      h.learning_rate * std::sqrt(1.0 - std::pow(h.beta2, t)) / (1.0 - std::pow(h.beta1, t));

  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
      p[i] -= alpha * m[i] / (std::sqrt(v[i]) + h.epsilon);
    }
  };
  for (std::size_t l = 0; l < depth; ++l) {
    update(params.layers[l].weight, grads.layers[l].weight, state.m.layers[l].weight,
           state.v.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, state.m.layers[l].bias,
           state.v.layers[l].bias);
  }
}

double sample_loss(const MlpParams& params, const GradSample& sample) {
  const auto probs = block_softmax(mlp_logits(params, sample.input), sample.block_size);
  return ce_loss_grad(probs, sample.target).loss;
}

MlpParams analytic_gradient(const MlpParams& params, const GradSample& sample) {
  const auto trace = mlp_forward(params, sample.input);
  const auto probs = block_softmax(trace.logits(), sample.block_size);
  const auto lg = ce_loss_grad(probs, sample.target);
  return mlp_backward(params, trace, lg.dlogits);
}

double grad_check(const MlpParams& params, const GradSample& sample, double h,
                  const GradientFn& gradient) {
  MlpParams analytic = gradient(params, sample);
  MlpParams probe = params;

  std::vector<double*> probe_entries;
  probe.for_each([&](double& v) { probe_entries.push_back(&v); });
  std::vector<double> analytic_entries;
  analytic.for_each([&](double& v) { analytic_entries.push_back(v); });
  require(analytic_entries.size() == probe_entries.size(),
          "gradient provider returned the wrong shape");

  double worst = 0.0;
  for (std::size_t i = 0; i < probe_entries.size(); ++i) {
    double& entry = *probe_entries[i];
    const double saved = entry;
    entry = saved + h;
    const double up = sample_loss(probe, sample);
    entry = saved - h;
    const double down = sample_loss(probe, sample);
    entry = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic_entries[i];
    const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

std::vector<GradCheckFixture> gradcheck_fixtures(std::uint64_t seed, std::size_t models,
                                                 std::size_t samples_per_model) {
  std::vector<GradCheckFixture> fixtures;
  for (std::size_t m = 0; m < models; ++m) {
    Rng rng(derive_seed(seed, seed_tag::init, m));
    const std::size_t block = 2 + rng.below(4);
    const std::size_t blocks = 1 + rng.below(3);
    std::vector<std::size_t> dims{2 + rng.below(5)};
    const std::size_t hidden_layers = 1 + rng.below(2);
    for (std::size_t h = 0; h < hidden_layers; ++h) dims.push_back(3 + rng.below(6));
    dims.push_back(block * blocks);
    MlpParams params = make_mlp(dims, rng);
    // Non-zero biases so every code path carries signal.
    for (auto& layer : params.layers) {
      for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
    }
    for (std::size_t s = 0; s < samples_per_model; ++s) {
      GradSample sample;
      sample.block_size = block;
      sample.input.resize(dims.front());
      for (double& x : sample.input) x = rng.uniform(-1.0, 1.0);
      sample.target.resize(block * blocks);
      for (std::size_t b = 0; b < blocks; ++b) {
        double total = 0.0;
        for (std::size_t i = 0; i < block; ++i) {
          sample.target[b * block + i] = rng.uniform(0.05, 1.0);
          total += sample.target[b * block + i];
        }
        for (std::size_t i = 0; i < block; ++i) sample.target[b * block + i] /= total;
      }
      fixtures.push_back({params, std::move(sample)});
    }
  }
  return fixtures;
}

double gradcheck_suite(std::span<const GradCheckFixture> fixtures, double h,
                       const GradientFn& gradient) {
  double worst = 0.0;
  for (const auto& f : fixtures) worst = std::max(worst, grad_check(f.params, f.sample, h, gradient));
  return worst;
}

}  // namespace oad::numkit
