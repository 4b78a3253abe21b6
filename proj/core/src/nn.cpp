#include "latact/nn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "latact/rng.hpp"

namespace latact {

EncoderSpec::EncoderSpec(int input_dim_, std::vector<LayerSpec> layers_)
    : input_dim(input_dim_), layers(std::move(layers_)) {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (layers.empty()) throw std::invalid_argument("encoder needs >= 1 layer");
  int prev = input_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.in_dim < 1 || l.out_dim < 1) {
      throw std::invalid_argument("layer " + std::to_string(i) +
                                  ": dims must be >= 1");
    }
    if (l.in_dim != prev) {
      throw std::invalid_argument(
          "layer " + std::to_string(i) + ": in_dim " + std::to_string(l.in_dim) +
          " does not chain from previous width " + std::to_string(prev));
    }
    prev = l.out_dim;
  }
}

EncoderSpec EncoderSpec::single_layer(int input_dim, int latent_dim,
                                      ActivationKind latent_activation) {
  return EncoderSpec(input_dim, {{input_dim, latent_dim, latent_activation}});
}

EncoderSpec EncoderSpec::with_hidden(int input_dim, const std::vector<int>& hidden,
                                     int latent_dim,
                                     ActivationKind hidden_activation,
                                     ActivationKind latent_activation) {
  std::vector<LayerSpec> layers;
  int prev = input_dim;
  for (int h : hidden) {
    layers.push_back({prev, h, hidden_activation});
    prev = h;
  }
  layers.push_back({prev, latent_dim, latent_activation});
  return EncoderSpec(input_dim, std::move(layers));
}

Layer::Layer(Matrix w, Vector b, ActivationKind act)
    : weight(std::move(w)), bias(std::move(b)), activation(act) {
  if (bias.dim() != weight.rows()) {
    throw std::invalid_argument("layer bias dim " + std::to_string(bias.dim()) +
                                " does not match weight rows " +
                                std::to_string(weight.rows()));
  }
}

namespace {

void check_chain(const std::vector<Layer>& layers, int in_dim, int out_dim,
                 const char* name) {
  if (layers.empty()) {
    throw std::invalid_argument(std::string(name) + " stack is empty");
  }
  int prev = in_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].in_dim() != prev) {
      throw std::invalid_argument(std::string(name) + " layer " +
                                  std::to_string(i) + ": in_dim " +
                                  std::to_string(layers[i].in_dim()) +
                                  " does not chain from width " +
                                  std::to_string(prev));
    }
    prev = layers[i].out_dim();
  }
  if (prev != out_dim) {
    throw std::invalid_argument(std::string(name) + " stack ends at width " +
                                std::to_string(prev) + ", expected " +
                                std::to_string(out_dim));
  }
}

std::vector<double> layer_forward(const Layer& layer,
                                  const std::vector<double>& in,
                                  std::vector<double>* preact) {
  const int out_dim = layer.out_dim();
  const int in_dim = layer.in_dim();
  std::vector<double> out(static_cast<std::size_t>(out_dim));
  for (int r = 0; r < out_dim; ++r) {
    double z = layer.bias[r];
    for (int c = 0; c < in_dim; ++c) {
      z += layer.weight.at(r, c) * in[static_cast<std::size_t>(c)];
    }
    if (preact) (*preact)[static_cast<std::size_t>(r)] = z;
    out[static_cast<std::size_t>(r)] = activate(layer.activation, z);
  }
  return out;
}

std::vector<double> run_stack(const std::vector<Layer>& layers,
                              std::vector<double> values) {
  for (const Layer& layer : layers) {
    values = layer_forward(layer, values, nullptr);
  }
  return values;
}

// Gradients of the reconstruction loss for every parameter, laid out as one
// flat buffer: encoder layers then decoder layers, each as row-major weights
// followed by biases.
struct FlatGrads {
  std::vector<double> values;
};

std::size_t layer_param_count(const Layer& layer) {
  return layer.weight.entries().size() + static_cast<std::size_t>(layer.bias.dim());
}

// Backprop through both stacks for target = input. Returns the per-sample
// loss; accumulates parameter gradients into grads (scaled by weight_factor,
// used for batch averaging).
double accumulate_gradients(const MlpModel& model, const Vector& x,
                            double weight_factor, FlatGrads& grads) {
  const std::vector<const Layer*> seq = [&] {
    std::vector<const Layer*> s;
    for (const Layer& l : model.encoder_layers()) s.push_back(&l);
    for (const Layer& l : model.decoder_layers()) s.push_back(&l);
    return s;
  }();
  const std::size_t depth = seq.size();

  // Forward pass, keeping every activation and pre-activation.
  std::vector<std::vector<double>> acts(depth + 1);
  std::vector<std::vector<double>> pre(depth);
  acts[0] = x.entries();
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l].resize(static_cast<std::size_t>(seq[l]->out_dim()));
    acts[l + 1] = layer_forward(*seq[l], acts[l], &pre[l]);
  }

  const int n = x.dim();
  const std::vector<double>& out = acts[depth];
  double loss = 0.0;
  std::vector<double> grad_out(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double diff = out[i] - x[static_cast<int>(i)];
    loss += diff * diff;
    grad_out[i] = 2.0 * diff / n;
  }
  loss /= n;

  // Backward pass.
  std::size_t offset = 0;
  std::vector<std::size_t> layer_offsets(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    layer_offsets[l] = offset;
    offset += layer_param_count(*seq[l]);
  }

  std::vector<double> grad_a = std::move(grad_out);
  for (std::size_t li = depth; li-- > 0;) {
    const Layer& layer = *seq[li];
    const int out_dim = layer.out_dim();
    const int in_dim = layer.in_dim();
    std::vector<double> delta(static_cast<std::size_t>(out_dim));
    for (int r = 0; r < out_dim; ++r) {
      delta[static_cast<std::size_t>(r)] =
          grad_a[static_cast<std::size_t>(r)] *
          activate_grad(layer.activation, pre[li][static_cast<std::size_t>(r)]);
    }

    double* gw = grads.values.data() + layer_offsets[li];
    double* gb = gw + layer.weight.entries().size();
    const std::vector<double>& a_prev = acts[li];
    for (int r = 0; r < out_dim; ++r) {
      const double d = delta[static_cast<std::size_t>(r)] * weight_factor;
      for (int c = 0; c < in_dim; ++c) {
        gw[static_cast<std::size_t>(r) * in_dim + c] +=
            d * a_prev[static_cast<std::size_t>(c)];
      }
      gb[r] += d;
    }

    if (li > 0) {
      std::vector<double> grad_prev(static_cast<std::size_t>(in_dim), 0.0);
      for (int c = 0; c < in_dim; ++c) {
        double s = 0.0;
        for (int r = 0; r < out_dim; ++r) {
          s += layer.weight.at(r, c) * delta[static_cast<std::size_t>(r)];
        }
        grad_prev[static_cast<std::size_t>(c)] = s;
      }
      grad_a = std::move(grad_prev);
    }
  }
  return loss;
}

void apply_update(std::vector<Layer>& layers, const double*& grad_cursor,
                  double learning_rate) {
  for (Layer& layer : layers) {
    const std::size_t w_count = layer.weight.entries().size();
    for (int r = 0; r < layer.out_dim(); ++r) {
      for (int c = 0; c < layer.in_dim(); ++c) {
        layer.weight.at(r, c) -=
            learning_rate * grad_cursor[static_cast<std::size_t>(r) * layer.in_dim() + c];
      }
    }
    grad_cursor += w_count;
    for (int r = 0; r < layer.out_dim(); ++r) {
      layer.bias[r] -= learning_rate * grad_cursor[r];
    }
    grad_cursor += layer.out_dim();
  }
}

}  // namespace

MlpModel::MlpModel(std::vector<Layer> encoder, std::vector<Layer> decoder)
    : input_dim_(0),
      latent_dim_(0),
      encoder_(std::move(encoder)),
      decoder_(std::move(decoder)) {
  if (encoder_.empty() || decoder_.empty()) {
    throw std::invalid_argument("model needs encoder and decoder layers");
  }
  input_dim_ = encoder_.front().in_dim();
  latent_dim_ = encoder_.back().out_dim();
  check_chain(encoder_, input_dim_, latent_dim_, "encoder");
  check_chain(decoder_, latent_dim_, input_dim_, "decoder");
}

MlpModel MlpModel::init_random(const EncoderSpec& spec, std::uint64_t seed,
                               double init_scale) {
  if (!(init_scale > 0.0)) {
    throw std::invalid_argument("init_scale must be > 0");
  }
  Rng rng(mix_seed(seed, seed_stream::kWeightInit));

  auto make_layer = [&](int in_dim, int out_dim, ActivationKind act) {
    const double scale = init_scale / std::sqrt(static_cast<double>(in_dim));
    std::vector<double> w(static_cast<std::size_t>(in_dim) * out_dim);
    for (double& v : w) v = rng.gaussian() * scale;
    return Layer(Matrix(out_dim, in_dim, std::move(w)), Vector::zeros(out_dim),
                 act);
  };

  std::vector<Layer> enc;
  for (const LayerSpec& l : spec.layers) {
    enc.push_back(make_layer(l.in_dim, l.out_dim, l.activation));
  }

  // Decoder mirrors the encoder widths in reverse. Hidden decoder layers
  // reuse the activation of the encoder layer that produced their output
  // width; the final layer is Identity because inputs are unbounded reals.
  std::vector<Layer> dec;
  const std::vector<LayerSpec>& ls = spec.layers;
  for (std::size_t k = ls.size(); k-- > 0;) {
    const ActivationKind act = (k == 0) ? ActivationKind::Identity
                                        : ls[k - 1].activation;
    dec.push_back(make_layer(ls[k].out_dim, ls[k].in_dim, act));
  }
  return MlpModel(std::move(enc), std::move(dec));
}

Vector MlpModel::encode(const Vector& x) const {
  if (x.dim() != input_dim_) {
    throw std::invalid_argument("encode: input dim " + std::to_string(x.dim()) +
                                " does not match model input dim " +
                                std::to_string(input_dim_));
  }
  return Vector::unchecked(run_stack(encoder_, x.entries()));
}

Vector MlpModel::decode(const Vector& z) const {
  if (z.dim() != latent_dim_) {
    throw std::invalid_argument("decode: input dim " + std::to_string(z.dim()) +
                                " does not match latent dim " +
                                std::to_string(latent_dim_));
  }
  return Vector::unchecked(run_stack(decoder_, z.entries()));
}

std::size_t MlpModel::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& l : encoder_) count += layer_param_count(l);
  for (const Layer& l : decoder_) count += layer_param_count(l);
  return count;
}

MlpModel::Trace MlpModel::forward_trace(const Vector& x) const {
  if (x.dim() != input_dim_) {
    throw std::invalid_argument("forward_trace: input dim mismatch");
  }
  Trace trace;
  std::vector<double> values = x.entries();
  auto step = [&](const Layer& layer) {
    std::vector<double> pre(static_cast<std::size_t>(layer.out_dim()));
    values = layer_forward(layer, values, &pre);
    trace.preactivations.push_back(Vector::unchecked(std::move(pre)));
    trace.activations.push_back(Vector::unchecked(values));
  };
  for (const Layer& l : encoder_) step(l);
  for (const Layer& l : decoder_) step(l);
  return trace;
}

double reconstruction_loss(const MlpModel& model, const Vector& x) {
  const Vector out = model.reconstruct(x);
  double loss = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double diff = out[i] - x[i];
    loss += diff * diff;
  }
  return loss / x.dim();
}

TrainResult train(MlpModel model, const std::vector<Vector>& data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: data is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].dim() != model.input_dim()) {
      throw std::invalid_argument("train: sample " + std::to_string(i) +
                                  " has dim " + std::to_string(data[i].dim()) +
                                  ", model expects " +
                                  std::to_string(model.input_dim()));
    }
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  TrainResult result{std::move(model), {}};
  if (cfg.epochs == 0) return result;

  const std::size_t n_samples = data.size();
  const std::size_t param_count = result.model.parameter_count();
  Rng shuffle_rng(mix_seed(cfg.seed, seed_stream::kShuffle));

  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates; std::shuffle is implementation-defined.
    for (std::size_t i = n_samples; i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(shuffle_rng.below(static_cast<int>(i)));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n_samples;
         start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end =
          std::min(n_samples, start + static_cast<std::size_t>(cfg.batch_size));
      const double batch_n = static_cast<double>(end - start);

      FlatGrads grads;
      grads.values.assign(param_count, 0.0);
      double batch_loss_sum = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss_sum += accumulate_gradients(result.model, data[order[i]],
                                               1.0 / batch_n, grads);
      }
      if (!std::isfinite(batch_loss_sum)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_index));
      }
      epoch_loss_sum += batch_loss_sum;

      const double* cursor = grads.values.data();
      apply_update(result.model.encoder_, cursor, cfg.learning_rate);
      apply_update(result.model.decoder_, cursor, cfg.learning_rate);
    }
    result.loss_history.push_back(epoch_loss_sum / static_cast<double>(n_samples));
  }
  return result;
}

double gradient_check(const MlpModel& model, const Vector& x, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("gradient_check: epsilon must lie in [1e-7, 1e-3]");
  }

  FlatGrads analytic;
  analytic.values.assign(model.parameter_count(), 0.0);
  accumulate_gradients(model, x, 1.0, analytic);

  MlpModel probe = model;
  std::vector<double*> params;
  params.reserve(probe.parameter_count());
  auto collect = [&](std::vector<Layer>& layers) {
    for (Layer& layer : layers) {
      // Matrix/Vector storage is contiguous row-major.
      for (int r = 0; r < layer.out_dim(); ++r) {
        for (int c = 0; c < layer.in_dim(); ++c) params.push_back(&layer.weight.at(r, c));
      }
      for (int r = 0; r < layer.out_dim(); ++r) params.push_back(&layer.bias[r]);
    }
  };
  collect(probe.encoder_);
  collect(probe.decoder_);

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = *params[p];
    *params[p] = saved + epsilon;
    const double loss_plus = reconstruction_loss(probe, x);
    *params[p] = saved - epsilon;
    const double loss_minus = reconstruction_loss(probe, x);
    *params[p] = saved;

    const double g_fd = (loss_plus - loss_minus) / (2.0 * epsilon);
    const double g = analytic.values[p];
    const double rel = std::fabs(g - g_fd) / std::max(1.0, std::fabs(g) + std::fabs(g_fd));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace latact
