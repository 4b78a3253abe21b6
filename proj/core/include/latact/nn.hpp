#pragma once

#include <cstdint>
#include <vector>

#include "latact/activation.hpp"
#include "latact/encoder.hpp"
#include "latact/linalg.hpp"

namespace latact {

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  ActivationKind activation = ActivationKind::Identity;
};

/// Shape of the encoder half: input_dim -> ... -> latent. Layer dims must
/// chain. Canonical configurations compress (latent <= input), but wider
/// latents are permitted for control experiments on rank preservation.
struct EncoderSpec {
  int input_dim = 0;
  std::vector<LayerSpec> layers;

  EncoderSpec(int input_dim, std::vector<LayerSpec> layers);

  static EncoderSpec single_layer(int input_dim, int latent_dim,
                                  ActivationKind latent_activation);
  static EncoderSpec with_hidden(int input_dim, const std::vector<int>& hidden,
                                 int latent_dim, ActivationKind hidden_activation,
                                 ActivationKind latent_activation);

  int latent_dim() const { return layers.back().out_dim; }
  ActivationKind latent_activation() const { return layers.back().activation; }
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 100;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double init_scale = 1.0;
};

struct Layer {
  Matrix weight;  // out_dim x in_dim
  Vector bias;    // out_dim
  ActivationKind activation = ActivationKind::Identity;

  Layer(Matrix w, Vector b, ActivationKind act);
  int in_dim() const { return weight.cols(); }
  int out_dim() const { return weight.rows(); }
};

struct TrainResult;

/// Autoencoder: an encoder stack R^n -> R^m and a decoder stack R^m -> R^n.
/// As an Encoder it exposes only the first half; output_dim() is the latent
/// width. Immutable during encode/decode; train works on a copy.
class MlpModel final : public Encoder {
 public:
  MlpModel(std::vector<Layer> encoder, std::vector<Layer> decoder);

  // Seeded Gaussian weights scaled by init_scale/sqrt(in_dim), zero biases.
  // The decoder mirrors the encoder dims in reverse; its hidden layers reuse
  // the mirrored encoder activations and its output layer is Identity.
  static MlpModel init_random(const EncoderSpec& spec, std::uint64_t seed,
                              double init_scale = 1.0);

  int input_dim() const override { return input_dim_; }
  int output_dim() const override { return latent_dim_; }
  int latent_dim() const { return latent_dim_; }

  Vector encode(const Vector& x) const override;
  Vector decode(const Vector& z) const;
  Vector reconstruct(const Vector& x) const { return decode(encode(x)); }

  const std::vector<Layer>& encoder_layers() const { return encoder_; }
  const std::vector<Layer>& decoder_layers() const { return decoder_; }
  std::size_t parameter_count() const;

  // Per-layer pre-activations and activations over the whole reconstruction
  // path (encoder layers, then decoder layers).
  struct Trace {
    std::vector<Vector> preactivations;
    std::vector<Vector> activations;
  };
  Trace forward_trace(const Vector& x) const;

  friend TrainResult train(MlpModel model, const std::vector<Vector>& data,
                           const TrainConfig& cfg);
  friend double gradient_check(const MlpModel& model, const Vector& x,
                               double epsilon);

 private:
  int input_dim_;
  int latent_dim_;
  std::vector<Layer> encoder_;
  std::vector<Layer> decoder_;
};

// Mean squared reconstruction error at x: |reconstruct(x) - x|^2 / input_dim.
double reconstruction_loss(const MlpModel& model, const Vector& x);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // one mean loss per epoch
};

// Mini-batch gradient descent on reconstruction error. Deterministic for a
// fixed config seed (the per-epoch shuffle is seeded). Throws when the loss
// turns non-finite, naming the epoch and batch.
TrainResult train(MlpModel model, const std::vector<Vector>& data,
                  const TrainConfig& cfg);

// Max over parameters of the relative error between backprop gradients and
// central finite differences of the reconstruction loss at x:
// |g - g_fd| / max(1, |g| + |g_fd|). epsilon must lie in [1e-7, 1e-3].
double gradient_check(const MlpModel& model, const Vector& x, double epsilon);

}  // namespace latact
