#pragma once

// Encoder / latent-fusion / decoder network mapping a (32, 32, 3) spatial patch
// and a (3, 5) met window to a (32, 32, 1) temperature patch, all normalized.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "uhinet/numerics/tape.hpp"

namespace uhinet::unet {

enum class OptimizerKind { adam, sgd };

struct UNetConfig {
  std::size_t input_size = 32;
  std::size_t spatial_channels = 3;
  std::size_t met_vars = 5;
  std::size_t met_timesteps = 3;
  std::size_t depth = 3;
  std::size_t base_channels = 32;
  double dropout_rate = 0.2;
  double lr = 1e-5;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::adam;

  // Throws ConfigError when a structural invariant fails.
  void validate() const;
  std::size_t latent_size() const { return input_size >> depth; }
  std::size_t latent_channels() const { return base_channels << (depth - 1); }
  std::size_t latent_length() const { return latent_size() * latent_size() * latent_channels(); }
  std::size_t met_length() const { return met_vars * met_timesteps; }

  nlohmann::json to_json() const;
  // Unknown keys are rejected.
  static UNetConfig from_json(const nlohmann::json& j);

  bool operator==(const UNetConfig&) const = default;
};

enum class LayerKind { conv, conv_transpose, dense };

struct ParamSpec {
  std::string name;
  num::Shape shape;
  LayerKind layer = LayerKind::conv;
  bool is_bias = false;
  std::size_t fan_in = 0;
  double gain = 2.0;  // init variance = gain / fan_in

  bool operator==(const ParamSpec&) const = default;
};

// Every parameter tensor in slot order.
std::vector<ParamSpec> unet_layout(const UNetConfig& config);

template <typename T>
class BasicUNet {
 public:
  using TensorT = num::BasicTensor<T>;
  using Var = num::TapeVar<T>;

  // Fan-in scaled normal weights, zero biases, drawn from the config seed.
  static BasicUNet build(const UNetConfig& config);
  static BasicUNet zeros(const UNetConfig& config);

  const UNetConfig& config() const { return config_; }
  std::vector<TensorT>& parameters() { return params_; }
  const std::vector<TensorT>& parameters() const { return params_; }
  const std::vector<ParamSpec>& layout() const { return layout_; }
  std::size_t parameter_count() const;

  // Registers the parameters on the tape (slot = index) and records the
  // network. Accepts batched (N,S,S,C) + (N,steps,vars) inputs.
  Var forward(num::GradTape<T>& tape, Var spatial, Var met, bool training, Rng& rng) const;

  // Tape-free convenience for batched or single inputs; output keeps the
  // batch rank of `spatial`. Throws DimensionError / DataError on bad input.
  TensorT predict(const TensorT& spatial, const TensorT& met) const;
  TensorT forward(const TensorT& spatial, const TensorT& met, bool training, Rng& rng) const;

  template <typename U>
  BasicUNet<U> cast() const {
    BasicUNet<U> out = BasicUNet<U>::zeros(config_);
    for (std::size_t i = 0; i < params_.size(); ++i) out.parameters()[i] = params_[i].template cast<U>();
    return out;
  }

  bool operator==(const BasicUNet&) const = default;

 private:
  explicit BasicUNet(const UNetConfig& config);

  UNetConfig config_;
  std::vector<ParamSpec> layout_;
  std::vector<TensorT> params_;
};

using UNet = BasicUNet<float>;
using UNet64 = BasicUNet<double>;

}  // namespace uhinet::unet
