#include "uhinet/unet/model.hpp"

#include <cmath>

#include "uhinet/config_json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::unet {

namespace {
constexpr std::uint64_t kInitStream = 0x1417;
}

void UNetConfig::validate() const {
  if (depth < 1 || depth > 6) throw ConfigError("unet: depth must be in [1, 6]");
  if (input_size == 0 || input_size % (std::size_t{1} << depth) != 0) {
    throw ConfigError("unet: input_size " + std::to_string(input_size) + " not divisible by 2^depth");
  }
  if (spatial_channels == 0 || met_vars == 0 || met_timesteps == 0) throw ConfigError("unet: empty input");
  if (base_channels < 2 || base_channels % 2 != 0) throw ConfigError("unet: base_channels must be even and >= 2");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("unet: dropout_rate must be in [0, 1)");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("unet: lr must be positive");
  if (batch_size == 0) throw ConfigError("unet: batch_size must be >= 1");
}

nlohmann::json UNetConfig::to_json() const {
  return {{"input_size", input_size},
          {"spatial_channels", spatial_channels},
          {"met_vars", met_vars},
          {"met_timesteps", met_timesteps},
          {"depth", depth},
          {"base_channels", base_channels},
          {"dropout_rate", dropout_rate},
          {"lr", lr},
          {"batch_size", batch_size},
          {"epochs", epochs},
          {"seed", seed},
          {"optimizer", optimizer == OptimizerKind::adam ? "adam" : "sgd"}};
}

UNetConfig UNetConfig::from_json(const nlohmann::json& j) {
  UNetConfig c;
  ConfigReader r(j, "unet config");
  r.get("input_size", c.input_size);
  r.get("spatial_channels", c.spatial_channels);
  r.get("met_vars", c.met_vars);
  r.get("met_timesteps", c.met_timesteps);
  r.get("depth", c.depth);
  r.get("base_channels", c.base_channels);
  r.get("dropout_rate", c.dropout_rate);
  r.get("lr", c.lr);
  r.get("batch_size", c.batch_size);
  r.get("epochs", c.epochs);
  r.get("seed", c.seed);
  std::string opt = "adam";
  r.get("optimizer", opt);
  if (opt == "adam") {
    c.optimizer = OptimizerKind::adam;
  } else if (opt == "sgd") {
    c.optimizer = OptimizerKind::sgd;
  } else {
    throw ConfigError("unet config: optimizer must be 'adam' or 'sgd', got '" + opt + "'");
  }
  r.finish();
  c.validate();
  return c;
}

std::vector<ParamSpec> unet_layout(const UNetConfig& c) {
  c.validate();
  std::vector<ParamSpec> out;
  auto add = [&](std::string name, num::Shape kshape, LayerKind kind, std::size_t fan_in, double gain) {
    const std::size_t width = kshape.back();
    out.push_back({name + ".kernel", std::move(kshape), kind, false, fan_in, gain});
    out.push_back({name + ".bias", {width}, kind, true, fan_in, gain});
  };
  auto conv = [&](const std::string& name, std::size_t cin, std::size_t cout, std::size_t k, double gain) {
    add(name, {k, k, cin, cout}, LayerKind::conv, k * k * cin, gain);
  };
  auto convt = [&](const std::string& name, std::size_t cin, std::size_t cout) {
    add(name, {3, 3, cin, cout}, LayerKind::conv_transpose, 9 * cin, 2.0);
  };

  std::size_t cin = c.spatial_channels;
  for (std::size_t i = 0; i < c.depth; ++i) {
    const std::size_t w = c.base_channels << i;
    const std::string p = "enc" + std::to_string(i + 1);
    conv(p + ".conv_a", cin, w, 3, 2.0);
    conv(p + ".conv_b", w, w, 3, 2.0);
    cin = w;
  }
  const std::size_t latent = c.latent_length();
  add("fusion", {latent + c.met_length(), latent}, LayerKind::dense, latent + c.met_length(), 1.0);
  std::size_t in = c.latent_channels();
  for (std::size_t i = c.depth; i-- > 0;) {
    const std::size_t skip = c.base_channels << i;
    const std::size_t half = skip / 2;
    const std::string p = "dec" + std::to_string(i + 1);
    convt(p + ".up", in, half);
    convt(p + ".mix", half + skip, half);
    in = half;
  }
  conv("head", in, 1, 1, 1.0);
  return out;
}

template <typename T>
BasicUNet<T>::BasicUNet(const UNetConfig& config) : config_(config), layout_(unet_layout(config)) {
  for (const auto& spec : layout_) params_.emplace_back(spec.shape);
}

template <typename T>
BasicUNet<T> BasicUNet<T>::zeros(const UNetConfig& config) {
  return BasicUNet(config);
}

template <typename T>
BasicUNet<T> BasicUNet<T>::build(const UNetConfig& config) {
  BasicUNet m(config);
  for (std::size_t s = 0; s < m.layout_.size(); ++s) {
    const auto& spec = m.layout_[s];
    if (spec.is_bias) continue;
    Rng rng(derive_seed(config.seed, kInitStream, s));
    const double sd = std::sqrt(spec.gain / static_cast<double>(spec.fan_in));
    for (auto& v : m.params_[s].data()) v = static_cast<T>(rng.normal(0.0, sd));
  }
  return m;
}

template <typename T>
std::size_t BasicUNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

template <typename T>
typename BasicUNet<T>::Var BasicUNet<T>::forward(num::GradTape<T>& tape, Var spatial, Var met, bool training,
                                                 Rng& rng) const {
  const auto& c = config_;
  const auto& xs = tape.value(spatial).shape();
  const auto& ms = tape.value(met).shape();
  if (xs.size() != 4 || xs[1] != c.input_size || xs[2] != c.input_size || xs[3] != c.spatial_channels) {
    throw DimensionError("unet: spatial input must be (N," + std::to_string(c.input_size) + "," +
                         std::to_string(c.input_size) + "," + std::to_string(c.spatial_channels) + "), got " +
                         num::shape_string(xs));
  }
  const std::size_t batch = xs[0];
  if (ms.size() != 3 || ms[0] != batch || ms[1] != c.met_timesteps || ms[2] != c.met_vars) {
    throw DimensionError("unet: met input must be (N," + std::to_string(c.met_timesteps) + "," +
                         std::to_string(c.met_vars) + "), got " + num::shape_string(ms));
  }

  std::size_t slot = 0;
  auto next = [&] {
    const std::size_t s = slot++;
    return tape.parameter(params_[s], s);
  };
  auto conv_relu = [&](Var x, std::size_t stride = 1) {
    Var k = next();
    Var b = next();
    return num::relu(tape, num::conv2d(tape, x, k, b, stride, num::Padding::same));
  };
  auto convt_relu = [&](Var x, std::size_t stride) {
    Var k = next();
    Var b = next();
    return num::relu(tape, num::conv2d_transpose(tape, x, k, b, stride));
  };

  std::vector<Var> skips;
  Var x = spatial;
  for (std::size_t i = 0; i < c.depth; ++i) {
    x = conv_relu(x);
    x = conv_relu(x);
    skips.push_back(x);
    x = num::max_pool2(tape, x);
    x = num::dropout(tape, x, c.dropout_rate, rng, training);
  }

  const std::size_t s = c.latent_size();
  Var flat = num::reshape(tape, x, {batch, c.latent_length()});
  Var met_flat = num::reshape(tape, met, {batch, c.met_length()});
  Var fused = num::concat_last(tape, flat, met_flat);
  {
    Var w = next();
    Var b = next();
    fused = num::dense(tape, fused, w, b);
  }
  x = num::reshape(tape, fused, {batch, s, s, c.latent_channels()});

  for (std::size_t i = c.depth; i-- > 0;) {
    x = convt_relu(x, 2);
    x = num::concat_last(tape, x, skips[i]);
    x = convt_relu(x, 1);
    x = num::dropout(tape, x, c.dropout_rate, rng, training);
  }
  Var k = next();
  Var b = next();
  return num::conv2d(tape, x, k, b, 1, num::Padding::same);
}

template <typename T>
typename BasicUNet<T>::TensorT BasicUNet<T>::forward(const TensorT& spatial, const TensorT& met, bool training,
                                                     Rng& rng) const {
  const bool single = spatial.rank() == 3;
  for (T v : spatial.data()) {
    if (!std::isfinite(static_cast<double>(v))) throw DataError("unet: non-finite spatial input");
  }
  for (T v : met.data()) {
    if (!std::isfinite(static_cast<double>(v))) throw DataError("unet: non-finite met input");
  }
  TensorT xs = spatial;
  TensorT ms = met;
  if (single) {
    if (met.rank() != 2) throw DimensionError("unet: single-patch input needs a (steps, vars) met window");
    auto shape = spatial.shape();
    shape.insert(shape.begin(), 1);
    xs = std::move(xs).reshaped(shape);
    auto mshape = met.shape();
    mshape.insert(mshape.begin(), 1);
    ms = std::move(ms).reshaped(mshape);
  }
  num::GradTape<T> tape;
  Var out = forward(tape, tape.input(std::move(xs)), tape.input(std::move(ms)), training, rng);
  TensorT y = tape.value(out);
  if (single) y = std::move(y).reshaped({config_.input_size, config_.input_size, 1});
  return y;
}

template <typename T>
typename BasicUNet<T>::TensorT BasicUNet<T>::predict(const TensorT& spatial, const TensorT& met) const {
  Rng unused(0);
  return forward(spatial, met, false, unused);
}

template class BasicUNet<float>;
template class BasicUNet<double>;

}  // namespace uhinet::unet
