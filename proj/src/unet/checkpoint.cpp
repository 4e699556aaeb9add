#include "uhinet/unet/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "uhinet/datapipe/raster.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::unet {

namespace {

constexpr std::string_view kMagic = "UNETCKPT1\n";
constexpr int kVersion = 1;

void append_floats(std::string& out, std::span<const float> values) {
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(values[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(out.data() + offset + i * 4, &bits, 4);
  }
}

void read_floats(std::string_view payload, std::size_t offset, std::span<float> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, payload.data() + offset + i * 4, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    out[i] = std::bit_cast<float>(bits);
  }
}

}  // namespace

std::string encode_checkpoint(const UNet& model, const TrainerState& state, const data::NormalizationManifest& manifest) {
  const auto& layout = model.layout();
  std::vector<std::pair<std::string, const num::Tensor*>> tensors;
  for (std::size_t i = 0; i < layout.size(); ++i) tensors.emplace_back(layout[i].name, &model.parameters()[i]);
  if (!state.adam.m.empty()) {
    if (state.adam.m.size() != layout.size() || state.adam.v.size() != layout.size()) {
      throw UsageError("checkpoint: optimizer state does not match the model");
    }
    for (std::size_t i = 0; i < layout.size(); ++i) tensors.emplace_back("adam.m." + layout[i].name, &state.adam.m[i]);
    for (std::size_t i = 0; i < layout.size(); ++i) tensors.emplace_back("adam.v." + layout[i].name, &state.adam.v[i]);
  }
  nlohmann::json dir = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : tensors) {
    dir.push_back({{"name", name}, {"shape", t->shape()}, {"offset", offset}});
    offset += t->size() * 4;
  }
  nlohmann::json header = {{"version", kVersion},
                           {"config", model.config().to_json()},
                           {"manifest", manifest.to_json()},
                           {"epoch", state.epoch},
                           {"step", state.step},
                           {"adam_t", state.adam.t},
                           {"rng_state", state.rng.state()},
                           {"tensors", dir},
                           {"payload_bytes", offset}};
  std::string out(kMagic);
  out += header.dump();
  out.push_back('\n');
  out.reserve(out.size() + offset);
  for (const auto& [name, t] : tensors) append_floats(out, t->data());
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw FormatError("checkpoint: bad magic");
  bytes.remove_prefix(kMagic.size());
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw FormatError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad header: ") + e.what());
  }
  const std::string_view payload = bytes.substr(nl + 1);
  try {
    if (header.at("version").get<int>() != kVersion) {
      throw FormatError("checkpoint: unsupported version " + header.at("version").dump());
    }
    UNetConfig config;
    try {
      config = UNetConfig::from_json(header.at("config"));
    } catch (const ConfigError& e) {
      throw FormatError(std::string("checkpoint: ") + e.what());
    }
    const auto payload_bytes = header.at("payload_bytes").get<std::size_t>();
    if (payload.size() != payload_bytes) {
      throw FormatError("checkpoint: payload is " + std::to_string(payload.size()) + " bytes, header says " +
                        std::to_string(payload_bytes));
    }
    Checkpoint ck{UNet::zeros(config), TrainerState{}, data::NormalizationManifest::from_json(header.at("manifest"))};
    ck.state.epoch = header.at("epoch").get<std::size_t>();
    ck.state.step = header.at("step").get<std::int64_t>();
    ck.state.rng.set_state(header.at("rng_state").get<std::string>());

    const auto& layout = ck.model.layout();
    const auto& dir = header.at("tensors");
    const bool has_adam = dir.size() == 3 * layout.size();
    if (dir.size() != layout.size() && !has_adam) throw FormatError("checkpoint: tensor directory size mismatch");
    if (has_adam) ck.state.adam = num::AdamState<float>::zeros_like(ck.model.parameters());
    ck.state.adam.t = header.at("adam_t").get<std::int64_t>();
    for (std::size_t i = 0; i < dir.size(); ++i) {
      const std::size_t slot = i % layout.size();
      const std::size_t group = i / layout.size();
      num::Tensor& dst = group == 0 ? ck.model.parameters()[slot]
                         : group == 1 ? ck.state.adam.m[slot]
                                      : ck.state.adam.v[slot];
      static const char* prefixes[] = {"", "adam.m.", "adam.v."};
      const std::string expected = prefixes[group] + layout[slot].name;
      if (dir[i].at("name").get<std::string>() != expected) {
        throw FormatError("checkpoint: expected tensor '" + expected + "', found " + dir[i].at("name").dump());
      }
      if (dir[i].at("shape").get<num::Shape>() != dst.shape()) {
        throw FormatError("checkpoint: shape mismatch for '" + expected + "'");
      }
      const auto off = dir[i].at("offset").get<std::size_t>();
      if (off + dst.size() * 4 > payload.size()) throw FormatError("checkpoint: tensor '" + expected + "' out of range");
      read_floats(payload, off, dst.data());
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad header field: ") + e.what());
  } catch (const DataError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const UNet& model, const TrainerState& state,
                     const data::NormalizationManifest& manifest) {
  data::write_file(path, encode_checkpoint(model, state, manifest));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(data::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string checkpoint_id(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uhinet::unet
