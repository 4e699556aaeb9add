#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "uhinet/datapipe/normalization.hpp"
#include "uhinet/unet/train.hpp"

namespace uhinet::unet {

struct Checkpoint {
  UNet model;
  TrainerState state;
  data::NormalizationManifest manifest;
};

// "UNETCKPT1\n", one JSON header line (config, manifest, trainer counters, rng
// state, tensor directory with byte offsets), then little-endian float32 blobs
// in directory order.
std::string encode_checkpoint(const UNet& model, const TrainerState& state, const data::NormalizationManifest& manifest);
// Throws FormatError on a bad magic, version, header, or payload size.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const UNet& model, const TrainerState& state,
                     const data::NormalizationManifest& manifest);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Stable short identifier of a checkpoint's bytes (FNV-1a, hex).
std::string checkpoint_id(std::string_view bytes);

}  // namespace uhinet::unet
