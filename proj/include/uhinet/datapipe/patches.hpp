#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace uhinet::data {

enum class Split { train, val, test, excluded };

std::string_view split_name(Split s);

struct PatchIndex {
  int id = 0;
  std::size_t grid_row = 0;
  std::size_t grid_col = 0;
  std::size_t row0 = 0;  // top-left pixel
  std::size_t col0 = 0;
  std::size_t size = 32;
  Split split = Split::excluded;

  bool operator==(const PatchIndex&) const = default;
};

// Non-overlapping size x size windows over a width x height domain, row-major ids.
// Throws ConfigError unless both sides are positive multiples of `size`.
std::vector<PatchIndex> make_patches(std::size_t width, std::size_t height, std::size_t size = 32);

// Either explicit id lists (used verbatim, unlisted ids excluded) or, when all
// three lists are empty, a seeded random draw of the given counts.
struct SplitSpec {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::size_t n_train = 48;
  std::size_t n_val = 5;
  std::size_t n_test = 6;
  std::uint64_t seed = 0;

  bool explicit_lists() const { return !train.empty() || !val.empty() || !test.empty(); }

  nlohmann::json to_json() const;
  // Unknown keys are rejected with ConfigError.
  static SplitSpec from_json(const nlohmann::json& j);
};

std::vector<PatchIndex> split_patches(std::vector<PatchIndex> patches, const SplitSpec& spec);

std::vector<PatchIndex> patches_in(const std::vector<PatchIndex>& patches, Split s);

}  // namespace uhinet::data
