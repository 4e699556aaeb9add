#include "uhinet/datapipe/patches.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "uhinet/config_json.hpp"
#include "uhinet/errors.hpp"
#include "uhinet/rng.hpp"

namespace uhinet::data {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::excluded: return "excluded";
  }
  return "?";
}

std::vector<PatchIndex> make_patches(std::size_t width, std::size_t height, std::size_t size) {
  if (size == 0 || width == 0 || height == 0 || width % size != 0 || height % size != 0) {
    throw ConfigError("patches: domain " + std::to_string(width) + "x" + std::to_string(height) +
                      " is not a multiple of the " + std::to_string(size) + "-pixel patch size");
  }
  std::vector<PatchIndex> out;
  const std::size_t rows = height / size;
  const std::size_t cols = width / size;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      PatchIndex p;
      p.id = static_cast<int>(out.size());
      p.grid_row = r;
      p.grid_col = c;
      p.row0 = r * size;
      p.col0 = c * size;
      p.size = size;
      out.push_back(p);
    }
  }
  return out;
}

nlohmann::json SplitSpec::to_json() const {
  return {{"train", train}, {"val", val}, {"test", test}, {"n_train", n_train},
          {"n_val", n_val}, {"n_test", n_test}, {"seed", seed}};
}

SplitSpec SplitSpec::from_json(const nlohmann::json& j) {
  SplitSpec s;
  ConfigReader r(j, "split spec");
  r.get("train", s.train);
  r.get("val", s.val);
  r.get("test", s.test);
  r.get("n_train", s.n_train);
  r.get("n_val", s.n_val);
  r.get("n_test", s.n_test);
  r.get("seed", s.seed);
  r.finish();
  return s;
}

std::vector<PatchIndex> split_patches(std::vector<PatchIndex> patches, const SplitSpec& spec) {
  for (auto& p : patches) p.split = Split::excluded;
  auto assign = [&](int id, Split s, std::set<int>& seen) {
    if (id < 0 || static_cast<std::size_t>(id) >= patches.size()) {
      throw ConfigError("split: patch id " + std::to_string(id) + " does not exist");
    }
    if (!seen.insert(id).second) throw ConfigError("split: patch id " + std::to_string(id) + " listed more than once");
    patches[static_cast<std::size_t>(id)].split = s;
  };
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].id != static_cast<int>(i)) throw ConfigError("split: patch ids must be 0..n-1 in order");
  }
  std::set<int> seen;
  if (spec.explicit_lists()) {
    for (int id : spec.train) assign(id, Split::train, seen);
    for (int id : spec.val) assign(id, Split::val, seen);
    for (int id : spec.test) assign(id, Split::test, seen);
    return patches;
  }
  if (spec.n_train + spec.n_val + spec.n_test > patches.size()) {
    throw ConfigError("split: requested " + std::to_string(spec.n_train + spec.n_val + spec.n_test) +
                      " patches but only " + std::to_string(patches.size()) + " exist");
  }
  std::vector<int> order(patches.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, 0x5b1170));
  rng.shuffle(order.begin(), order.end());
  std::size_t k = 0;
  for (std::size_t i = 0; i < spec.n_train; ++i) assign(order[k++], Split::train, seen);
  for (std::size_t i = 0; i < spec.n_val; ++i) assign(order[k++], Split::val, seen);
  for (std::size_t i = 0; i < spec.n_test; ++i) assign(order[k++], Split::test, seen);
  return patches;
}

std::vector<PatchIndex> patches_in(const std::vector<PatchIndex>& patches, Split s) {
  std::vector<PatchIndex> out;
  std::copy_if(patches.begin(), patches.end(), std::back_inserter(out), [s](const PatchIndex& p) { return p.split == s; });
  return out;
}

}  // namespace uhinet::data
