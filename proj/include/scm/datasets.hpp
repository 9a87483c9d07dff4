#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "scm/adapters.hpp"
#include "scm/io.hpp"
#include "scm/tensor.hpp"

namespace scm {

namespace fs = std::filesystem;

struct TileSpec {
  int row_start = 0;
  int col_start = 0;
  int size = 0;
};

struct GroundTruth {
  Mask mask;
};

// Equidistant sliding-window grid: ceil(dim/tile) windows per axis, start
// offsets spread linearly over [0, dim - tile] so the windows cover the
// full extent with overlap where the tile size does not divide the source.
inline std::vector<TileSpec> tile_whu(int src_h, int src_w, int tile = 1024) {
  if (tile <= 0) throw std::invalid_argument("tile_whu: non-positive tile");
  if (src_h < tile || src_w < tile)
    throw std::invalid_argument("tile_whu: source smaller than tile");
  auto starts = [tile](int dim) {
    const int n = (dim + tile - 1) / tile;
    std::vector<int> out(n);
    for (int k = 0; k < n; ++k)
      out[k] = n > 1 ? static_cast<int>(std::lround(
                           static_cast<double>(k) * (dim - tile) / (n - 1)))
                     : 0;
    return out;
  };
  std::vector<TileSpec> tiles;
  for (int r : starts(src_h))
    for (int c : starts(src_w)) tiles.push_back({r, c, tile});
  return tiles;
}

inline Raster read_tile(const Raster& source, const TileSpec& spec) {
  if (spec.size <= 0 || spec.row_start < 0 || spec.col_start < 0 ||
      spec.row_start + spec.size > source.height() ||
      spec.col_start + spec.size > source.width())
    throw std::invalid_argument("read_tile: spec out of bounds");
  Raster out(spec.size, spec.size, source.channels());
  for (int y = 0; y < spec.size; ++y)
    for (int x = 0; x < spec.size; ++x)
      for (int ch = 0; ch < source.channels(); ++ch)
        out.at(y, x, ch) = source.at(spec.row_start + y, spec.col_start + x, ch);
  return out;
}

// Lazily loadable LEVIR-CD test item: matched files under A/, B/, label/.
struct LevirItem {
  std::string id;
  fs::path t1_path;
  fs::path t2_path;
  fs::path label_path;
};

inline std::vector<LevirItem> enumerate_levir(const fs::path& root) {
  const fs::path a_dir = root / "A", b_dir = root / "B",
                 label_dir = root / "label";
  if (!fs::is_directory(a_dir))
    throw std::runtime_error("enumerate_levir: missing directory " +
                             a_dir.string());
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(a_dir))
    if (entry.is_regular_file()) names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());

  std::vector<LevirItem> items;
  items.reserve(names.size());
  for (const auto& name : names) {
    LevirItem item{name.stem().string(), a_dir / name, b_dir / name,
                   label_dir / name};
    if (!fs::exists(item.t2_path))
      throw std::runtime_error("enumerate_levir: missing counterpart " +
                               item.t2_path.string());
    if (!fs::exists(item.label_path))
      throw std::runtime_error("enumerate_levir: missing label " +
                               item.label_path.string());
    items.push_back(std::move(item));
  }
  return items;
}

inline std::pair<ImagePair, GroundTruth> load_levir_item(const LevirItem& item) {
  ImagePair pair{read_image(item.t1_path), read_image(item.t2_path), item.id};
  validate_pair(pair);
  GroundTruth gt{read_mask(item.label_path)};
  if (gt.mask.height() != pair.t1.height() ||
      gt.mask.width() != pair.t1.width())
    throw std::runtime_error("load_levir_item: label dims differ for " +
                             item.id);
  return {std::move(pair), std::move(gt)};
}

}  // namespace scm
