#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "scm/tensor.hpp"

namespace scm {

constexpr int kMinImageSide = 32;  // 3-stage pyramid needs one cell at stride 32

// Co-registered bi-temporal image pair, the pipeline input unit.
struct ImagePair {
  Raster t1;
  Raster t2;
  std::string id;
};

inline void validate_pair(const ImagePair& pair) {
  if (pair.t1.empty() || pair.t2.empty())
    throw std::invalid_argument("ImagePair: empty raster");
  if (!pair.t1.same_dims(pair.t2))
    throw std::invalid_argument("ImagePair: t1/t2 dims differ for " + pair.id);
  if (pair.t1.channels() != 3)
    throw std::invalid_argument("ImagePair: expected 3-channel rasters");
  if (pair.t1.height() < kMinImageSide || pair.t1.width() < kMinImageSide)
    throw std::invalid_argument("ImagePair: image smaller than minimum size");
}

// Ordered feature maps from the last three backbone stages, fine to coarse.
struct FeaturePyramid {
  std::array<Tensor, 3> levels;
  std::array<int, 3> strides;
};

inline void validate_pyramid(const FeaturePyramid& pyr) {
  for (int i = 0; i < 3; ++i) {
    if (pyr.levels[i].empty())
      throw std::invalid_argument("FeaturePyramid: empty level");
    if (pyr.strides[i] <= 0)
      throw std::invalid_argument("FeaturePyramid: non-positive stride");
    if (!pyr.levels[i].all_finite())
      throw std::invalid_argument("FeaturePyramid: non-finite values");
  }
  for (int i = 0; i < 2; ++i) {
    if (pyr.levels[i].height() <= pyr.levels[i + 1].height() ||
        pyr.levels[i].width() <= pyr.levels[i + 1].width())
      throw std::invalid_argument(
          "FeaturePyramid: spatial dims must strictly decrease");
  }
}

// All object masks segmented from one temporal image.
struct SegmentMaskSet {
  std::vector<Mask> masks;
  int source = 1;  // temporal index, 1 or 2
};

struct EmbeddingVector {
  std::vector<float> values;
  enum class Modality { kImage, kText } modality;
};

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual FeaturePyramid extract(const Raster& image) = 0;
};

class MaskGenerator {
 public:
  virtual ~MaskGenerator() = default;
  virtual SegmentMaskSet generate(const Raster& image, int source) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed_image(const Raster& patch) = 0;
  virtual std::vector<EmbeddingVector> embed_texts(
      const std::vector<std::string>& terms) = 0;
  virtual int dim() const = 0;
};

// One extractor/mask-generator/embedder triple; replicated per worker,
// never shared concurrently.
struct AdapterBundle {
  std::shared_ptr<FeatureExtractor> extractor;
  std::shared_ptr<MaskGenerator> masks;
  std::shared_ptr<Embedder> embedder;
};

namespace detail {

inline uint64_t fnv1a(const uint8_t* bytes, size_t n, uint64_t seed) {
  uint64_t h = 1469598103934665603ull ^ seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

// Deterministic weight-free backbone: box-filter pyramid features with
// per-channel RGB mixing weights drawn from the seed.
class SyntheticExtractor : public FeatureExtractor {
 public:
  explicit SyntheticExtractor(uint64_t seed) : seed_(seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<float> dist(0.05f, 1.f);
    for (int level = 0; level < 3; ++level) {
      weights_[level].resize(static_cast<size_t>(kChannels[level]) * 3);
      for (float& w : weights_[level]) w = dist(rng);
    }
  }

  FeaturePyramid extract(const Raster& image) override {
    if (image.empty() || image.channels() != 3)
      throw std::invalid_argument("extract: expected H x W x 3 raster");
    if (image.height() < kMinImageSide || image.width() < kMinImageSide)
      throw std::invalid_argument("extract: image smaller than minimum size");

    FeaturePyramid pyr;
    pyr.strides = kStrides;
    for (int level = 0; level < 3; ++level)
      pyr.levels[level] = extract_level(image, level);
    return pyr;
  }

  static constexpr std::array<int, 3> kStrides{8, 16, 32};
  static constexpr std::array<int, 3> kChannels{4, 8, 16};

 private:
  Tensor extract_level(const Raster& image, int level) const {
    const int s = kStrides[level];
    const int c = kChannels[level];
    const int H = image.height(), W = image.width();
    const int h = (H + s - 1) / s, w = (W + s - 1) / s;
    Tensor out(h, w, c);
    for (int by = 0; by < h; ++by) {
      const int y0 = by * s, y1 = std::min(y0 + s, H);
      for (int bx = 0; bx < w; ++bx) {
        const int x0 = bx * s, x1 = std::min(x0 + s, W);
        float sum[3] = {0, 0, 0};
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x)
            for (int ch = 0; ch < 3; ++ch) sum[ch] += image.at(y, x, ch);
        const float inv = 1.f / (255.f * (y1 - y0) * (x1 - x0));
        for (int ch = 0; ch < 3; ++ch) sum[ch] *= inv;
        for (int k = 0; k < c; ++k) {
          const float* w3 = &weights_[level][static_cast<size_t>(k) * 3];
          out.at(by, bx, k) = w3[0] * sum[0] + w3[1] * sum[1] + w3[2] * sum[2];
        }
      }
    }
    return out;
  }

  uint64_t seed_;
  std::array<std::vector<float>, 3> weights_;
};

// Bright-object segmenter: luminance threshold then 4-connected components.
class SyntheticMaskGenerator : public MaskGenerator {
 public:
  explicit SyntheticMaskGenerator(uint8_t luminance_threshold = 127)
      : threshold_(luminance_threshold) {}

  SegmentMaskSet generate(const Raster& image, int source) override {
    if (image.empty() || image.channels() != 3)
      throw std::invalid_argument("generate: expected H x W x 3 raster");
    const int H = image.height(), W = image.width();
    std::vector<int> label(static_cast<size_t>(H) * W, -1);
    auto bright = [&](int y, int x) {
      int lum = (image.at(y, x, 0) + image.at(y, x, 1) + image.at(y, x, 2)) / 3;
      return lum > threshold_;
    };

    SegmentMaskSet set;
    set.source = source;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        if (label[static_cast<size_t>(y) * W + x] >= 0 || !bright(y, x))
          continue;
        const int id = static_cast<int>(set.masks.size());
        Mask mask(H, W, 1);
        stack.assign(1, {y, x});
        label[static_cast<size_t>(y) * W + x] = id;
        while (!stack.empty()) {
          auto [cy, cx] = stack.back();
          stack.pop_back();
          mask.at(cy, cx) = 1;
          const int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
          for (int k = 0; k < 4; ++k) {
            int ny = cy + dy[k], nx = cx + dx[k];
            if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
            size_t li = static_cast<size_t>(ny) * W + nx;
            if (label[li] >= 0 || !bright(ny, nx)) continue;
            label[li] = id;
            stack.emplace_back(ny, nx);
          }
        }
        set.masks.push_back(std::move(mask));
      }
    }
    return set;
  }

 private:
  uint8_t threshold_;
};

// Hash-seeded embedder: identical inputs map to identical vectors, the
// dimension is fixed, and norms are bounded away from zero.
class SyntheticEmbedder : public Embedder {
 public:
  explicit SyntheticEmbedder(uint64_t seed, int dim = 32)
      : seed_(seed), dim_(dim) {}

  EmbeddingVector embed_image(const Raster& patch) override {
    if (patch.empty()) throw std::invalid_argument("embed_image: empty patch");
    uint64_t h = detail::fnv1a(patch.data().data(), patch.data().size(), seed_);
    return make_vector(h, EmbeddingVector::Modality::kImage);
  }

  std::vector<EmbeddingVector> embed_texts(
      const std::vector<std::string>& terms) override {
    if (terms.empty())
      throw std::invalid_argument("embed_texts: empty term list");
    std::vector<EmbeddingVector> out;
    out.reserve(terms.size());
    for (const auto& term : terms) {
      if (term.empty())
        throw std::invalid_argument("embed_texts: blank term");
      uint64_t h = detail::fnv1a(
          reinterpret_cast<const uint8_t*>(term.data()), term.size(), seed_);
      out.push_back(make_vector(h, EmbeddingVector::Modality::kText));
    }
    return out;
  }

  int dim() const override { return dim_; }

 private:
  EmbeddingVector make_vector(uint64_t hash, EmbeddingVector::Modality m) {
    std::mt19937_64 rng(hash);
    std::normal_distribution<float> dist(0.f, 1.f);
    EmbeddingVector v;
    v.modality = m;
    v.values.resize(dim_);
    for (float& x : v.values) x = dist(rng);
    double norm = 0;
    for (float x : v.values) norm += static_cast<double>(x) * x;
    if (norm < 1e-12) v.values[0] = 1.f;
    return v;
  }

  uint64_t seed_;
  int dim_;
};

inline AdapterBundle synthetic_backbone(uint64_t seed) {
  return {std::make_shared<SyntheticExtractor>(seed),
          std::make_shared<SyntheticMaskGenerator>(),
          std::make_shared<SyntheticEmbedder>(seed)};
}

}  // namespace scm
