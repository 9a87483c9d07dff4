#pragma once

// Shared synthetic fixtures for the test suites.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scm/adapters.hpp"
#include "scm/tensor.hpp"

namespace scm::testing {

inline Raster solid_image(int h, int w, uint8_t value) {
  return Raster(h, w, 3, value);
}

inline void paint_rect(Raster& img, int y0, int x0, int y1, int x1,
                       uint8_t value) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      for (int ch = 0; ch < img.channels(); ++ch) img.at(y, x, ch) = value;
}

inline Mask rect_mask(int h, int w, int y0, int x0, int y1, int x1) {
  Mask m(h, w, 1);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) m.at(y, x) = 1;
  return m;
}

// Deterministic textured image so feature maps are non-constant.
inline Raster textured_image(int h, int w, uint32_t salt = 0) {
  Raster img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch) {
        uint32_t v = static_cast<uint32_t>(y * 31 + x * 17 + ch * 101 + salt);
        v = v * 2654435761u;
        img.at(y, x, ch) = static_cast<uint8_t>(40 + (v >> 24) % 160);
      }
  return img;
}

// Pyramid with every level constant; channels (4, 8, 16), strides (8, 16, 32).
inline FeaturePyramid constant_pyramid(int image_h, int image_w, float v3,
                                       float v4, float v5) {
  FeaturePyramid pyr;
  pyr.strides = {8, 16, 32};
  const float values[3] = {v3, v4, v5};
  const int channels[3] = {4, 8, 16};
  for (int i = 0; i < 3; ++i) {
    const int s = pyr.strides[i];
    pyr.levels[i] = Tensor((image_h + s - 1) / s, (image_w + s - 1) / s,
                           channels[i], values[i]);
  }
  return pyr;
}

// Embedder whose text vectors carry preset cosine similarities against the
// fixed image embedding (1, 0). Text i gets (s_i, sqrt(1 - s_i^2)).
class PresetSimilarityEmbedder : public Embedder {
 public:
  explicit PresetSimilarityEmbedder(std::vector<double> sims)
      : sims_(std::move(sims)) {}

  EmbeddingVector embed_image(const Raster&) override {
    return {{1.f, 0.f}, EmbeddingVector::Modality::kImage};
  }

  std::vector<EmbeddingVector> embed_texts(
      const std::vector<std::string>& terms) override {
    std::vector<EmbeddingVector> out;
    for (size_t i = 0; i < terms.size(); ++i) {
      const double s = sims_.at(i);
      out.push_back({{static_cast<float>(s),
                      static_cast<float>(std::sqrt(std::max(0.0, 1 - s * s)))},
                     EmbeddingVector::Modality::kText});
    }
    return out;
  }

  int dim() const override { return 2; }

 private:
  std::vector<double> sims_;
};

// Brightness-gated embedder: patches with mean intensity above the cut
// align with building terms, darker patches with non-building terms. Terms
// must be passed raw (empty prompt template).
class BrightnessEmbedder : public Embedder {
 public:
  BrightnessEmbedder(std::vector<std::string> building_terms, double cut = 200)
      : building_(std::move(building_terms)), cut_(cut) {}

  EmbeddingVector embed_image(const Raster& patch) override {
    double sum = 0;
    for (uint8_t v : patch.data()) sum += v;
    const bool bright = sum / patch.data().size() > cut_;
    return {{bright ? 1.f : 0.f, bright ? 0.f : 1.f},
            EmbeddingVector::Modality::kImage};
  }

  std::vector<EmbeddingVector> embed_texts(
      const std::vector<std::string>& terms) override {
    std::vector<EmbeddingVector> out;
    for (const auto& term : terms) {
      const bool is_building =
          std::find(building_.begin(), building_.end(), term) !=
          building_.end();
      out.push_back({{is_building ? 1.f : 0.f, is_building ? 0.f : 1.f},
                     EmbeddingVector::Modality::kText});
    }
    return out;
  }

  int dim() const override { return 2; }

 private:
  std::vector<std::string> building_;
  double cut_;
};

// Returns a fixed mask set regardless of input.
class FixedMaskGenerator : public MaskGenerator {
 public:
  FixedMaskGenerator(std::vector<Mask> for_t1, std::vector<Mask> for_t2)
      : t1_(std::move(for_t1)), t2_(std::move(for_t2)) {}

  SegmentMaskSet generate(const Raster&, int source) override {
    return {source == 1 ? t1_ : t2_, source};
  }

 private:
  std::vector<Mask> t1_, t2_;
};

}  // namespace scm::testing
