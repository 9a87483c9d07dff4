#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scm/adapters.hpp"
#include "scm/tensor.hpp"

namespace scm {

struct PromptGroups {
  std::vector<std::string> building_terms;
  std::vector<std::string> nonbuilding_terms;
};

inline PromptGroups default_prompts() {
  return {{"roof", "rooftop", "building", "house", "apartment", "residential",
           "factory"},
          {"baseball", "diamond", "bareland", "swimming pool",
           "basketball court", "roundabout", "playground"}};
}

inline void validate_prompts(const PromptGroups& prompts) {
  if (prompts.building_terms.empty() || prompts.nonbuilding_terms.empty())
    throw std::invalid_argument("PromptGroups: both groups must be non-empty");
  std::set<std::string> seen;
  for (const auto& t : prompts.building_terms)
    if (!seen.insert(t).second)
      throw std::invalid_argument("PromptGroups: duplicate term '" + t + "'");
  for (const auto& t : prompts.nonbuilding_terms)
    if (!seen.insert(t).second)
      throw std::invalid_argument("PromptGroups: duplicate term '" + t + "'");
}

struct PsaOptions {
  // Logit scale applied to cosine similarities before the softmax.
  double temperature = 100.0;
  // Sentence template wrapped around each bare term; "{term}" is
  // substituted. Empty string sends the raw term.
  std::string prompt_template = "a satellite photo of a {term}";
  // Blank pixels outside the mask inside the bounding box.
  bool blank_background = false;
  // Average instead of add when combining the two temporal score maps.
  bool average_combine = false;
};

inline std::string render_prompt(const std::string& term,
                                 const std::string& tmpl) {
  if (tmpl.empty()) return term;
  const std::string token = "{term}";
  auto pos = tmpl.find(token);
  if (pos == std::string::npos) return tmpl + " " + term;
  std::string out = tmpl;
  out.replace(pos, token.size(), term);
  return out;
}

struct PatchScore {
  int mask_index = 0;
  double p_bld = 0.0;
};

// Crop of the mask's bounding box, padded by edge replication so both
// sides are at least 16 px. Background inside the box is kept unless
// blank_background is set.
inline Raster extract_patch(const Raster& image, const Mask& mask,
                            bool blank_background = false) {
  if (!mask.empty() &&
      (mask.height() != image.height() || mask.width() != image.width()))
    throw std::invalid_argument("extract_patch: mask/image dims differ");
  int y0 = image.height(), y1 = -1, x0 = image.width(), x1 = -1;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(y, x)) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
      }
  if (y1 < 0) throw std::invalid_argument("extract_patch: empty mask");

  constexpr int kMinSide = 16;
  const int box_h = y1 - y0 + 1, box_w = x1 - x0 + 1;
  const int out_h = std::max(box_h, kMinSide);
  const int out_w = std::max(box_w, kMinSide);
  const int pad_top = (out_h - box_h) / 2;
  const int pad_left = (out_w - box_w) / 2;

  Raster patch(out_h, out_w, image.channels());
  for (int y = 0; y < out_h; ++y) {
    const int sy = std::clamp(y - pad_top, 0, box_h - 1) + y0;
    for (int x = 0; x < out_w; ++x) {
      const int sx = std::clamp(x - pad_left, 0, box_w - 1) + x0;
      const bool keep = !blank_background || mask.at(sy, sx);
      for (int ch = 0; ch < image.channels(); ++ch)
        patch.at(y, x, ch) = keep ? image.at(sy, sx, ch) : 0;
    }
  }
  return patch;
}

namespace detail {

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: embedding dims differ");
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na <= 0 || nb <= 0)
    throw std::invalid_argument("cosine: zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Softmax over all terms, then sum of the building-group probabilities.
inline double softmax_building_mass(const std::vector<double>& logits,
                                    size_t n_building) {
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0;
  std::vector<double> e(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(logits[i] - m);
    z += e[i];
  }
  double p = 0;
  for (size_t i = 0; i < n_building; ++i) p += e[i] / z;
  return p;
}

}  // namespace detail

// Prompt-similarity classification of one patch: cosine similarity of the
// patch embedding against every term embedding, softmax over all terms,
// building probability = mass of the building group.
inline double classify_patch(const Raster& patch, const PromptGroups& prompts,
                             Embedder& embedder, const PsaOptions& opts = {}) {
  validate_prompts(prompts);
  std::vector<std::string> sentences;
  sentences.reserve(prompts.building_terms.size() +
                    prompts.nonbuilding_terms.size());
  for (const auto& t : prompts.building_terms)
    sentences.push_back(render_prompt(t, opts.prompt_template));
  for (const auto& t : prompts.nonbuilding_terms)
    sentences.push_back(render_prompt(t, opts.prompt_template));

  const EmbeddingVector img = embedder.embed_image(patch);
  const auto texts = embedder.embed_texts(sentences);

  std::vector<double> logits(texts.size());
  for (size_t i = 0; i < texts.size(); ++i)
    logits[i] = opts.temperature * detail::cosine(img.values, texts[i].values);
  return detail::softmax_building_mass(logits, prompts.building_terms.size());
}

// Zero-initialized score map; each mask stamps its building probability,
// overlaps resolved by per-pixel max.
inline Tensor rasterize_scores(const SegmentMaskSet& set,
                               const std::vector<PatchScore>& scores, int h,
                               int w) {
  if (set.masks.size() != scores.size())
    throw std::invalid_argument("rasterize_scores: score/mask count mismatch");
  Tensor map(h, w, 1);
  for (size_t i = 0; i < set.masks.size(); ++i) {
    const Mask& m = set.masks[scores[i].mask_index];
    if (m.height() != h || m.width() != w)
      throw std::invalid_argument("rasterize_scores: mask dims mismatch");
    const float p = static_cast<float>(scores[i].p_bld);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (m.at(y, x)) map.at(y, x, 0) = std::max(map.at(y, x, 0), p);
  }
  return map;
}

// Element-wise sum of the two temporal score maps, range [0,2].
inline Tensor combine_bitemporal(const Tensor& s1, const Tensor& s2,
                                 bool average = false) {
  if (!s1.same_shape(s2))
    throw std::invalid_argument("combine_bitemporal: shape mismatch");
  Tensor out = s1;
  for (size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] += s2.data()[i];
    if (average) out.data()[i] *= 0.5f;
  }
  return out;
}

// Piecewise remap: 1 at P >= 0.5, 2P on (0, 0.5), 0 for background. A
// covered pixel scoring exactly 0 follows the middle branch's limit.
inline Tensor piecewise_remap(const Tensor& combined) {
  Tensor out = combined;
  for (float& v : out.data()) {
    if (v >= 0.5f)
      v = 1.f;
    else if (v > 0.f)
      v *= 2.f;
    else
      v = 0.f;
  }
  return out;
}

struct PsaDiagnostics {
  size_t masks_t1 = 0;
  size_t masks_t2 = 0;
  size_t patches_classified = 0;
};

// Full scheme: segment each temporal image, classify every patch against
// the prompt groups, rasterize, sum bi-temporally, remap.
inline Tensor build_psa(const ImagePair& pair, const AdapterBundle& adapters,
                        const PromptGroups& prompts, const PsaOptions& opts = {},
                        PsaDiagnostics* diag = nullptr) {
  validate_pair(pair);
  if (!adapters.masks || !adapters.embedder)
    throw std::invalid_argument("build_psa: mask/embedder adapters required");
  const int h = pair.t1.height(), w = pair.t1.width();

  auto score_temporal = [&](const Raster& image, int source) {
    SegmentMaskSet set = adapters.masks->generate(image, source);
    std::vector<PatchScore> scores;
    scores.reserve(set.masks.size());
    for (size_t i = 0; i < set.masks.size(); ++i) {
      Raster patch = extract_patch(image, set.masks[i], opts.blank_background);
      scores.push_back({static_cast<int>(i),
                        classify_patch(patch, prompts, *adapters.embedder,
                                       opts)});
    }
    if (diag) {
      (source == 1 ? diag->masks_t1 : diag->masks_t2) = set.masks.size();
      diag->patches_classified += scores.size();
    }
    return rasterize_scores(set, scores, h, w);
  };

  Tensor combined = combine_bitemporal(score_temporal(pair.t1, 1),
                                       score_temporal(pair.t2, 2),
                                       opts.average_combine);
  return piecewise_remap(combined);
}

}  // namespace scm
