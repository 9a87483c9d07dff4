#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scm/tensor.hpp"

namespace scm {

// Per-pixel cosine distance in [0,2], single channel.
using DifferenceMap = Tensor;

struct ChangeMap {
  Mask values;
  double threshold_used = 0.0;
};

// diff(i,j) = 1 - <c1, c2> / (|c1| |c2|) over the channel axis. Pixels
// where either vector has zero norm carry no change evidence and map to 0;
// their count is reported through zero_norm_pixels when given.
inline DifferenceMap cosine_difference(const Tensor& c1, const Tensor& c2,
                                       size_t* zero_norm_pixels = nullptr) {
  if (!c1.same_shape(c2))
    throw std::invalid_argument("cosine_difference: shape mismatch");
  DifferenceMap diff(c1.height(), c1.width(), 1);
  size_t degenerate = 0;
  for (int y = 0; y < c1.height(); ++y) {
    for (int x = 0; x < c1.width(); ++x) {
      const float* a = c1.pixel(y, x);
      const float* b = c2.pixel(y, x);
      double dot = 0, na = 0, nb = 0;
      for (int ch = 0; ch < c1.channels(); ++ch) {
        dot += static_cast<double>(a[ch]) * b[ch];
        na += static_cast<double>(a[ch]) * a[ch];
        nb += static_cast<double>(b[ch]) * b[ch];
      }
      if (na <= 0 || nb <= 0) {
        ++degenerate;
        diff.at(y, x, 0) = 0.f;
      } else if (std::equal(a, a + c1.channels(), b)) {
        diff.at(y, x, 0) = 0.f;  // identical vectors, skip rounding noise
      } else {
        double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
        diff.at(y, x, 0) = static_cast<float>(std::clamp(d, 0.0, 2.0));
      }
    }
  }
  if (zero_norm_pixels) *zero_norm_pixels = degenerate;
  return diff;
}

// Element-wise product with an attention map in [0,1].
inline DifferenceMap apply_attention(const DifferenceMap& diff,
                                     const Tensor& attention) {
  if (!diff.same_shape(attention))
    throw std::invalid_argument("apply_attention: shape mismatch");
  DifferenceMap out = diff;
  for (size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] *= attention.data()[i];
  return out;
}

// Between-class-variance maximizing threshold over a histogram of the
// non-zero values; zeros are excluded before binning. The threshold is the
// upper edge of the best split bin. Returns nullopt when fewer than two
// distinct non-zero values remain (no separating threshold exists).
inline std::optional<double> otsu_threshold(std::span<const float> values,
                                            int bins = 256) {
  if (bins < 2) throw std::invalid_argument("otsu_threshold: bins < 2");
  double lo = 0, hi = 0;
  size_t n = 0;
  for (float v : values) {
    if (v == 0.f) continue;
    if (n == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, static_cast<double>(v));
      hi = std::max(hi, static_cast<double>(v));
    }
    ++n;
  }
  if (n < 2 || hi <= lo) return std::nullopt;

  std::vector<int64_t> hist(bins, 0);
  const double scale = bins / (hi - lo);
  for (float v : values) {
    if (v == 0.f) continue;
    int bin = static_cast<int>((v - lo) * scale);
    hist[std::clamp(bin, 0, bins - 1)]++;
  }

  double mean_total = 0;
  for (int t = 0; t < bins; ++t) mean_total += static_cast<double>(t) * hist[t];
  mean_total /= static_cast<double>(n);

  double best_var = -1;
  int best_t = 0;
  int64_t w0 = 0;
  double sum0 = 0;
  for (int t = 0; t < bins - 1; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * hist[t];
    const int64_t w1 = static_cast<int64_t>(n) - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (mean_total * n - sum0) / w1;
    const double var = static_cast<double>(w0) * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return lo + (best_t + 1) * (hi - lo) / bins;
}

// Pixels strictly above the threshold become change; ties are non-change.
inline ChangeMap binarize(const DifferenceMap& diff, double threshold) {
  ChangeMap cm;
  cm.threshold_used = threshold;
  cm.values = Mask(diff.height(), diff.width(), 1);
  for (int y = 0; y < diff.height(); ++y)
    for (int x = 0; x < diff.width(); ++x)
      cm.values.at(y, x) = diff.at(y, x, 0) > threshold ? 1 : 0;
  return cm;
}

}  // namespace scm
