#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scm/adapters.hpp"
#include "scm/tensor.hpp"

namespace scm {

enum class RecalibrationMode { kRawMean, kAbsMean };
enum class InterpMode { kBilinear, kNearest };

struct FusionOptions {
  RecalibrationMode recalibration = RecalibrationMode::kRawMean;
  InterpMode interp = InterpMode::kBilinear;
};

// Scale each channel by its own mean, giving the parameter-free 1x1xC
// weight sequence.
inline Tensor recalibrate(const Tensor& level,
                          RecalibrationMode mode = RecalibrationMode::kRawMean) {
  Tensor out = level;
  const size_t plane = static_cast<size_t>(level.height()) * level.width();
  for (int ch = 0; ch < level.channels(); ++ch) {
    double sum = 0;
    for (int y = 0; y < level.height(); ++y)
      for (int x = 0; x < level.width(); ++x) {
        float v = level.at(y, x, ch);
        sum += (mode == RecalibrationMode::kAbsMean) ? std::fabs(v) : v;
      }
    const float weight = static_cast<float>(sum / plane);
    for (int y = 0; y < level.height(); ++y)
      for (int x = 0; x < level.width(); ++x) out.at(y, x, ch) *= weight;
  }
  return out;
}

// Equidistant channel subsampling: output channel k takes input channel
// floor(k * c_high / c_low).
inline Tensor resample_channels(const Tensor& src, int target_channels) {
  const int c_high = src.channels();
  if (target_channels < 1 || target_channels > c_high)
    throw std::invalid_argument("resample_channels: need 1 <= c_low <= c_high");
  if (target_channels == c_high) return src;
  Tensor out(src.height(), src.width(), target_channels);
  for (int k = 0; k < target_channels; ++k) {
    const int from = static_cast<int>(
        static_cast<int64_t>(k) * c_high / target_channels);
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x)
        out.at(y, x, k) = src.at(y, x, from);
  }
  return out;
}

// Corner-aligned spatial upsampling. Nearest-neighbor variant kept for
// ablation.
inline Tensor upsample_spatial(const Tensor& src, int target_h, int target_w,
                               InterpMode interp = InterpMode::kBilinear) {
  if (target_h < src.height() || target_w < src.width())
    throw std::invalid_argument("upsample_spatial: target smaller than source");
  if (target_h == src.height() && target_w == src.width()) return src;

  Tensor out(target_h, target_w, src.channels());
  const double sy = target_h > 1
                        ? static_cast<double>(src.height() - 1) / (target_h - 1)
                        : 0.0;
  const double sx = target_w > 1
                        ? static_cast<double>(src.width() - 1) / (target_w - 1)
                        : 0.0;
  for (int y = 0; y < target_h; ++y) {
    const double fy = y * sy;
    int y0, y1;
    double wy;
    if (interp == InterpMode::kNearest) {
      y0 = y1 = std::min(static_cast<int>(std::lround(fy)), src.height() - 1);
      wy = 0;
    } else {
      y0 = std::min(static_cast<int>(fy), src.height() - 1);
      y1 = std::min(y0 + 1, src.height() - 1);
      wy = fy - y0;
    }
    for (int x = 0; x < target_w; ++x) {
      const double fx = x * sx;
      int x0, x1;
      double wx;
      if (interp == InterpMode::kNearest) {
        x0 = x1 = std::min(static_cast<int>(std::lround(fx)), src.width() - 1);
        wx = 0;
      } else {
        x0 = std::min(static_cast<int>(fx), src.width() - 1);
        x1 = std::min(x0 + 1, src.width() - 1);
        wx = fx - x0;
      }
      for (int ch = 0; ch < src.channels(); ++ch) {
        const double top =
            (1 - wx) * src.at(y0, x0, ch) + wx * src.at(y0, x1, ch);
        const double bot =
            (1 - wx) * src.at(y1, x0, ch) + wx * src.at(y1, x1, ch);
        out.at(y, x, ch) = static_cast<float>((1 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

namespace detail {

inline Tensor concat_channels(const Tensor& a, const Tensor& b,
                              const Tensor& c) {
  Tensor out(a.height(), a.width(), a.channels() + b.channels() + c.channels());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      int k = 0;
      for (int ch = 0; ch < a.channels(); ++ch) out.at(y, x, k++) = a.at(y, x, ch);
      for (int ch = 0; ch < b.channels(); ++ch) out.at(y, x, k++) = b.at(y, x, ch);
      for (int ch = 0; ch < c.channels(); ++ch) out.at(y, x, k++) = c.at(y, x, ch);
    }
  return out;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

}  // namespace detail

// Recalibrate every level, merge top-down (coarse level aligned spatially
// then channel-resampled onto the finer one, element-wise added), then
// upsample {m3, m4, r5} to image resolution and concatenate. Channel block
// order in the output is level 3, then 4, then 5.
inline Tensor fuse_top_down(const FeaturePyramid& pyr, int image_h, int image_w,
                            const FusionOptions& opts = {}) {
  validate_pyramid(pyr);
  const Tensor r3 = recalibrate(pyr.levels[0], opts.recalibration);
  const Tensor r4 = recalibrate(pyr.levels[1], opts.recalibration);
  const Tensor r5 = recalibrate(pyr.levels[2], opts.recalibration);

  Tensor r5_on_4 = resample_channels(
      upsample_spatial(r5, r4.height(), r4.width(), opts.interp),
      r4.channels());
  const Tensor m4 = detail::add(r4, r5_on_4);

  Tensor m4_on_3 = resample_channels(
      upsample_spatial(m4, r3.height(), r3.width(), opts.interp),
      r3.channels());
  const Tensor m3 = detail::add(r3, m4_on_3);

  return detail::concat_channels(
      upsample_spatial(m3, image_h, image_w, opts.interp),
      upsample_spatial(m4, image_h, image_w, opts.interp),
      upsample_spatial(r5, image_h, image_w, opts.interp));
}

// Ablation baseline: raw levels upsampled and concatenated, no
// recalibration and no merging.
inline Tensor fuse_base(const FeaturePyramid& pyr, int image_h, int image_w,
                        const FusionOptions& opts = {}) {
  validate_pyramid(pyr);
  return detail::concat_channels(
      upsample_spatial(pyr.levels[0], image_h, image_w, opts.interp),
      upsample_spatial(pyr.levels[1], image_h, image_w, opts.interp),
      upsample_spatial(pyr.levels[2], image_h, image_w, opts.interp));
}

}  // namespace scm
