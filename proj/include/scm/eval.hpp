#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scm/change.hpp"
#include "scm/tensor.hpp"

namespace scm {

struct ConfusionCounts {
  uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  uint64_t total() const { return tp + tn + fp + fn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a,
                                   const ConfusionCounts& b) {
    return a += b;
  }
};

inline ConfusionCounts accumulate(const Mask& pred, const Mask& gt) {
  if (!pred.same_dims(gt))
    throw std::invalid_argument("accumulate: pred/gt dims differ");
  ConfusionCounts c;
  for (size_t i = 0; i < pred.data().size(); ++i) {
    const bool p = pred.data()[i] != 0, g = gt.data()[i] != 0;
    if (p && g)
      ++c.tp;
    else if (!p && !g)
      ++c.tn;
    else if (p)
      ++c.fp;
    else
      ++c.fn;
  }
  return c;
}

struct Scores {
  double f1 = 0, miou = 0, oa = 0;
};

// F1, mIoU (unweighted mean over change / non-change IoU), and overall
// accuracy. Zero denominators score 0 so all-negative tiles stay defined.
inline Scores scores(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("scores: empty counts");
  Scores s;
  const double denom_f1 = static_cast<double>(2 * c.tp + c.fp + c.fn);
  s.f1 = denom_f1 > 0 ? 2.0 * c.tp / denom_f1 : 0.0;
  const double denom_pos = static_cast<double>(c.tp + c.fp + c.fn);
  const double iou_change = denom_pos > 0 ? c.tp / denom_pos : 0.0;
  const double denom_neg = static_cast<double>(c.tn + c.fp + c.fn);
  const double iou_nochange = denom_neg > 0 ? c.tn / denom_neg : 0.0;
  s.miou = 0.5 * (iou_change + iou_nochange);
  s.oa = static_cast<double>(c.tp + c.tn) / c.total();
  return s;
}

// TP white, TN black, FP red, FN green.
inline Raster render(const Mask& pred, const Mask& gt) {
  if (!pred.same_dims(gt))
    throw std::invalid_argument("render: pred/gt dims differ");
  Raster rgb(pred.height(), pred.width(), 3);
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      const bool p = pred.at(y, x) != 0, g = gt.at(y, x) != 0;
      uint8_t r = 0, gr = 0, b = 0;
      if (p && g) r = gr = b = 255;
      else if (p && !g) r = 255;
      else if (!p && g) gr = 255;
      rgb.at(y, x, 0) = r;
      rgb.at(y, x, 1) = gr;
      rgb.at(y, x, 2) = b;
    }
  return rgb;
}

struct EvalReport {
  std::vector<std::pair<std::string, ConfusionCounts>> per_tile;

  ConfusionCounts aggregate() const {
    ConfusionCounts c;
    for (const auto& [id, counts] : per_tile) c += counts;
    return c;
  }
};

// One record per tile plus the micro-averaged aggregate.
inline void write_report(std::ostream& os, const EvalReport& report) {
  os << "tile\ttp\ttn\tfp\tfn\tf1\tmiou\toa\n";
  auto line = [&os](const std::string& id, const ConfusionCounts& c) {
    const Scores s = scores(c);
    os << id << '\t' << c.tp << '\t' << c.tn << '\t' << c.fp << '\t' << c.fn
       << '\t' << std::fixed << std::setprecision(6) << s.f1 << '\t' << s.miou
       << '\t' << s.oa << '\n';
  };
  for (const auto& [id, counts] : report.per_tile)
    if (counts.total() > 0) line(id, counts);
  const ConfusionCounts agg = report.aggregate();
  if (agg.total() > 0) line("AGGREGATE", agg);
}

}  // namespace scm
