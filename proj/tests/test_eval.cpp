#include "scm/eval.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"

using namespace scm;
using namespace scm::testing;

TEST(Accumulate, PerfectAndInvertedPredictions) {
  Mask gt = rect_mask(4, 4, 0, 0, 2, 4);
  ConfusionCounts perfect = accumulate(gt, gt);
  EXPECT_EQ(perfect.fp, 0u);
  EXPECT_EQ(perfect.fn, 0u);
  EXPECT_EQ(perfect.tp, 8u);
  EXPECT_EQ(perfect.tn, 8u);

  Mask inverted(4, 4, 1);
  for (size_t i = 0; i < inverted.data().size(); ++i)
    inverted.data()[i] = gt.data()[i] ? 0 : 1;
  ConfusionCounts inv = accumulate(inverted, gt);
  EXPECT_EQ(inv.tp, 0u);
  EXPECT_EQ(inv.tn, 0u);
  EXPECT_EQ(inv.fp, 8u);
  EXPECT_EQ(inv.fn, 8u);
}

TEST(Accumulate, HandCounted2x2) {
  Mask pred(2, 2, 1), gt(2, 2, 1);
  pred.at(0, 0) = 1;
  pred.at(1, 0) = 1;
  gt.at(0, 0) = 1;
  gt.at(0, 1) = 1;
  ConfusionCounts c = accumulate(pred, gt);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_THROW(accumulate(pred, Mask(3, 2, 1)), std::invalid_argument);
}

TEST(Scores, DirectFormulaExample) {
  Scores s = scores({50, 30, 10, 10});
  EXPECT_NEAR(s.f1, 0.8333, 1e-4);
  EXPECT_NEAR(s.oa, 0.80, 1e-9);
  EXPECT_NEAR(s.miou, (50.0 / 70 + 30.0 / 50) / 2, 1e-9);
}

TEST(Scores, PerfectAndDegenerate) {
  Scores perfect = scores({10, 10, 0, 0});
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);
  EXPECT_DOUBLE_EQ(perfect.miou, 1.0);
  EXPECT_DOUBLE_EQ(perfect.oa, 1.0);

  // positive class absent everywhere
  Scores neg = scores({0, 10, 0, 0});
  EXPECT_DOUBLE_EQ(neg.f1, 0.0);
  EXPECT_DOUBLE_EQ(neg.oa, 1.0);
  EXPECT_DOUBLE_EQ(neg.miou, 0.5);  // IoU_change 0, IoU_nochange 1

  EXPECT_THROW(scores({0, 0, 0, 0}), std::invalid_argument);
}

TEST(Scores, BoundedForRandomCounts) {
  std::mt19937 rng(2);
  for (int i = 0; i < 200; ++i) {
    ConfusionCounts c{rng() % 1000, rng() % 1000, rng() % 1000, rng() % 1000};
    if (c.total() == 0) continue;
    Scores s = scores(c);
    EXPECT_GE(s.f1, 0.0);
    EXPECT_LE(s.f1, 1.0);
    EXPECT_GE(s.miou, 0.0);
    EXPECT_LE(s.miou, 1.0);
    EXPECT_GE(s.oa, 0.0);
    EXPECT_LE(s.oa, 1.0);
  }
}

TEST(Scores, MicroAveragingConsistency) {
  std::mt19937 rng(8);
  // counts summed across tiles equal counts of the concatenated stream
  Mask pred_a(6, 6, 1), gt_a(6, 6, 1), pred_b(6, 6, 1), gt_b(6, 6, 1);
  for (auto* m : {&pred_a, &gt_a, &pred_b, &gt_b})
    for (uint8_t& v : m->data()) v = rng() % 2;
  ConfusionCounts summed = accumulate(pred_a, gt_a) + accumulate(pred_b, gt_b);

  Mask pred_cat(12, 6, 1), gt_cat(12, 6, 1);
  std::copy(pred_a.data().begin(), pred_a.data().end(),
            pred_cat.data().begin());
  std::copy(pred_b.data().begin(), pred_b.data().end(),
            pred_cat.data().begin() + 36);
  std::copy(gt_a.data().begin(), gt_a.data().end(), gt_cat.data().begin());
  std::copy(gt_b.data().begin(), gt_b.data().end(), gt_cat.data().begin() + 36);
  ConfusionCounts cat = accumulate(pred_cat, gt_cat);
  EXPECT_EQ(summed.tp, cat.tp);
  EXPECT_EQ(summed.tn, cat.tn);
  EXPECT_EQ(summed.fp, cat.fp);
  EXPECT_EQ(summed.fn, cat.fn);
  EXPECT_DOUBLE_EQ(scores(summed).f1, scores(cat).f1);
}

TEST(Render, FigureColorConvention) {
  Mask pred(2, 2, 1), gt(2, 2, 1);
  pred.at(0, 0) = 1;
  gt.at(0, 0) = 1;   // TP
  pred.at(0, 1) = 1; // FP
  gt.at(1, 0) = 1;   // FN
  Raster rgb = render(pred, gt);
  auto px = [&rgb](int y, int x) {
    return std::array<uint8_t, 3>{rgb.at(y, x, 0), rgb.at(y, x, 1),
                                  rgb.at(y, x, 2)};
  };
  EXPECT_EQ(px(0, 0), (std::array<uint8_t, 3>{255, 255, 255}));
  EXPECT_EQ(px(0, 1), (std::array<uint8_t, 3>{255, 0, 0}));
  EXPECT_EQ(px(1, 0), (std::array<uint8_t, 3>{0, 255, 0}));
  EXPECT_EQ(px(1, 1), (std::array<uint8_t, 3>{0, 0, 0}));
}

TEST(Report, AggregateMatchesSummedTiles) {
  EvalReport report;
  report.per_tile.push_back({"t1", {5, 10, 2, 3}});
  report.per_tile.push_back({"t2", {1, 20, 0, 4}});
  ConfusionCounts agg = report.aggregate();
  EXPECT_EQ(agg.tp, 6u);
  EXPECT_EQ(agg.fn, 7u);

  std::ostringstream os;
  write_report(os, report);
  const std::string text = os.str();
  EXPECT_NE(text.find("AGGREGATE"), std::string::npos);
  EXPECT_NE(text.find("t1\t5\t10\t2\t3"), std::string::npos);
}
