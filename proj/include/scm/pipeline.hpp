#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "scm/adapters.hpp"
#include "scm/change.hpp"
#include "scm/datasets.hpp"
#include "scm/eval.hpp"
#include "scm/io.hpp"
#include "scm/psa.hpp"
#include "scm/rff.hpp"
#include "scm/tensor.hpp"

namespace scm {

enum class Variant { kBase, kRff, kScm };

inline Variant parse_variant(const std::string& name) {
  if (name == "base") return Variant::kBase;
  if (name == "rff") return Variant::kRff;
  if (name == "scm") return Variant::kScm;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kBase: return "base";
    case Variant::kRff: return "rff";
    default: return "scm";
  }
}

enum class DatasetKind { kLevir, kWhu };

struct RunConfig {
  DatasetKind dataset = DatasetKind::kLevir;
  std::filesystem::path root;
  Variant variant = Variant::kScm;
  std::filesystem::path output_dir;
  std::optional<double> threshold_override;
  int workers = 1;
  int otsu_bins = 256;
  int tile_size = 1024;
  FusionOptions fusion;
  PsaOptions psa;
  PromptGroups prompts = default_prompts();
  // One fresh adapter replica per worker; never shared across threads.
  std::function<AdapterBundle()> make_adapters;
};

struct PairDiagnostics {
  double threshold = 0.0;
  bool degenerate_otsu = false;
  size_t zero_norm_pixels = 0;
  PsaDiagnostics psa;
};

struct PairResult {
  ChangeMap map;
  PairDiagnostics diag;
};

// One bi-temporal pair through the selected variant: fuse, cosine
// difference, optional semantic attention, global per-pair Otsu, binarize.
// A degenerate difference distribution yields an all-zero change map.
inline PairResult run_pair(const ImagePair& pair, const AdapterBundle& adapters,
                           const RunConfig& cfg) {
  validate_pair(pair);
  if (!adapters.extractor)
    throw std::invalid_argument("run_pair: feature extractor required");
  if (cfg.variant == Variant::kScm &&
      (!adapters.masks || !adapters.embedder))
    throw std::invalid_argument(
        "run_pair: scm variant requires mask and embedder adapters");
  const int h = pair.t1.height(), w = pair.t1.width();

  PairResult result;
  const FeaturePyramid p1 = adapters.extractor->extract(pair.t1);
  const FeaturePyramid p2 = adapters.extractor->extract(pair.t2);
  Tensor c1, c2;
  if (cfg.variant == Variant::kBase) {
    c1 = fuse_base(p1, h, w, cfg.fusion);
    c2 = fuse_base(p2, h, w, cfg.fusion);
  } else {
    c1 = fuse_top_down(p1, h, w, cfg.fusion);
    c2 = fuse_top_down(p2, h, w, cfg.fusion);
  }

  DifferenceMap diff = cosine_difference(c1, c2, &result.diag.zero_norm_pixels);
  if (cfg.variant == Variant::kScm) {
    Tensor attention =
        build_psa(pair, adapters, cfg.prompts, cfg.psa, &result.diag.psa);
    diff = apply_attention(diff, attention);
  }

  double threshold;
  if (cfg.threshold_override) {
    threshold = *cfg.threshold_override;
  } else {
    auto t = otsu_threshold(diff.data(), cfg.otsu_bins);
    if (!t) {
      result.diag.degenerate_otsu = true;
      result.map.values = Mask(h, w, 1);
      result.map.threshold_used = 0.0;
      return result;
    }
    threshold = *t;
  }
  result.map = binarize(diff, threshold);
  result.diag.threshold = threshold;
  return result;
}

inline void write_diagnostics(const std::filesystem::path& path,
                              const std::string& tile_id,
                              const PairDiagnostics& d) {
  std::ofstream os(path);
  os << "tile=" << tile_id << '\n'
     << "threshold=" << d.threshold << '\n'
     << "degenerate_otsu=" << (d.degenerate_otsu ? 1 : 0) << '\n'
     << "zero_norm_pixels=" << d.zero_norm_pixels << '\n'
     << "masks_t1=" << d.psa.masks_t1 << '\n'
     << "masks_t2=" << d.psa.masks_t2 << '\n'
     << "patches_classified=" << d.psa.patches_classified << '\n';
}

struct RunSummary {
  EvalReport report;
  std::vector<std::string> failures;  // "tile: message"
  size_t tiles_processed = 0;
};

namespace detail {

struct WorkItem {
  std::string id;
  std::function<std::pair<ImagePair, GroundTruth>()> load;
};

inline std::vector<WorkItem> build_work_list(const RunConfig& cfg) {
  std::vector<WorkItem> work;
  if (cfg.dataset == DatasetKind::kLevir) {
    for (const auto& item : enumerate_levir(cfg.root))
      work.push_back({item.id, [item] { return load_levir_item(item); }});
  } else {
    auto find_mosaic = [&cfg](const std::string& stem) {
      for (const auto& entry : std::filesystem::directory_iterator(cfg.root))
        if (entry.is_regular_file() && entry.path().stem() == stem)
          return entry.path();
      throw std::runtime_error("whu root: missing mosaic '" + stem + ".*' in " +
                               cfg.root.string());
    };
    // Mosaics are shared read-only across all tile loads.
    auto t1 = std::make_shared<Raster>(read_image(find_mosaic("A")));
    auto t2 = std::make_shared<Raster>(read_image(find_mosaic("B")));
    auto gt = std::make_shared<Mask>(read_mask(find_mosaic("label")));
    if (!t1->same_dims(*t2))
      throw std::runtime_error("whu root: mosaic dims differ");
    for (const TileSpec& spec :
         tile_whu(t1->height(), t1->width(), cfg.tile_size)) {
      std::ostringstream id;
      id << "tile_r" << spec.row_start << "_c" << spec.col_start;
      work.push_back({id.str(), [t1, t2, gt, spec, id = id.str()] {
                        ImagePair pair{read_tile(*t1, spec),
                                       read_tile(*t2, spec), id};
                        return std::pair{std::move(pair),
                                         GroundTruth{read_tile(*gt, spec)}};
                      }});
    }
  }
  return work;
}

}  // namespace detail

// Streams every tile through run_pair, persists change maps, colorized
// comparisons and diagnostics, and accumulates the metric report. Tile
// failures are recorded and the run continues.
inline RunSummary run_dataset(const RunConfig& cfg) {
  if (!cfg.make_adapters)
    throw std::invalid_argument("run_dataset: adapter factory required");
  if (cfg.workers < 1)
    throw std::invalid_argument("run_dataset: workers must be >= 1");
  std::filesystem::create_directories(cfg.output_dir);

  const auto work = detail::build_work_list(cfg);
  RunSummary summary;
  summary.report.per_tile.resize(work.size());
  std::vector<char> failed(work.size(), 0);
  std::vector<std::string> messages(work.size());

  std::atomic<size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&] {
    AdapterBundle adapters = cfg.make_adapters();
    for (size_t i = next.fetch_add(1); i < work.size();
         i = next.fetch_add(1)) {
      try {
        auto [pair, gt] = work[i].load();
        PairResult res = run_pair(pair, adapters, cfg);
        ConfusionCounts counts = accumulate(res.map.values, gt.mask);
        Raster cmp = render(res.map.values, gt.mask);
        {
          std::lock_guard<std::mutex> lock(io_mutex);
          write_mask(cfg.output_dir / (work[i].id + ".png"), res.map.values);
          write_rgb(cfg.output_dir / (work[i].id + "_cmp.png"), cmp);
          write_diagnostics(cfg.output_dir / (work[i].id + ".diag.txt"),
                            work[i].id, res.diag);
        }
        summary.report.per_tile[i] = {work[i].id, counts};
      } catch (const std::exception& e) {
        failed[i] = 1;
        messages[i] = work[i].id + ": " + e.what();
      }
    }
  };

  const int n_workers =
      std::min<int>(cfg.workers, std::max<size_t>(work.size(), 1));
  std::vector<std::thread> threads;
  for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (size_t i = 0; i < work.size(); ++i)
    if (failed[i]) summary.failures.push_back(messages[i]);
  std::erase_if(summary.report.per_tile,
                [](const auto& rec) { return rec.first.empty(); });
  summary.tiles_processed = summary.report.per_tile.size();

  std::ofstream report_os(cfg.output_dir / "report.txt");
  write_report(report_os, summary.report);
  if (!summary.failures.empty()) {
    std::ofstream fail_os(cfg.output_dir / "failures.txt");
    for (const auto& f : summary.failures) fail_os << f << '\n';
  }
  return summary;
}

}  // namespace scm
