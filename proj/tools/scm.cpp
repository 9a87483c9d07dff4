// Command-line driver for the change-detection pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "scm/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// key = value lines, '#' comments. Keys mirror the CLI flag names.
std::map<std::string, std::string> load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Prompt file: "building:" / "non-building:" section headers, one term
// per line.
scm::PromptGroups load_prompts(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open prompt file " + path.string());
  scm::PromptGroups groups;
  std::vector<std::string>* current = nullptr;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "building:") {
      current = &groups.building_terms;
    } else if (line == "non-building:") {
      current = &groups.nonbuilding_terms;
    } else {
      if (!current)
        throw std::runtime_error("prompt file: term before section header");
      current->push_back(line);
    }
  }
  scm::validate_prompts(groups);
  return groups;
}

int cmd_run(const scm::RunConfig& cfg) {
  scm::RunSummary summary = scm::run_dataset(cfg);
  for (const auto& f : summary.failures) std::cerr << "FAILED " << f << '\n';
  if (summary.tiles_processed == 0) {
    std::cerr << "warning: no tiles processed\n";
    return 2;
  }
  const scm::Scores s = scm::scores(summary.report.aggregate());
  std::cout << "tiles=" << summary.tiles_processed << " f1=" << s.f1
            << " miou=" << s.miou << " oa=" << s.oa << '\n';
  return summary.failures.empty() ? 0 : 1;
}

// Recompute metrics from persisted prediction maps against ground truth.
int cmd_eval(const fs::path& pred_dir, const fs::path& gt_root) {
  scm::EvalReport report;
  std::vector<fs::path> preds;
  for (const auto& entry : fs::directory_iterator(pred_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".png" &&
        name.find("_cmp") == std::string::npos)
      preds.push_back(entry.path());
  }
  std::sort(preds.begin(), preds.end());
  for (const auto& pred_path : preds) {
    fs::path gt_path = gt_root / pred_path.filename();
    if (!fs::exists(gt_path)) gt_path = gt_root / "label" / pred_path.filename();
    if (!fs::exists(gt_path)) {
      std::cerr << "warning: no ground truth for " << pred_path.filename()
                << ", skipped\n";
      continue;
    }
    scm::Mask pred = scm::read_mask(pred_path);
    scm::Mask gt = scm::read_mask(gt_path);
    report.per_tile.push_back(
        {pred_path.stem().string(), scm::accumulate(pred, gt)});
  }
  if (report.per_tile.empty()) {
    std::cerr << "no evaluable predictions found\n";
    return 2;
  }
  scm::write_report(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-change pipeline for bi-temporal remote sensing pairs"};
  app.require_subcommand(1);

  std::string dataset = "levir", variant = "scm", root, out;
  std::string config_path, prompts_path, adapter_kind = "synthetic";
  std::optional<double> threshold;
  int workers = 1;
  uint64_t synth_seed = 0;
  std::string recal = "raw-mean", interp = "bilinear";

  auto* run = app.add_subcommand("run", "run change detection over a dataset");
  run->add_option("--config", config_path, "key=value config file");
  run->add_option("--dataset", dataset)->check(CLI::IsMember({"levir", "whu"}));
  run->add_option("--root", root, "dataset root directory");
  run->add_option("--variant", variant)
      ->check(CLI::IsMember({"base", "rff", "scm"}));
  run->add_option("--out", out, "output directory");
  run->add_option("--prompts", prompts_path, "prompt group file");
  run->add_option("--threshold", threshold, "bypass Otsu with a fixed threshold");
  run->add_option("--workers", workers)->check(CLI::PositiveNumber);
  run->add_option("--synthetic-backbone", synth_seed,
                  "use the deterministic synthetic backbone with this seed");
  run->add_option("--adapter", adapter_kind, "adapter kind (synthetic)");
  run->add_option("--recalibration", recal)
      ->check(CLI::IsMember({"raw-mean", "abs-mean"}));
  run->add_option("--interp", interp)
      ->check(CLI::IsMember({"bilinear", "nearest"}));

  std::string pred_dir, gt_root;
  auto* eval = app.add_subcommand("eval", "recompute metrics from saved maps");
  eval->add_option("--pred", pred_dir, "directory of prediction maps")
      ->required();
  eval->add_option("--gt", gt_root, "ground-truth root")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return cmd_eval(pred_dir, gt_root);

    if (!config_path.empty()) {
      auto kv = load_config(config_path);
      auto take = [&kv](const std::string& key, auto& target) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::istringstream(it->second) >> target;
      };
      // CLI flags given explicitly win over config values.
      if (run->count("--dataset") == 0) take("dataset", dataset);
      if (run->count("--root") == 0) take("root", root);
      if (run->count("--variant") == 0) take("variant", variant);
      if (run->count("--out") == 0) take("out", out);
      if (run->count("--prompts") == 0) take("prompts", prompts_path);
      if (run->count("--workers") == 0) take("workers", workers);
      if (run->count("--adapter") == 0) take("adapter", adapter_kind);
      if (run->count("--synthetic-backbone") == 0) take("seed", synth_seed);
      if (run->count("--recalibration") == 0) take("recalibration", recal);
      if (run->count("--interp") == 0) take("interp", interp);
      if (run->count("--threshold") == 0 && kv.count("threshold"))
        threshold = std::stod(kv.at("threshold"));
    }
    if (root.empty() || out.empty()) {
      std::cerr << "run: --root and --out are required (flag or config)\n";
      return 64;
    }

    scm::RunConfig cfg;
    cfg.dataset =
        dataset == "levir" ? scm::DatasetKind::kLevir : scm::DatasetKind::kWhu;
    cfg.root = root;
    cfg.variant = scm::parse_variant(variant);
    cfg.output_dir = out;
    cfg.threshold_override = threshold;
    cfg.workers = workers;
    cfg.fusion.recalibration = recal == "abs-mean"
                                   ? scm::RecalibrationMode::kAbsMean
                                   : scm::RecalibrationMode::kRawMean;
    cfg.fusion.interp = interp == "nearest" ? scm::InterpMode::kNearest
                                            : scm::InterpMode::kBilinear;
    if (!prompts_path.empty()) cfg.prompts = load_prompts(prompts_path);

    if (adapter_kind == "synthetic") {
      cfg.make_adapters = [synth_seed] {
        return scm::synthetic_backbone(synth_seed);
      };
    } else {
      // Pretrained backends register here once their weights are present
      // under SCM_WEIGHTS_DIR; only the synthetic backbone ships built in.
      const char* weights_dir = std::getenv("SCM_WEIGHTS_DIR");
      std::cerr << "configuration error: no backend available for adapter '"
                << adapter_kind << "'"
                << (weights_dir ? std::string(" (SCM_WEIGHTS_DIR=") +
                                      weights_dir + ")"
                                : " (SCM_WEIGHTS_DIR unset)")
                << '\n';
      return 78;
    }
    return cmd_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
