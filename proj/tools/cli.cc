/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankfuse/checkpoint.h"
#include "rankfuse/dataio.h"
#include "rankfuse/ensemble.h"
#include "rankfuse/error.h"
#include "rankfuse/metrics.h"
#include "rankfuse/parallel.h"
#include "rankfuse/synthetic.h"
#include "rankfuse/trainer.h"

namespace rankfuse::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

// Provenance record written next to every command's outputs.
class Manifest {
 public:
  explicit Manifest(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  ordered_json& config() { return config_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void AddInput(const std::string& name, const fs::path& path) {
    inputs_[name] = {{"path", path.string()},
                     {"sha256", Sha256Hex(ReadFileBytes(path))}};
  }
  void AddOutput(const std::string& name, const fs::path& path) {
    outputs_[name] = {{"path", path.string()},
                      {"sha256", Sha256Hex(ReadFileBytes(path))}};
  }
  ordered_json& extra() { return extra_; }

  void Write(const fs::path& path) const {
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    ordered_json j;
    j["command"] = command_;
    j["config"] = config_;
    if (seed_) j["seed"] = *seed_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    j["threads"] = DefaultThreadCount();
    j["duration_seconds"] = seconds;
    WriteFileBytes(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  ordered_json config_ = ordered_json::object();
  std::optional<std::uint64_t> seed_;
  ordered_json inputs_ = ordered_json::object();
  ordered_json outputs_ = ordered_json::object();
  ordered_json extra_ = ordered_json::object();
};

ordered_json ReportJson(const MetricsReport& r) {
  return {{"ndcg_v2t", r.ndcg_v2t},
          {"ndcg_t2v", r.ndcg_t2v},
          {"ndcg_avg", r.ndcg_avg},
          {"map_v2t", r.map_v2t},
          {"map_t2v", r.map_t2v},
          {"map_avg", r.map_avg},
          {"n_queries_v2t", r.n_queries_v2t},
          {"n_queries_t2v", r.n_queries_t2v},
          {"n_map_queries_v2t", r.n_map_queries_v2t},
          {"n_map_queries_t2v", r.n_map_queries_t2v}};
}

std::string HumanTable(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "        v2t     t2v     avg\n"
                "nDCG  %6.2f  %6.2f  %6.2f\n"
                "mAP   %6.2f  %6.2f  %6.2f\n",
                100 * r.ndcg_v2t, 100 * r.ndcg_t2v, 100 * r.ndcg_avg,
                100 * r.map_v2t, 100 * r.map_t2v, 100 * r.map_avg);
  return buf;
}

// metrics.txt (key=value) and metrics.json side by side.
void WriteReports(const fs::path& dir, const MetricsReport& report,
                  Manifest& manifest) {
  WriteFileBytes(dir / "metrics.txt", FormatReport(report));
  WriteFileBytes(dir / "metrics.json", ReportJson(report).dump(2) + "\n");
  manifest.AddOutput("metrics_txt", dir / "metrics.txt");
  manifest.AddOutput("metrics_json", dir / "metrics.json");
}

// Relevance between the annotations named by a matrix's row and column ids.
RelevanceMatrix RelevanceFor(const SimilarityMatrix& sim,
                             const std::vector<CaptionAnnotation>& annotations) {
  std::unordered_map<std::string, const CaptionAnnotation*> by_id;
  for (const auto& a : annotations) by_id.emplace(a.id, &a);
  auto pick = [&](const std::vector<std::string>& ids) {
    std::vector<CaptionAnnotation> out;
    for (const auto& id : ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw DataError("no annotation for id '" + id + "'");
      out.push_back(*it->second);
    }
    return out;
  };
  return ComputeRelevanceMatrix(pick(sim.row_ids), pick(sim.col_ids));
}

// --- gen ---

struct GenOptions {
  SyntheticSpec spec;
  std::string out_dir;
};

void RunGen(const GenOptions& o, std::ostream& out) {
  const SyntheticDataset data = GenerateSynthetic(o.spec);
  const fs::path dir(o.out_dir);
  SaveDataset(dir, data.dataset);

  Manifest m("gen");
  m.set_seed(o.spec.seed);
  m.config() = {{"n_items", o.spec.n_items},
                {"n_verb_classes", o.spec.n_verb_classes},
                {"n_noun_classes", o.spec.n_noun_classes},
                {"nouns_per_caption", o.spec.nouns_per_caption},
                {"n_clusters", o.spec.n_clusters},
                {"video_dim", o.spec.video_dim},
                {"text_dim", o.spec.text_dim},
                {"latent_dim", o.spec.latent_dim},
                {"noise_sigma", o.spec.noise_sigma}};
  for (const char* f : {"annotations.jsonl", "video.rfft", "text.rfft", "splits.tsv"}) {
    m.AddOutput(f, dir / f);
  }
  m.extra()["counts"] = {
      {"items", data.dataset.size()},
      {"train", data.dataset.IndicesOf(Split::kTrain).size()},
      {"validation", data.dataset.IndicesOf(Split::kValidation).size()},
      {"test", data.dataset.IndicesOf(Split::kTest).size()}};
  m.Write(dir / "manifest.json");
  out << "wrote " << data.dataset.size() << " items to " << dir.string() << "\n";
}

// --- train ---

struct TrainOptions {
  TrainConfig cfg;
  std::string data_dir;
  std::string out_dir;
  std::string loss = "augmented-triplet";
  std::string mining = "hardest";
  bool no_relevant_positives = false;
  std::size_t cutoff = 0;
};

void RunTrain(TrainOptions o, const CLI::App& cmd, std::ostream& out,
              std::ostream& err) {
  TrainConfig& cfg = o.cfg;
  cfg.loss_mode = ParseLossMode(o.loss);
  cfg.triplet.mining = ParseMiningMode(o.mining);
  cfg.triplet.use_relevant_positives = !o.no_relevant_positives;
  if (o.cutoff > 0) cfg.ndcg.cutoff = o.cutoff;
  cfg.augment.partner_threshold = cfg.triplet.relevance_threshold;

  const std::vector<std::string> triplet_only = {
      "--margin", "--threshold", "--mining", "--no-relevant-positives",
      "--aug-prob", "--mix-low", "--mix-high"};
  const std::vector<std::string> ndcg_only = {
      "--temperature", "--sinkhorn-iters", "--sinkhorn-eps", "--cutoff",
      "--gain-base"};
  const auto& ignored = cfg.loss_mode == LossMode::kNeuralNdcg ? triplet_only
                                                               : ndcg_only;
  for (const auto& flag : ignored) {
    if (cmd.count(flag) > 0) {
      err << "warning: " << flag << " has no effect with --loss "
          << LossModeName(cfg.loss_mode) << "; ignored\n";
    }
  }

  const fs::path data_dir(o.data_dir), dir(o.out_dir);
  const Dataset dataset = LoadDataset(data_dir);
  const TrainResult result = Train(dataset, cfg);

  EnsureDir(dir);
  SaveCheckpoint(dir / "model.rfmd", result.model);
  WriteFileBytes(dir / "history.tsv", FormatHistory(result.history));
  std::string ids;
  for (const auto& id : result.training_ids) ids += id + "\n";
  WriteFileBytes(dir / "training_ids.txt", ids);

  Manifest m("train");
  m.set_seed(cfg.seed);
  ordered_json c = {{"loss", LossModeName(cfg.loss_mode)},
                    {"epochs", cfg.epochs},
                    {"learning_rate", cfg.adam.learning_rate},
                    {"adam_beta1", cfg.adam.beta1},
                    {"adam_beta2", cfg.adam.beta2},
                    {"adam_eps", cfg.adam.eps},
                    {"batch_size", cfg.batch_size},
                    {"embed_dim", cfg.embed_dim},
                    {"subset_fraction", cfg.subset_fraction}};
  if (cfg.loss_mode == LossMode::kAugmentedTriplet) {
    c["margin"] = cfg.triplet.margin;
    c["relevance_threshold"] = cfg.triplet.relevance_threshold;
    c["mining"] = MiningModeName(cfg.triplet.mining);
    c["use_relevant_positives"] = cfg.triplet.use_relevant_positives;
    c["augment_probability"] = cfg.augment.probability;
    c["mix_low"] = cfg.augment.mix_low;
    c["mix_high"] = cfg.augment.mix_high;
  } else {
    c["temperature"] = cfg.ndcg.temperature;
    c["sinkhorn_iters"] = cfg.ndcg.sinkhorn_iters;
    c["sinkhorn_eps"] = cfg.ndcg.sinkhorn_eps;
    c["cutoff"] = cfg.ndcg.cutoff ? ordered_json(*cfg.ndcg.cutoff) : ordered_json(nullptr);
    c["gain_base"] = cfg.ndcg.gain_base;
  }
  m.config() = c;
  for (const char* f : {"annotations.jsonl", "video.rfft", "text.rfft", "splits.tsv"}) {
    m.AddInput(f, data_dir / f);
  }
  m.AddOutput("checkpoint", dir / "model.rfmd");
  m.AddOutput("history", dir / "history.tsv");
  m.AddOutput("training_ids", dir / "training_ids.txt");
  m.extra()["training_ids_count"] = result.training_ids.size();
  m.extra()["initial_validation"] = ReportJson(result.initial_validation);
  m.Write(dir / "manifest.json");

  const auto& last = result.history.epochs.back();
  out << "trained " << LossModeName(cfg.loss_mode) << " on "
      << result.training_ids.size() << " items for " << cfg.epochs
      << " epochs; validation nDCG " << result.initial_validation.ndcg_avg
      << " -> " << last.val_ndcg_avg << "\n";
}

// --- eval ---

struct EvalOptions {
  std::string checkpoint;
  std::string data_dir;
  std::string split = "validation";
  std::string out_dir;
  double pos_threshold = 0.0;
};

void RunEval(const EvalOptions& o, std::ostream& out) {
  const fs::path data_dir(o.data_dir), dir(o.out_dir);
  const Split split = ParseSplit(o.split);
  const TwoTowerModel model = LoadCheckpoint(o.checkpoint);
  const Dataset dataset = LoadDataset(data_dir);
  if (dataset.video_features.cols() != model.video.input_dim() ||
      dataset.text_features.cols() != model.text.input_dim()) {
    throw DataError("checkpoint expects feature dims (" +
                    std::to_string(model.video.input_dim()) + ", " +
                    std::to_string(model.text.input_dim()) +
                    ") but the dataset has (" +
                    std::to_string(dataset.video_features.cols()) + ", " +
                    std::to_string(dataset.text_features.cols()) + ")");
  }
  const auto indices = dataset.IndicesOf(split);
  if (indices.empty()) throw DataError("split '" + o.split + "' is empty");

  // Scores are evaluated at the precision they are stored with, so the report
  // can be reproduced from the written matrix.
  SimilarityMatrix sim = ScoreItems(model, dataset, indices);
  sim.values = RoundToFloat(sim.values);
  const MetricsReport report =
      Evaluate(sim, RelevanceOfItems(dataset, indices), o.pos_threshold);

  EnsureDir(dir);
  SaveSimilarity(dir / "similarity.rfsm", sim);
  Manifest m("eval");
  m.config() = {{"split", o.split}, {"pos_threshold", o.pos_threshold}};
  m.AddInput("checkpoint", o.checkpoint);
  m.AddInput("annotations", data_dir / "annotations.jsonl");
  m.AddInput("video", data_dir / "video.rfft");
  m.AddInput("text", data_dir / "text.rfft");
  m.AddInput("splits", data_dir / "splits.tsv");
  m.AddOutput("similarity", dir / "similarity.rfsm");
  WriteReports(dir, report, m);
  m.Write(dir / "manifest.json");
  out << HumanTable(report);
}

// --- ensemble ---

struct EnsembleOptions {
  std::vector<std::string> matrices;
  std::string annotations;
  std::string out_dir;
  double pos_threshold = 0.0;
};

void RunEnsemble(const EnsembleOptions& o, std::ostream& out) {
  std::vector<SimilarityMatrix> inputs;
  for (const auto& path : o.matrices) inputs.push_back(LoadSimilarity(path));
  SimilarityMatrix mean = MeanSimilarity(inputs);
  mean.values = RoundToFloat(mean.values);
  const auto annotations = LoadAnnotations(o.annotations);
  const MetricsReport report =
      Evaluate(mean, RelevanceFor(mean, annotations), o.pos_threshold);

  const fs::path dir(o.out_dir);
  EnsureDir(dir);
  SaveSimilarity(dir / "similarity.rfsm", mean);
  Manifest m("ensemble");
  m.config() = {{"pos_threshold", o.pos_threshold},
                {"n_models", o.matrices.size()}};
  for (std::size_t i = 0; i < o.matrices.size(); ++i) {
    m.AddInput("matrix_" + std::to_string(i), o.matrices[i]);
  }
  m.AddInput("annotations", o.annotations);
  m.AddOutput("similarity", dir / "similarity.rfsm");
  WriteReports(dir, report, m);
  m.Write(dir / "manifest.json");
  out << HumanTable(report);
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Rank-aware cross-modal retrieval: train, evaluate, ensemble"};
  app.name("rankfuse");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic clustered dataset");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--n-items", gen.spec.n_items, "Number of items");
  gen_cmd->add_option("--verbs", gen.spec.n_verb_classes, "Verb classes");
  gen_cmd->add_option("--nouns", gen.spec.n_noun_classes, "Noun classes");
  gen_cmd->add_option("--nouns-per-caption", gen.spec.nouns_per_caption,
                      "Noun classes per caption");
  gen_cmd->add_option("--clusters", gen.spec.n_clusters, "Semantic clusters");
  gen_cmd->add_option("--video-dim", gen.spec.video_dim, "Video feature size");
  gen_cmd->add_option("--text-dim", gen.spec.text_dim, "Text feature size");
  gen_cmd->add_option("--latent-dim", gen.spec.latent_dim, "Prototype size");
  gen_cmd->add_option("--noise", gen.spec.noise_sigma, "Feature noise sigma");
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a two-tower model");
  train_cmd->add_option("--data", train.data_dir, "Dataset directory")->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();
  train_cmd->add_option("--loss", train.loss, "augmented-triplet | neural-ndcg")
      ->check(CLI::IsMember({"augmented-triplet", "neural-ndcg"}));
  train_cmd->add_option("--epochs", train.cfg.epochs, "Training epochs");
  train_cmd->add_option("--lr", train.cfg.adam.learning_rate, "Adam learning rate");
  train_cmd->add_option("--adam-beta1", train.cfg.adam.beta1, "Adam beta1");
  train_cmd->add_option("--adam-beta2", train.cfg.adam.beta2, "Adam beta2");
  train_cmd->add_option("--adam-eps", train.cfg.adam.eps, "Adam epsilon");
  train_cmd->add_option("--batch-size", train.cfg.batch_size, "Mini-batch size");
  train_cmd->add_option("--embed-dim", train.cfg.embed_dim, "Embedding size");
  train_cmd->add_option("--subset-fraction", train.cfg.subset_fraction,
                        "Fraction of the train split used for training");
  train_cmd->add_option("--seed", train.cfg.seed, "Random seed");
  train_cmd->add_option("--margin", train.cfg.triplet.margin, "Triplet margin");
  train_cmd->add_option("--threshold", train.cfg.triplet.relevance_threshold,
                        "Relevance threshold for negatives, positives and partners");
  train_cmd->add_option("--mining", train.mining, "hardest | random")
      ->check(CLI::IsMember({"hardest", "random"}));
  train_cmd->add_flag("--no-relevant-positives", train.no_relevant_positives,
                      "Disable the extra relevant-positive term");
  train_cmd->add_option("--aug-prob", train.cfg.augment.probability,
                        "Per-item augmentation probability");
  train_cmd->add_option("--mix-low", train.cfg.augment.mix_low,
                        "Lowest anchor mixing weight");
  train_cmd->add_option("--mix-high", train.cfg.augment.mix_high,
                        "Highest anchor mixing weight");
  train_cmd->add_option("--temperature", train.cfg.ndcg.temperature,
                        "Soft sort temperature");
  train_cmd->add_option("--sinkhorn-iters", train.cfg.ndcg.sinkhorn_iters,
                        "Maximum Sinkhorn passes");
  train_cmd->add_option("--sinkhorn-eps", train.cfg.ndcg.sinkhorn_eps,
                        "Sinkhorn convergence tolerance");
  train_cmd->add_option("--cutoff", train.cutoff,
                        "NeuralNDCG rank cutoff (0 = full list)");
  train_cmd->add_option("--gain-base", train.cfg.ndcg.gain_base,
                        "Gain base b in b^y - 1");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a split and report nDCG/mAP");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--data", eval.data_dir, "Dataset directory")->required();
  eval_cmd->add_option("--split", eval.split, "train | validation | test")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  eval_cmd->add_option("--out", eval.out_dir, "Output directory")->required();
  eval_cmd->add_option("--pos-threshold", eval.pos_threshold,
                       "mAP positives have relevance above this value");

  EnsembleOptions ens;
  auto* ens_cmd = app.add_subcommand("ensemble", "Average similarity matrices");
  ens_cmd->add_option("matrices", ens.matrices, "Similarity matrix files")
      ->required();
  ens_cmd->add_option("--annotations", ens.annotations,
                      "Annotations providing relevance for the report")
      ->required();
  ens_cmd->add_option("--out", ens.out_dir, "Output directory")->required();
  ens_cmd->add_option("--pos-threshold", ens.pos_threshold,
                      "mAP positives have relevance above this value");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*gen_cmd) {
      RunGen(gen, out);
    } else if (*train_cmd) {
      RunTrain(train, *train_cmd, out, err);
    } else if (*eval_cmd) {
      RunEval(eval, out);
    } else if (*ens_cmd) {
      RunEnsemble(ens, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace rankfuse::cli
