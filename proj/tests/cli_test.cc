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

#include <openssl/sha.h>

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rankfuse/dataio.h"
#include "rankfuse/metrics.h"
#include "rankfuse/relevance.h"
#include "rankfuse/ensemble.h"
#include "rankfuse/synthetic.h"
#include "test_util.h"

namespace rankfuse {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

json ReadJson(const fs::path& path) { return json::parse(ReadFileBytes(path)); }

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

void CheckManifestChecksums(const fs::path& manifest_path) {
  const json m = ReadJson(manifest_path);
  for (const char* section : {"inputs", "outputs"}) {
    if (!m.contains(section)) continue;
    for (const auto& [name, entry] : m[section].items()) {
      const std::string path = entry["path"];
      CHECK(entry["sha256"] == Sha256Hex(ReadFileBytes(path)));
    }
  }
}

// 480 synthetic items: 400 train, 80 validation.
fs::path TrainReadyData(const std::string& name) {
  SyntheticSpec spec;
  spec.n_items = 480;
  spec.seed = 4;
  Dataset d = GenerateSynthetic(spec).dataset;
  for (std::size_t i = 0; i < d.size(); ++i) d.splits[i] = i < 400 ? Split::kTrain : Split::kValidation;
  const fs::path dir = testing::TempDir(name);
  SaveDataset(dir / "data", d);
  return dir;
}

TEST_CASE("gen writes a reloadable dataset with verified checksums") {
  const fs::path dir = testing::TempDir("cli_gen");
  const auto a = RunCli({"gen", "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  const Dataset d = LoadDataset(dir / "a");
  CHECK(d.size() == 400);
  CheckManifestChecksums(dir / "a" / "manifest.json");

  REQUIRE(RunCli({"gen", "--out", (dir / "b").string()}).code == 0);
  const json ma = ReadJson(dir / "a" / "manifest.json");
  const json mb = ReadJson(dir / "b" / "manifest.json");
  for (const auto& [name, entry] : ma["outputs"].items()) {
    CHECK(entry["sha256"] == mb["outputs"][name]["sha256"]);
  }
  for (const char* f : {"annotations.jsonl", "video.rfft", "text.rfft", "splits.tsv"}) {
    CHECK(ReadFileBytes(dir / "a" / f) == ReadFileBytes(dir / "b" / f));
  }
  REQUIRE(RunCli({"gen", "--out", (dir / "c").string(), "--n-items", "400", "--clusters",
                  "8", "--seed", "3"})
              .code == 0);
  CHECK(LoadAnnotations(dir / "c" / "annotations.jsonl").size() == 400);
  CHECK(ReadFileBytes(dir / "c" / "video.rfft") != ReadFileBytes(dir / "a" / "video.rfft"));
}

TEST_CASE("train, eval and ensemble") {
  const fs::path dir = TrainReadyData("cli_train");
  const std::string data = (dir / "data").string();
  const std::vector<std::string> common = {"--data", data, "--epochs", "2", "--embed-dim", "8",
                                           "--lr", "1e-3"};
  auto train = [&](const std::string& out, const std::string& loss) {
    std::vector<std::string> args = {"train", "--out", (dir / out).string(), "--loss", loss};
    args.insert(args.end(), common.begin(), common.end());
    return RunCli(args);
  };
  REQUIRE(train("trip", "augmented-triplet").code == 0);
  REQUIRE(train("trip2", "augmented-triplet").code == 0);
  REQUIRE(train("ndcg", "neural-ndcg").code == 0);

  const json manifest = ReadJson(dir / "trip" / "manifest.json");
  CHECK(manifest["training_ids_count"] == 100);
  CHECK(manifest["seed"] == 0);
  CheckManifestChecksums(dir / "trip" / "manifest.json");
  CHECK(ReadFileBytes(dir / "trip" / "model.rfmd") == ReadFileBytes(dir / "trip2" / "model.rfmd"));
  CHECK(ReadJson(dir / "trip2" / "manifest.json")["outputs"]["checkpoint"]["sha256"] ==
        manifest["outputs"]["checkpoint"]["sha256"]);

  const std::string history = ReadFileBytes(dir / "ndcg" / "history.tsv");
  CHECK(std::count(history.begin(), history.end(), '\n') == 2);

  auto eval = [&](const std::string& model, const std::string& out) {
    return RunCli({"eval", "--checkpoint", (dir / model / "model.rfmd").string(), "--data",
                   data, "--split", "validation", "--out", (dir / out).string()});
  };
  REQUIRE(eval("trip", "eval_trip").code == 0);
  REQUIRE(eval("ndcg", "eval_ndcg").code == 0);
  REQUIRE(eval("trip", "eval_trip2").code == 0);
  CHECK(ReadFileBytes(dir / "eval_trip" / "similarity.rfsm") ==
        ReadFileBytes(dir / "eval_trip2" / "similarity.rfsm"));
  CHECK(ReadFileBytes(dir / "eval_trip" / "metrics.txt") ==
        ReadFileBytes(dir / "eval_trip2" / "metrics.txt"));
  CheckManifestChecksums(dir / "eval_trip" / "manifest.json");

  const auto annotations = LoadAnnotations(dir / "data" / "annotations.jsonl");
  auto relevance_for = [&](const SimilarityMatrix& sim) {
    std::vector<CaptionAnnotation> rows, cols;
    for (const auto& id : sim.row_ids)
      for (const auto& a : annotations)
        if (a.id == id) rows.push_back(a);
    for (const auto& id : sim.col_ids)
      for (const auto& a : annotations)
        if (a.id == id) cols.push_back(a);
    return ComputeRelevanceMatrix(rows, cols);
  };

  SUBCASE("eval report is self-consistent") {
    const json m = ReadJson(dir / "eval_trip" / "metrics.json");
    CHECK(m["ndcg_avg"].get<double>() ==
          doctest::Approx((m["ndcg_v2t"].get<double>() + m["ndcg_t2v"].get<double>()) / 2));
    CHECK(m["map_avg"].get<double>() ==
          doctest::Approx((m["map_v2t"].get<double>() + m["map_t2v"].get<double>()) / 2));
    const auto sim = LoadSimilarity(dir / "eval_trip" / "similarity.rfsm");
    CHECK(sim.rows() == 80);
    const MetricsReport again = Evaluate(sim, relevance_for(sim));
    CHECK(ReadFileBytes(dir / "eval_trip" / "metrics.txt") == FormatReport(again));
  }

  SUBCASE("ensemble") {
    const std::string ann = (dir / "data" / "annotations.jsonl").string();
    const std::string m1 = (dir / "eval_trip" / "similarity.rfsm").string();
    const std::string m2 = (dir / "eval_ndcg" / "similarity.rfsm").string();
    REQUIRE(RunCli({"ensemble", m1, "--annotations", ann, "--out", (dir / "e1").string()}).code == 0);
    CHECK(ReadFileBytes(dir / "e1" / "similarity.rfsm") == ReadFileBytes(m1));
    REQUIRE(RunCli({"ensemble", m1, m1, "--annotations", ann, "--out", (dir / "e2").string()}).code == 0);
    CHECK(ReadFileBytes(dir / "e2" / "similarity.rfsm") == ReadFileBytes(m1));
    CHECK(ReadFileBytes(dir / "e2" / "metrics.txt") ==
          ReadFileBytes(dir / "eval_trip" / "metrics.txt"));

    REQUIRE(RunCli({"ensemble", m1, m2, "--annotations", ann, "--out", (dir / "e3").string()}).code == 0);
    const std::vector<SimilarityMatrix> both{LoadSimilarity(m1), LoadSimilarity(m2)};
    SimilarityMatrix mean = MeanSimilarity(both);
    mean.values = RoundToFloat(mean.values);
    CHECK(ReadFileBytes(dir / "e3" / "metrics.txt") == FormatReport(Evaluate(mean, relevance_for(mean))));
    CheckManifestChecksums(dir / "e3" / "manifest.json");

    // Misaligned ids name the offending id.
    SimilarityMatrix shifted = LoadSimilarity(m1);
    shifted.col_ids[5] = "stranger";
    SaveSimilarity(dir / "shifted.rfsm", shifted);
    const auto bad = RunCli({"ensemble", m1, (dir / "shifted.rfsm").string(), "--annotations",
                             ann, "--out", (dir / "e4").string()});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("stranger") != std::string::npos);
  }
}

TEST_CASE("eval on a single-item split scores one everywhere") {
  const fs::path dir = TrainReadyData("cli_single");
  Dataset d = LoadDataset(dir / "data");
  d.splits[450] = Split::kTest;
  SaveDataset(dir / "data", d);
  REQUIRE(RunCli({"train", "--data", (dir / "data").string(), "--out", (dir / "m").string(),
                  "--epochs", "1"})
              .code == 0);
  REQUIRE(RunCli({"eval", "--checkpoint", (dir / "m" / "model.rfmd").string(), "--data",
                  (dir / "data").string(), "--split", "test", "--out", (dir / "ev").string()})
              .code == 0);
  const json m = ReadJson(dir / "ev" / "metrics.json");
  for (const char* key : {"ndcg_v2t", "ndcg_t2v", "ndcg_avg", "map_v2t", "map_t2v", "map_avg"}) {
    CHECK(m[key].get<double>() == 1.0);
  }
}

TEST_CASE("exit codes and warnings") {
  const fs::path dir = testing::TempDir("cli_codes");
  CHECK(RunCli({}).code == 2);
  CHECK(RunCli({"gen"}).code == 2);
  CHECK(RunCli({"gen", "--out", dir.string(), "--bogus"}).code == 2);
  CHECK(RunCli({"gen", "--out", (dir / "x").string(), "--nouns-per-caption", "99"}).code == 2);
  CHECK(RunCli({"train", "--data", (dir / "missing").string(), "--out", (dir / "o").string()})
            .code == 4);
  CHECK(RunCli({"train", "--data", dir.string(), "--out", (dir / "o").string(), "--loss",
                "listwise"})
            .code == 2);

  REQUIRE(RunCli({"gen", "--out", (dir / "d").string(), "--n-items", "60"}).code == 0);
  WriteFileBytes(dir / "d" / "video.rfft", "RFFT\x01");
  CHECK(RunCli({"train", "--data", (dir / "d").string(), "--out", (dir / "o").string()}).code ==
        3);

  REQUIRE(RunCli({"gen", "--out", (dir / "g").string(), "--n-items", "60"}).code == 0);
  const auto warn = RunCli({"train", "--data", (dir / "g").string(), "--out",
                            (dir / "o").string(), "--loss", "neural-ndcg", "--margin", "0.3",
                            "--epochs", "1"});
  CHECK(warn.code == 0);
  CHECK(warn.err.find("--margin") != std::string::npos);
}

TEST_CASE("help lists every flag with its default") {
  const auto top = RunCli({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"gen", "train", "eval", "ensemble"}) {
    CHECK(top.out.find(sub) != std::string::npos);
  }
  const auto train = RunCli({"train", "--help"});
  CHECK(train.code == 0);
  for (const char* needle :
       {"--epochs", "50", "--lr", "0.0001", "--batch-size", "64", "--margin", "0.2",
        "--threshold", "0.15", "--aug-prob", "--subset-fraction", "0.25", "--temperature",
        "--sinkhorn-iters", "30", "--mining", "hardest", "--loss", "augmented-triplet"}) {
    CHECK_MESSAGE(train.out.find(needle) != std::string::npos, needle);
  }
}

}  // namespace
}  // namespace rankfuse
