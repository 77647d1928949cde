#include <doctest.h>

#include "../support/pipeline.hpp"

using namespace icorate;
using testing::run_cli;

namespace {

nlohmann::json small_run() {
  return {{"seed", 4},
          {"lda", {{"topics", 2}, {"iterations", 20}, {"fold_in_iterations", 10}}},
          {"tagger", {{"max_epochs", 3}}},
          {"encoder", {{"dim", 4}, {"hidden", 4}, {"epochs", 1}}},
          {"model", {{"max_epochs", 20}}},
          {"synth", {{"projects", 60}, {"bio_sequences", 60}}}};
}

std::string snapshot(const std::filesystem::path& dir) {
  std::string all;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "config.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += f.filename().string() + "\n" + testing::read_file(f) + "\n";
  return all;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  CHECK(cli::resolve_config(nlohmann::json::object()) == cli::default_config());
  const auto dir = testing::scratch_dir("cli_config");
  testing::write_file(dir / "bad.json", R"({"lda": {"topicz": 3}})");
  const auto r = run_cli({"train", "--config", (dir / "bad.json").string(), "--out", dir.string()});
  CHECK(r.status == 2);
  const auto err = nlohmann::json::parse(r.err);
  CHECK(err["error"] == "config");
  CHECK(err["field"] == "/lda/topicz");

  testing::write_file(dir / "range.json", R"({"model": {"batch_size": 0}})");
  const auto range = run_cli({"train", "--config", (dir / "range.json").string(), "--out", dir.string()});
  CHECK(range.status == 2);
  CHECK(nlohmann::json::parse(range.err)["field"] == "/model/batch_size");

  testing::write_file(dir / "type.json", R"({"seed": "one"})");
  CHECK(nlohmann::json::parse(run_cli({"ingest", "--config", (dir / "type.json").string()}).err)["field"] == "/seed");
}

TEST_CASE("usage errors and version") {
  CHECK(run_cli({}).status == 2);
  CHECK(run_cli({"bogus"}).status == 2);
  const auto v = run_cli({"--version"});
  CHECK(v.status == 0);
  CHECK(v.out.find(cli::kVersion) != std::string::npos);
}

TEST_CASE("a stage run out of order names the missing stage") {
  const auto dir = testing::scratch_dir("cli_order");
  const auto config = testing::write_pipeline_config(dir, small_run());
  auto common = [&](const std::string& stage) { return run_cli({stage, "--config", config.string(), "--out", dir.string()}); };
  REQUIRE(common("synth").status == 0);
  REQUIRE(common("ingest").status == 0);
  const auto r = common("train");
  CHECK(r.status == 3);
  const auto err = nlohmann::json::parse(r.err);
  CHECK(err["error"] == "missing_prerequisite");
  CHECK(err["stage"] == "featurize");
}

TEST_CASE("full pipeline reports one table per scam bar and reruns byte-identically") {
  const auto a = testing::scratch_dir("cli_run_a");
  const auto b = testing::scratch_dir("cli_run_b");
  const auto ra = testing::run_pipeline(a, testing::write_pipeline_config(a, small_run()));
  REQUIRE_MESSAGE(ra.status == 0, ra.err);
  const auto rb = testing::run_pipeline(b, testing::write_pipeline_config(b, small_run()));
  REQUIRE_MESSAGE(rb.status == 0, rb.err);
  CHECK(snapshot(a) == snapshot(b));

  const auto report = nlohmann::json::parse(testing::read_file(a / "report.json"));
  REQUIRE(report.size() == 3);
  std::vector<double> bars;
  for (const auto& t : report) {
    bars.push_back(t["scam_bar"].get<double>());
    CHECK(t["rows"].size() == 7);
  }
  CHECK(bars == std::vector<double>{0.01, 0.1, 1.0});
  const auto text = testing::read_file(a / "report.txt");
  CHECK(text.find("scam bar m = 0.01") != std::string::npos);

  const auto manifest = nlohmann::json::parse(testing::read_file(a / "train.manifest.json"));
  CHECK(manifest["stage"] == "train");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("stage_seed"));

  // A different seed must change the learned artifacts.
  auto other = small_run();
  other["seed"] = 5;
  const auto c = testing::scratch_dir("cli_run_c");
  REQUIRE(testing::run_pipeline(c, testing::write_pipeline_config(c, other)).status == 0);
  CHECK(testing::read_file(c / "model.bin") != testing::read_file(a / "model.bin"));
}

TEST_CASE("tagging free text prints spans") {
  const auto dir = testing::scratch_dir("cli_tag");
  const auto config = testing::write_pipeline_config(dir, small_run());
  for (const std::string stage : {"synth", "train-tagger"})
    REQUIRE(run_cli({stage, "--config", config.string(), "--out", dir.string()}).status == 0);
  const auto r = run_cli({"tag", "--config", config.string(), "--out", dir.string(), "--text", "Ann Lee was born in 1990."});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("1990") != std::string::npos);
}
