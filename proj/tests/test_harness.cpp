#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "agentir/harness.hpp"
#include "json_util.hpp"

using namespace agentir;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("agentir_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return detail::read_file(p.string()); }

BatchOptions options(std::vector<std::string> modes, std::size_t runs, std::uint64_t seed, int jobs) {
  BatchOptions o;
  o.modes.clear();
  for (const auto& m : modes) o.modes.push_back(RunMode::parse(m));
  o.runs = runs;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto def = default_harness_config();
  CHECK(def.env->mode() == Environment::Mode::Tabular);
  CHECK(def.run_combinations == combinations_in_group('A'));

  const auto cfg = harness_config_from_json(nlohmann::json::parse(R"({
    "environment": "mechanistic",
    "evaluator": {"kind": "paper"},
    "tool_order": "registry",
    "scheduler": "random",
    "run": {"groups": ["B"], "combinations": ["rain+haze", {"group": "X", "degradations": ["noise", "dark"]}]},
    "exploration": {"groups": ["A"], "samples_per_combination": 3, "trials_per_sample": 2, "seed": 9}
  })"));
  CHECK(cfg.env->mode() == Environment::Mode::Mechanistic);
  CHECK(dynamic_cast<const NoisyOracle*>(cfg.evaluator.get()) != nullptr);
  CHECK(cfg.tool_order == ToolOrder::FixedRegistry);
  CHECK(cfg.scheduler == "random");
  CHECK(cfg.run_combinations.size() == combinations_in_group('B').size() + 2);
  CHECK(cfg.run_combinations.back().group == 'X');
  CHECK(cfg.exploration.samples_per_combination == 3);
  CHECK(cfg.exploration.seed == 9);

  auto schema_path = [](const char* text) {
    try {
      harness_config_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schema);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(schema_path(R"({"tool_order": "sideways"})").find("tool_order") != std::string::npos);
  CHECK(schema_path(R"({"run": ["rain+smoke"]})").find("run[0]") != std::string::npos);
  CHECK(schema_path(R"({"exploration": {"samples_per_combination": 0}})").find("exploration") != std::string::npos);
  CHECK_THROWS_AS(load_harness_config("/nonexistent/agentir.json"), Error);
  CHECK_THROWS_AS(make_scheduler("oracle", std::nullopt), Error);
}

TEST_CASE("run inputs are shared across modes and contain the combination") {
  for (const auto& c : builtin_combinations()) {
    for (std::size_t r = 0; r < 20; ++r) {
      const auto p = run_input(c, 3, r, 11);
      CHECK(p == run_input(c, 3, r, 11));
      CHECK(p.present_degradations().size() == c.degradations.size());
      for (auto d : c.degradations) CHECK(p.present(d));
    }
  }
  DegradationProfile p;
  CHECK(restored(p));
  p.set_severity(Degradation::Rain, Severity::Low);
  CHECK(restored(p));
  p.set_severity(Degradation::Haze, Severity::Medium);
  CHECK_FALSE(restored(p));
}

TEST_CASE("batches are byte-identical across repeats and worker counts") {
  const auto cfg = default_harness_config();
  const auto kb = paper_knowledge_base();
  const auto a = fresh_dir("a"), b = fresh_dir("b");
  write_batch(run_batch(cfg, kb, options({"full", "no-rollback"}, 15, 5, 1)), a.string());
  write_batch(run_batch(cfg, kb, options({"full", "no-rollback"}, 15, 5, 6)), b.string());
  for (const char* f : {"report.json", "report.txt", "traces/full.jsonl", "traces/no-rollback.jsonl"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(fs::exists(a / "timing.json"));
  CHECK(verify_output(a.string()).empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("verify notices tampering") {
  auto cfg = default_harness_config();
  cfg.run_combinations = {*find_combination("rain+haze")};
  const auto dir = fresh_dir("tamper");
  write_batch(run_batch(cfg, paper_knowledge_base(), options({"full"}, 30, 2, 2)), dir.string());
  REQUIRE(verify_output(dir.string()).empty());

  auto doc = detail::load_json_file((dir / "report.json").string());
  doc["groups"][0]["successes"] = doc["groups"][0]["successes"].get<int>() + 1;
  detail::write_file((dir / "report.json").string(), doc.dump(2));
  CHECK_FALSE(verify_output(dir.string()).empty());

  write_batch(run_batch(cfg, paper_knowledge_base(), options({"full"}, 30, 2, 2)), dir.string());
  std::string traces = slurp(dir / "traces/full.jsonl");
  const auto pos = traces.find("\"invocations\":");
  REQUIRE(pos != std::string::npos);
  traces.insert(pos + 14, "9");
  detail::write_file((dir / "traces/full.jsonl").string(), traces);
  CHECK_FALSE(verify_output(dir.string()).empty());
  fs::remove_all(dir);
}

TEST_CASE("zero runs give an empty report") {
  const auto r = run_batch(default_harness_config(), paper_knowledge_base(), options({"full"}, 0, 0, 2));
  CHECK(r.records.empty());
  CHECK(r.report.groups.empty());
  CHECK(r.report.combinations.empty());
  const auto dir = fresh_dir("empty");
  write_batch(r, dir.string());
  CHECK(verify_output(dir.string()).empty());
  fs::remove_all(dir);
}

TEST_CASE("summaries are means over records") {
  std::vector<RunRecord> recs;
  for (std::size_t i = 0; i < 4; ++i) {
    RunRecord r;
    r.mode = "full";
    r.group = 'A';
    r.combination = "rain+haze";
    r.run = i;
    r.success = i % 2 == 0;
    r.status = RunStatus::Success;
    r.counters.invocations = i + 1;
    r.counters.rollbacks = i;
    recs.push_back(r);
  }
  recs[3].status = RunStatus::Error;
  const auto rep = summarize_runs(recs, {"full"}, 0, 4);
  REQUIRE(rep.groups.size() == 1);
  CHECK(rep.groups[0].success_rate == 0.5);
  CHECK(rep.groups[0].mean_invocations == 2.5);
  CHECK(rep.groups[0].mean_rollbacks == 1.5);
  CHECK(rep.groups[0].errors == 1);
  REQUIRE(rep.combinations.size() == 1);
  CHECK(rep.combinations[0].combination == "rain+haze");
  const auto text = report_to_text(rep);
  CHECK(text.find("0.5000") != std::string::npos);
}

TEST_CASE("run failures are recorded without aborting the batch") {
  auto cfg = default_harness_config();
  cfg.scheduler = "remote";
  BridgeConfig bridge;
  const auto replay = fs::temp_directory_path() / "agentir_empty_replay.json";
  detail::write_file(replay.string(), R"({"entries": []})");
  bridge.replay_file = replay.string();
  cfg.bridge = bridge;
  cfg.run_combinations = {*find_combination("rain+haze")};
  const auto r = run_batch(cfg, paper_knowledge_base(), options({"full"}, 5, 0, 1));
  REQUIRE(r.records.size() == 5);
  for (const auto& rec : r.records) CHECK(rec.status == RunStatus::Error);
  CHECK(r.report.groups[0].errors == 5);
  fs::remove(replay);
}

TEST_CASE("consistency table over every combination") {
  const auto kb = paper_knowledge_base();
  const auto rows = consistency_table(ExperienceScheduler{}, &kb, builtin_combinations(), 10, 0);
  CHECK(rows.size() == 16);
  for (const auto& r : rows) {
    CHECK(r.report.entropy_bits == 0.0);
    CHECK(r.report.variation_ratio == 0.0);
  }
  const auto single = consistency_table(RandomScheduler{}, &kb, combinations_in_group('A'), 1, 0);
  for (const auto& r : single) CHECK(r.report.sensitivity_entropy == doctest::Approx(r.report.entropy_bits));
  CHECK(consistency_to_text(rows).find("rain+haze") != std::string::npos);
  CHECK(consistency_to_json(rows).size() == 16);
}
