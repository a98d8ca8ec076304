// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agentir/agentir.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

int report(air_status st) {
  if (st == AIR_OK) return kExitOk;
  std::cerr << "error: " << air_status_name(st) << ": " << air_last_error_message() << "\n";
  return st == AIR_E_INTERNAL ? kExitInternal : kExitUser;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Prints and frees a library-owned string.
void print_owned(char* text, std::ostream& os = std::cout) {
  if (!text) return;
  os << text;
  const std::string s(text);
  if (!s.empty() && s.back() != '\n') os << "\n";
  air_string_free(text);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

struct KbHandle {
  air_kb* kb = nullptr;
  ~KbHandle() { air_kb_free(kb); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restoration-agent simulator: exploration, knowledge bases, workflow batches and reports"};
  app.require_subcommand(1);

  std::string config, kb_path, out, tuples, dir, scheduler = "experience";
  std::vector<std::string> modes{"full"}, combos{"all"};
  std::uint64_t seed = 0, runs = 100;
  std::optional<std::uint64_t> explore_seed;
  int jobs = 1, n = 60;

  auto* explore = app.add_subcommand("explore", "Run self-exploration and write trial tuples");
  explore->add_option("--config", config, "Harness config JSON");
  explore->add_option("--seed", explore_seed, "Exploration seed (overrides the config)");
  explore->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  explore->add_option("--out", out, "Trial tuples output (JSON lines)");
  explore->add_option("--kb", kb_path, "Also write the distilled knowledge base here");

  auto* summarize = app.add_subcommand("summarize", "Aggregate trial tuples into a knowledge base");
  summarize->add_option("tuples", tuples, "Trial tuples (JSON lines)")->required();
  summarize->add_option("--kb", kb_path, "Knowledge base output");

  auto* run = app.add_subcommand("run", "Execute workflow batches and write reports");
  run->add_option("--config", config, "Harness config JSON");
  run->add_option("--kb", kb_path, "Knowledge base JSON (built-in when omitted)");
  run->add_option("--mode", modes, "full, no-reflection, no-rollback, no-retrieval, strict-threshold or a '+' join")
      ->delimiter(',');
  run->add_option("--runs", runs, "Runs per combination");
  run->add_option("--seed", seed, "Batch seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory for report and traces");

  auto* consistency = app.add_subcommand("consistency", "Measure scheduling dispersion across presentations");
  consistency->add_option("--config", config, "Harness config JSON (bridge settings)");
  consistency->add_option("--scheduler", scheduler, "experience, random or remote");
  consistency->add_option("--combinations", combos, "Labels or group letters, or 'all'")->delimiter(',');
  consistency->add_option("--kb", kb_path, "Knowledge base JSON (built-in when omitted)");
  consistency->add_option("--runs,-n", n, "Schedules per presentation order")->check(CLI::PositiveNumber);
  consistency->add_option("--seed", seed, "Seed");
  consistency->add_option("--out", out, "Write the table as JSON here");

  auto* verify = app.add_subcommand("verify", "Recompute report cells and counters from trace files");
  verify->add_option("dir", dir, "Run output directory")->required();

  auto* calibration = app.add_subcommand("calibration", "Print the built-in per-order fail-rate table");
  calibration->add_option("--kb", kb_path, "Also write the built-in knowledge base here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUser;
  }

  KbHandle kb;
  auto load_kb = [&]() -> air_status {
    return kb_path.empty() ? AIR_OK : air_kb_load(kb_path.c_str(), &kb.kb);
  };

  if (explore->parsed()) {
    char* summary = nullptr;
    const std::uint64_t s = explore_seed.value_or(0);
    const air_status st =
        air_explore(opt(config), explore_seed ? &s : nullptr, jobs, opt(out), opt(kb_path), &summary);
    if (st != AIR_OK) return report(st);
    print_owned(summary);
    return kExitOk;
  }
  if (summarize->parsed()) {
    char* summary = nullptr;
    const air_status st = air_summarize(tuples.c_str(), opt(kb_path), &summary);
    if (st != AIR_OK) return report(st);
    print_owned(summary);
    return kExitOk;
  }
  if (run->parsed()) {
    if (air_status st = load_kb(); st != AIR_OK) return report(st);
    char* text = nullptr;
    const std::string mode_list = join(modes);
    const air_status st = air_run(opt(config), kb.kb, mode_list.c_str(), runs, seed, jobs, opt(out), &text);
    if (st != AIR_OK) return report(st);
    print_owned(text);
    return kExitOk;
  }
  if (consistency->parsed()) {
    if (air_status st = load_kb(); st != AIR_OK) return report(st);
    char* text = nullptr;
    char* json = nullptr;
    const std::string list = join(combos);
    const air_status st =
        air_consistency(opt(config), scheduler.c_str(), list.c_str(), kb.kb, n, seed, &text, &json);
    if (st != AIR_OK) return report(st);
    print_owned(text);
    if (!out.empty()) {
      std::ofstream f(out, std::ios::binary);
      f << json;
      if (!f) {
        air_string_free(json);
        std::cerr << "error: cannot write " << out << "\n";
        return kExitUser;
      }
    }
    air_string_free(json);
    return kExitOk;
  }
  if (verify->parsed()) {
    char* problems = nullptr;
    const air_status st = air_verify(dir.c_str(), &problems);
    if (st != AIR_OK) return report(st);
    const std::string text(problems);
    air_string_free(problems);
    if (!text.empty()) {
      std::cerr << text;
      return kExitInternal;
    }
    std::cout << "ok: every table cell and counter matches the traces\n";
    return kExitOk;
  }
  if (calibration->parsed()) {
    if (air_status st = air_kb_paper(&kb.kb); st != AIR_OK) return report(st);
    if (!kb_path.empty()) {
      if (air_status st = air_kb_save(kb.kb, kb_path.c_str()); st != AIR_OK) return report(st);
    }
    char* text = nullptr;
    if (air_status st = air_kb_summary(kb.kb, &text); st != AIR_OK) return report(st);
    print_owned(text);
    return kExitOk;
  }
  return kExitUser;
}
