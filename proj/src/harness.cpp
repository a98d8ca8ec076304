#include "agentir/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "parallel.hpp"

namespace agentir {

using detail::as_string;
using detail::field;
using detail::join;
using detail::optional_field;
using detail::schema_error;
using nlohmann::json;

std::vector<DegradationCombination> parse_combinations(const json& block, const std::string& path) {
  std::vector<DegradationCombination> out;
  if (block.is_object()) {
    if (const auto* groups = optional_field(block, "groups", path)) {
      const auto gpath = join(path, "groups");
      const auto& arr = detail::as_array(*groups, gpath);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& g = as_string(arr[i], join(gpath, i));
        if (g == "all") {
          for (const auto& c : builtin_combinations()) out.push_back(c);
          continue;
        }
        if (g.size() != 1 || combinations_in_group(g[0]).empty()) schema_error(join(gpath, i), "unknown group");
        for (auto& c : combinations_in_group(g[0])) out.push_back(std::move(c));
      }
    }
    if (const auto* list = optional_field(block, "combinations", path)) {
      auto more = parse_combinations(*list, join(path, "combinations"));
      out.insert(out.end(), more.begin(), more.end());
    }
    return out;
  }
  const auto& arr = detail::as_array(block, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ipath = join(path, i);
    if (arr[i].is_string()) {
      auto c = find_combination(arr[i].get<std::string>());
      if (!c) schema_error(ipath, "unknown combination '" + arr[i].get<std::string>() + "'");
      out.push_back(*c);
      continue;
    }
    DegradationCombination c;
    if (const auto* g = optional_field(arr[i], "group", ipath)) {
      const auto& s = as_string(*g, join(ipath, "group"));
      if (s.size() != 1) schema_error(join(ipath, "group"), "expected a single letter");
      c.group = s[0];
    }
    c.degradations = detail::as_degradations(field(arr[i], "degradations", ipath), join(ipath, "degradations"));
    if (c.degradations.empty()) schema_error(join(ipath, "degradations"), "expected at least one degradation");
    if (TaskSet::of(c.tasks().tasks()).size() != c.degradations.size()) {
      schema_error(join(ipath, "degradations"), "duplicate degradation");
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::shared_ptr<const Environment> env_from_block(const json& block, const std::string& path) {
  if (block.is_string()) {
    const auto& s = block.get<std::string>();
    if (s == "paper") return std::make_shared<Environment>(paper_tabular_env(0));
    if (s == "mechanistic") return std::make_shared<Environment>(default_mechanistic_env(0));
    schema_error(path, "expected paper, mechanistic or an environment object");
  }
  return std::make_shared<Environment>(environment_from_json(block));
}

BridgeConfig bridge_from_json(const json& block, const std::string& path) {
  BridgeConfig cfg;
  if (const auto* e = optional_field(block, "endpoint", path)) cfg.endpoint = as_string(*e, join(path, "endpoint"));
  if (const auto* t = optional_field(block, "timeout_seconds", path)) {
    cfg.timeout_seconds = detail::as_number(*t, join(path, "timeout_seconds"));
    if (!(cfg.timeout_seconds > 0.0)) schema_error(join(path, "timeout_seconds"), "must be positive");
  }
  if (const auto* r = optional_field(block, "max_retries", path)) {
    cfg.max_retries = static_cast<int>(detail::as_u64(*r, join(path, "max_retries")));
  }
  if (const auto* f = optional_field(block, "replay_file", path)) cfg.replay_file = as_string(*f, join(path, "replay_file"));
  return cfg;
}

ExplorationConfig exploration_from_json(const json& block, const std::string& path) {
  ExplorationConfig cfg;
  if (block.is_null()) return cfg;
  if (optional_field(block, "combinations", path) || optional_field(block, "groups", path)) {
    cfg.combinations = parse_combinations(block, path);
  }
  if (const auto* s = optional_field(block, "samples_per_combination", path)) {
    cfg.samples_per_combination = static_cast<int>(detail::as_int(*s, join(path, "samples_per_combination")));
  }
  if (const auto* t = optional_field(block, "trials_per_sample", path)) {
    cfg.trials_per_sample = static_cast<int>(detail::as_int(*t, join(path, "trials_per_sample")));
  }
  if (const auto* th = optional_field(block, "success_threshold", path)) {
    cfg.success_threshold = detail::as_severity(*th, join(path, "success_threshold"));
  }
  if (const auto* sd = optional_field(block, "seed", path)) cfg.seed = detail::as_u64(*sd, join(path, "seed"));
  try {
    cfg.validate();
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  return cfg;
}

}  // namespace

HarnessConfig harness_config_from_json(const json& doc) {
  const std::string path = "$";
  if (!doc.is_object()) schema_error(path, "expected object");
  HarnessConfig cfg = default_harness_config();
  if (const auto* e = optional_field(doc, "environment", path)) {
    cfg.env = env_from_block(*e, join(path, "environment"));
    // A noise model may also travel inside the environment document.
    if (e->is_object() && e->contains("evaluator")) cfg.evaluator = evaluator_from_json(e->at("evaluator"));
  }
  if (const auto* ev = optional_field(doc, "evaluator", path)) cfg.evaluator = evaluator_from_json(*ev);
  if (const auto* o = optional_field(doc, "tool_order", path)) {
    const auto& s = as_string(*o, join(path, "tool_order"));
    if (s == "shuffle") cfg.tool_order = ToolOrder::SeededShuffle;
    else if (s == "registry") cfg.tool_order = ToolOrder::FixedRegistry;
    else schema_error(join(path, "tool_order"), "expected shuffle or registry");
  }
  if (const auto* s = optional_field(doc, "scheduler", path)) {
    cfg.scheduler = as_string(*s, join(path, "scheduler"));
    if (cfg.scheduler != "experience" && cfg.scheduler != "random" && cfg.scheduler != "remote") {
      schema_error(join(path, "scheduler"), "expected experience, random or remote");
    }
  }
  if (const auto* r = optional_field(doc, "run", path)) cfg.run_combinations = parse_combinations(*r, join(path, "run"));
  if (const auto* x = optional_field(doc, "exploration", path)) {
    cfg.exploration = exploration_from_json(*x, join(path, "exploration"));
  }
  if (const auto* b = optional_field(doc, "bridge", path)) cfg.bridge = bridge_from_json(*b, join(path, "bridge"));
  return cfg;
}

HarnessConfig load_harness_config(const std::string& path) {
  return harness_config_from_json(detail::load_json_file(path));
}

HarnessConfig default_harness_config() {
  HarnessConfig cfg;
  cfg.env = std::make_shared<Environment>(paper_tabular_env(0));
  cfg.evaluator = std::make_shared<PerfectOracle>();
  cfg.run_combinations = combinations_in_group('A');
  return cfg;
}

std::shared_ptr<const Scheduler> make_scheduler(const std::string& spec, const std::optional<BridgeConfig>& bridge) {
  if (spec == "experience") return std::make_shared<ExperienceScheduler>();
  if (spec == "random") return std::make_shared<RandomScheduler>();
  if (spec == "remote") {
    const BridgeConfig cfg = bridge.value_or(BridgeConfig{});
    return std::make_shared<RemoteScheduler>(std::shared_ptr<Transport>(make_transport(cfg)), cfg.max_retries);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheduler '" + spec + "' (expected experience, random or remote)");
}

DegradationProfile run_input(const DegradationCombination& c, std::size_t combination_index, std::size_t run,
                             std::uint64_t seed) {
  DegradationProfile p("run/" + c.label() + "/" + std::to_string(run));
  Rng rng = Substream::root(seed).child("run-input").child(combination_index, run).rng();
  for (auto d : c.degradations) {
    p.set_severity(d, severity_from_level(level(Severity::Medium) + static_cast<int>(rng.below(3))));
  }
  return p;
}

bool restored(const DegradationProfile& final_profile) {
  for (auto s : final_profile.severities()) {
    if (s > Severity::Low) return false;
  }
  return true;
}

namespace {

json counters_json(const SearchCounters& c) {
  return {{"rollbacks", c.rollbacks},
          {"reschedules", c.reschedules},
          {"compromises", c.compromises},
          {"invocations", c.invocations},
          {"nodes_expanded", c.nodes_expanded}};
}

SearchCounters counters_from_json(const json& j, const std::string& path) {
  SearchCounters c;
  c.rollbacks = detail::as_u64(field(j, "rollbacks", path), join(path, "rollbacks"));
  c.reschedules = detail::as_u64(field(j, "reschedules", path), join(path, "reschedules"));
  c.compromises = detail::as_u64(field(j, "compromises", path), join(path, "compromises"));
  c.invocations = detail::as_u64(field(j, "invocations", path), join(path, "invocations"));
  c.nodes_expanded = detail::as_u64(field(j, "nodes_expanded", path), join(path, "nodes_expanded"));
  return c;
}

RunStatus parse_status(const std::string& s, const std::string& path) {
  for (auto st : {RunStatus::Clean, RunStatus::Success, RunStatus::Compromise, RunStatus::Error}) {
    if (s == name(st)) return st;
  }
  schema_error(path, "unknown status '" + s + "'");
}

}  // namespace

BatchResult run_batch(const HarnessConfig& config, const KnowledgeBase& kb, const BatchOptions& options) {
  if (!config.env || !config.evaluator) throw Error(ErrorCode::InvalidArgument, "config lacks environment or evaluator");
  BatchResult result;
  std::vector<std::string> mode_names;
  for (const auto& m : options.modes) mode_names.push_back(m.name());

  const Toolbox tools = Toolbox::from_environment(config.env);
  const auto& combos = config.run_combinations;
  for (const auto& c : combos) {
    for (auto t : c.tasks().tasks()) {
      if (tools.for_task(t).empty()) {
        throw Error(ErrorCode::MissingTools, "no tools for " + std::string(name(t)) + " needed by " + c.label());
      }
    }
  }

  for (std::size_t mi = 0; mi < options.modes.size(); ++mi) {
    const RunMode& mode = options.modes[mi];
    const std::string& mname = mode_names[mi];
    const auto scheduler = mode.retrieval ? make_scheduler(config.scheduler, config.bridge)
                                          : std::make_shared<RandomScheduler>();
    SearchDeps deps;
    deps.scheduler = scheduler.get();
    deps.evaluator = config.evaluator.get();
    deps.tools = &tools;
    deps.kb = &kb;
    deps.rollback = mode.rollback;
    deps.policy.tool_order = config.tool_order;
    deps.policy.reflection = mode.reflection;
    if (mode.strict_threshold) deps.policy.accept_candidate = Severity::VeryLow;

    const std::size_t total = combos.size() * options.runs;
    std::vector<RunRecord> records(total);
    std::vector<std::string> lines(options.keep_traces ? total : 0);
    const auto start = std::chrono::steady_clock::now();
    detail::parallel_for(total, options.jobs, [&](std::size_t i) {
      const std::size_t ci = i / options.runs, run = i % options.runs;
      const auto& c = combos[ci];
      const DegradationProfile input = run_input(c, ci, run, options.seed);
      const Substream stream = Substream::root(options.seed).child("run").child(ci, run);
      WorkflowResult wr = run_workflow(input, deps, stream);
      RunRecord& rec = records[i];
      rec.mode = mname;
      rec.group = c.group;
      rec.combination = c.label();
      rec.run = run;
      rec.success = restored(wr.final_profile);
      rec.status = wr.trace.status;
      rec.counters = wr.trace.counters;
      if (options.keep_traces) {
        json line = {{"mode", mname},
                     {"group", std::string(1, c.group)},
                     {"combination", c.label()},
                     {"run", run},
                     {"success", rec.success},
                     {"status", std::string(name(rec.status))},
                     {"counters", counters_json(rec.counters)},
                     {"input", profile_to_json(input)},
                     {"final", profile_to_json(wr.final_profile)},
                     {"trace", trace_to_json(wr.trace)}};
        lines[i] = line.dump();
      }
    });
    result.wall_seconds[mname] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.records.insert(result.records.end(), records.begin(), records.end());
    if (options.keep_traces) result.trace_lines[mname] = std::move(lines);
  }
  result.report = summarize_runs(result.records, mode_names, options.seed, options.runs);
  return result;
}

RunReport summarize_runs(const std::vector<RunRecord>& records, const std::vector<std::string>& modes,
                         std::uint64_t seed, std::size_t runs) {
  RunReport report;
  report.seed = seed;
  report.runs_per_combination = runs;
  report.modes = modes;

  auto accumulate = [](CellSummary& cell, const RunRecord& r) {
    ++cell.runs;
    if (r.success) ++cell.successes;
    if (r.status == RunStatus::Error) ++cell.errors;
    cell.mean_invocations += static_cast<double>(r.counters.invocations);
    cell.mean_rollbacks += static_cast<double>(r.counters.rollbacks);
    cell.mean_reschedules += static_cast<double>(r.counters.reschedules);
    cell.mean_compromises += static_cast<double>(r.counters.compromises);
  };
  auto finish = [](CellSummary& cell) {
    if (cell.runs == 0) return;
    const auto n = static_cast<double>(cell.runs);
    cell.success_rate = static_cast<double>(cell.successes) / n;
    cell.mean_invocations /= n;
    cell.mean_rollbacks /= n;
    cell.mean_reschedules /= n;
    cell.mean_compromises /= n;
  };

  for (const auto& mode : modes) {
    std::map<char, CellSummary> groups;
    std::vector<std::string> order;
    std::map<std::string, CellSummary> combos;
    for (const auto& r : records) {
      if (r.mode != mode) continue;
      auto& g = groups[r.group];
      g.mode = mode;
      g.group = r.group;
      accumulate(g, r);
      auto [it, fresh] = combos.try_emplace(r.combination);
      if (fresh) order.push_back(r.combination);
      it->second.mode = mode;
      it->second.group = r.group;
      it->second.combination = r.combination;
      accumulate(it->second, r);
    }
    for (auto& [g, cell] : groups) {
      finish(cell);
      report.groups.push_back(cell);
    }
    for (const auto& label : order) {
      auto& cell = combos[label];
      finish(cell);
      report.combinations.push_back(cell);
    }
  }
  return report;
}

namespace {

json cell_json(const CellSummary& c) {
  json j = {{"mode", c.mode},
            {"group", std::string(1, c.group)},
            {"runs", c.runs},
            {"successes", c.successes},
            {"errors", c.errors},
            {"success_rate", c.success_rate},
            {"mean_invocations", c.mean_invocations},
            {"mean_rollbacks", c.mean_rollbacks},
            {"mean_reschedules", c.mean_reschedules},
            {"mean_compromises", c.mean_compromises}};
  if (!c.combination.empty()) j["combination"] = c.combination;
  return j;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

json report_to_json(const RunReport& report) {
  json groups = json::array(), combos = json::array();
  for (const auto& c : report.groups) groups.push_back(cell_json(c));
  for (const auto& c : report.combinations) combos.push_back(cell_json(c));
  return {{"seed", report.seed},
          {"runs_per_combination", report.runs_per_combination},
          {"modes", report.modes},
          {"groups", groups},
          {"combinations", combos}};
}

std::string report_to_text(const RunReport& report) {
  std::ostringstream os;
  char line[256];
  auto row = [&](const std::string& label, const CellSummary& c) {
    std::snprintf(line, sizeof line, "%-28s %-28s %6zu %8s %12s %10s %12s\n", label.c_str(), c.mode.c_str(), c.runs,
                  fmt("%.4f", c.success_rate).c_str(), fmt("%.3f", c.mean_invocations).c_str(),
                  fmt("%.3f", c.mean_rollbacks).c_str(), fmt("%.3f", c.mean_reschedules).c_str());
    os << line;
  };
  auto header = [&](const char* first) {
    std::snprintf(line, sizeof line, "%-28s %-28s %6s %8s %12s %10s %12s\n", first, "mode", "runs", "success",
                  "invocations", "rollbacks", "reschedules");
    os << line;
  };
  os << "seed " << report.seed << ", " << report.runs_per_combination << " runs per combination\n\n";
  header("group");
  for (const auto& c : report.groups) row(std::string(1, c.group), c);
  os << "\n";
  header("combination");
  for (const auto& c : report.combinations) row(std::string(1, c.group) + " " + c.combination, c);
  return os.str();
}

void write_batch(const BatchResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  detail::write_file((fs::path(dir) / "report.json").string(), report_to_json(result.report).dump(2) + "\n");
  detail::write_file((fs::path(dir) / "report.txt").string(), report_to_text(result.report));
  json timing = json::object();
  for (const auto& [mode, secs] : result.wall_seconds) {
    const auto runs = static_cast<double>(std::count_if(result.records.begin(), result.records.end(),
                                                        [&](const RunRecord& r) { return r.mode == mode; }));
    timing[mode] = {{"wall_seconds", secs}, {"mean_wall_seconds", runs > 0 ? secs / runs : 0.0}};
  }
  detail::write_file((fs::path(dir) / "timing.json").string(), timing.dump(2) + "\n");
  for (const auto& [mode, lines] : result.trace_lines) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    detail::write_file((fs::path(dir) / "traces" / (mode + ".jsonl")).string(), text);
  }
}

std::vector<std::string> verify_output(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> problems;
  const json report = detail::load_json_file((fs::path(dir) / "report.json").string());
  const std::string rpath = "report.json";
  std::vector<std::string> modes;
  for (const auto& m : detail::as_array(field(report, "modes", rpath), join(rpath, "modes"))) {
    modes.push_back(as_string(m, join(rpath, "modes")));
  }
  const auto seed = detail::as_u64(field(report, "seed", rpath), join(rpath, "seed"));
  const auto runs = detail::as_u64(field(report, "runs_per_combination", rpath), join(rpath, "runs_per_combination"));

  std::vector<RunRecord> records;
  for (const auto& mode : modes) {
    const std::string file = (fs::path(dir) / "traces" / (mode + ".jsonl")).string();
    std::istringstream in(detail::read_file(file));
    std::string text;
    std::size_t lineno = 0;
    while (std::getline(in, text)) {
      ++lineno;
      if (text.empty()) continue;
      const std::string where = file + ":" + std::to_string(lineno);
      const json line = detail::parse_json(text, where);
      const json& trace = field(line, "trace", where);
      const SearchCounters stored = counters_from_json(field(line, "counters", where), join(where, "counters"));

      // Recount from the attempt tree.
      SearchCounters recount;
      std::set<std::pair<std::uint64_t, std::uint64_t>> frames;
      for (const auto& n : detail::as_array(field(trace, "tree", where), join(where, "tree"))) {
        if (n.at("rolled_back").get<bool>()) ++recount.rollbacks;
        if (n.at("rescheduled").get<bool>()) ++recount.reschedules;
        recount.invocations += n.at("invocations").get<std::size_t>();
        frames.insert({n.at("outer_iteration").get<std::uint64_t>(), n.at("frame").get<std::uint64_t>()});
      }
      recount.nodes_expanded = frames.size();
      for (const auto& it : detail::as_array(field(trace, "outer", where), join(where, "outer"))) {
        if (!it.at("success").get<bool>()) ++recount.compromises;
      }
      if (!(recount == stored)) problems.push_back(where + ": counters differ from the attempt tree");
      if (!(counters_from_json(field(trace, "counters", where), join(where, "trace.counters")) == stored)) {
        problems.push_back(where + ": trace counters differ from run counters");
      }

      RunRecord r;
      r.mode = as_string(field(line, "mode", where), join(where, "mode"));
      r.group = as_string(field(line, "group", where), join(where, "group")).at(0);
      r.combination = as_string(field(line, "combination", where), join(where, "combination"));
      r.run = detail::as_u64(field(line, "run", where), join(where, "run"));
      r.success = restored(profile_from_json(field(line, "final", where)));
      if (r.success != detail::as_bool(field(line, "success", where), join(where, "success"))) {
        problems.push_back(where + ": success flag disagrees with the final profile");
      }
      r.status = parse_status(as_string(field(line, "status", where), join(where, "status")), join(where, "status"));
      r.counters = recount;
      records.push_back(std::move(r));
    }
  }
  const json rebuilt = report_to_json(summarize_runs(records, modes, seed, runs));
  for (const char* key : {"groups", "combinations"}) {
    if (rebuilt.at(key) != report.at(key)) problems.push_back(std::string("report.json: ") + key + " differ from traces");
  }
  return problems;
}

std::vector<ConsistencyRow> consistency_table(const Scheduler& scheduler, const KnowledgeBase* kb,
                                              const std::vector<DegradationCombination>& combinations, int n,
                                              std::uint64_t seed) {
  std::vector<ConsistencyRow> rows;
  for (std::size_t i = 0; i < combinations.size(); ++i) {
    const auto stream = Substream::root(seed).child("consistency").child(i);
    rows.push_back({combinations[i], measure_consistency(scheduler, combinations[i].tasks(), kb, n, stream)});
  }
  return rows;
}

std::string consistency_to_text(const std::vector<ConsistencyRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-5s %-40s %8s %8s %10s %10s %8s\n", "group", "combination", "entropy", "var.rat",
                "sens.ent", "sens.vr", "samples");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-5c %-40s %8.4f %8.4f %10.4f %10.4f %8zu\n", r.combination.group,
                  r.combination.label().c_str(), r.report.entropy_bits, r.report.variation_ratio,
                  r.report.sensitivity_entropy, r.report.sensitivity_vr, r.report.n_samples);
    os << line;
  }
  return os.str();
}

json consistency_to_json(const std::vector<ConsistencyRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json dist = json::array();
    for (const auto& [plan, count] : r.report.distribution) {
      dist.push_back({{"order", detail::plan_json(plan)}, {"count", count}});
    }
    out.push_back({{"group", std::string(1, r.combination.group)},
                   {"combination", r.combination.label()},
                   {"entropy", r.report.entropy_bits},
                   {"variation_ratio", r.report.variation_ratio},
                   {"sensitivity_entropy", r.report.sensitivity_entropy},
                   {"sensitivity_variation_ratio", r.report.sensitivity_vr},
                   {"samples", r.report.n_samples},
                   {"distribution", dist}});
  }
  return out;
}

}  // namespace agentir
