#include "agentir/agentir.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "agentir/harness.hpp"
#include "json_util.hpp"

using namespace agentir;

struct air_env {
  std::shared_ptr<const Environment> env;
};

struct air_kb {
  KnowledgeBase kb;
};

namespace {

thread_local std::string last_message;

air_status fail(air_status status, const std::string& message) {
  last_message = message;
  return status;
}

template <typename Fn>
air_status guarded(Fn&& fn) {
  try {
    fn();
    last_message.clear();
    return AIR_OK;
  } catch (const Error& e) {
    return fail(static_cast<air_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(AIR_E_INTERNAL, e.what());
  } catch (...) {
    return fail(AIR_E_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw Error(ErrorCode::Internal, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

HarnessConfig config_or_default(const char* path) {
  return path ? load_harness_config(path) : default_harness_config();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string::npos) end = text.size();
    auto part = text.substr(start, end - start);
    if (!part.empty()) out.push_back(part);
    start = end + 1;
  }
  return out;
}

std::vector<DegradationCombination> combinations_from_list(const std::string& list) {
  std::vector<DegradationCombination> out;
  for (const auto& token : split(list, ',')) {
    if (token == "all") {
      for (const auto& c : builtin_combinations()) out.push_back(c);
    } else if (token.size() == 1 && !combinations_in_group(token[0]).empty()) {
      for (auto& c : combinations_in_group(token[0])) out.push_back(std::move(c));
    } else if (auto c = find_combination(token)) {
      out.push_back(*c);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown combination or group '" + token + "'");
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* air_version(void) { return "1.0.0"; }

const char* air_last_error_message(void) { return last_message.c_str(); }

const char* air_status_name(air_status status) {
  if (status == AIR_OK) return "Ok";
  if (status < AIR_E_INVALID_ARGUMENT || status > AIR_E_INTERNAL) return "Unknown";
  static thread_local std::string buf;
  buf = std::string(error_code_name(static_cast<ErrorCode>(status)));
  return buf.c_str();
}

void air_string_free(char* text) { std::free(text); }

air_status air_env_load(const char* path, air_env** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new air_env{std::make_shared<Environment>(load_environment(path))};
  });
}

air_status air_env_from_json(const char* json, air_env** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new air_env{std::make_shared<Environment>(environment_from_json(detail::parse_json(json, "json")))};
  });
}

air_status air_env_paper_tabular(uint64_t seed, air_env** out) {
  return guarded([&] {
    require(out, "out");
    *out = new air_env{std::make_shared<Environment>(paper_tabular_env(seed))};
  });
}

air_status air_env_default_mechanistic(uint64_t seed, air_env** out) {
  return guarded([&] {
    require(out, "out");
    *out = new air_env{std::make_shared<Environment>(default_mechanistic_env(seed))};
  });
}

air_status air_env_to_json(const air_env* env, char** out) {
  return guarded([&] {
    require(env, "env");
    require(out, "out");
    *out = dup_string(environment_to_json(*env->env).dump(2));
  });
}

void air_env_free(air_env* env) { delete env; }

air_status air_kb_load(const char* path, air_kb** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new air_kb{load_kb(path)};
  });
}

air_status air_kb_paper(air_kb** out) {
  return guarded([&] {
    require(out, "out");
    *out = new air_kb{paper_knowledge_base()};
  });
}

air_status air_kb_save(const air_kb* kb, const char* path) {
  return guarded([&] {
    require(kb, "kb");
    require(path, "path");
    save_kb(kb->kb, path);
  });
}

air_status air_kb_to_json(const air_kb* kb, char** out) {
  return guarded([&] {
    require(kb, "kb");
    require(out, "out");
    *out = dup_string(kb_to_string(kb->kb));
  });
}

air_status air_kb_summary(const air_kb* kb, char** out) {
  return guarded([&] {
    require(kb, "kb");
    require(out, "out");
    *out = dup_string(experience_text(kb->kb.records));
  });
}

void air_kb_free(air_kb* kb) { delete kb; }

air_status air_explore(const char* config_path, const uint64_t* seed, int jobs, const char* tuples_path,
                       const char* kb_path, char** summary) {
  return guarded([&] {
    HarnessConfig cfg = config_or_default(config_path);
    ExplorationConfig ex = cfg.exploration;
    if (seed) ex.seed = *seed;
    ex.jobs = jobs < 1 ? 1 : jobs;
    const auto trials = explore(*cfg.env, ex, *cfg.evaluator);
    KnowledgeBase kb;
    kb.records = aggregate(trials);
    kb.rules = distill(kb.records);
    kb.provenance = ex.describe() + " env_seed=" + std::to_string(cfg.env->seed()) +
                    " env_mode=" + (cfg.env->mode() == Environment::Mode::Tabular ? "tabular" : "mechanistic");
    if (tuples_path) detail::write_file(tuples_path, trials_to_jsonl(trials));
    if (kb_path) save_kb(kb, kb_path);
    emit(summary, experience_text(kb.records));
  });
}

air_status air_summarize(const char* tuples_path, const char* kb_path, char** summary) {
  return guarded([&] {
    require(tuples_path, "tuples_path");
    KnowledgeBase kb;
    kb.records = aggregate(trials_from_jsonl(detail::read_file(tuples_path)));
    kb.rules = distill(kb.records);
    kb.provenance = std::string("summarized from ") + tuples_path;
    if (kb_path) save_kb(kb, kb_path);
    emit(summary, experience_text(kb.records));
  });
}

air_status air_run(const char* config_path, const air_kb* kb, const char* modes, uint64_t runs, uint64_t seed,
                   int jobs, const char* out_dir, char** report_text) {
  return guarded([&] {
    const HarnessConfig cfg = config_or_default(config_path);
    BatchOptions opts;
    opts.modes.clear();
    for (const auto& m : split(modes ? modes : "full", ',')) opts.modes.push_back(RunMode::parse(m));
    if (opts.modes.empty()) throw Error(ErrorCode::InvalidArgument, "no run modes given");
    opts.runs = runs;
    opts.seed = seed;
    opts.jobs = jobs < 1 ? 1 : jobs;
    opts.keep_traces = out_dir != nullptr;
    const KnowledgeBase builtin = kb ? KnowledgeBase{} : paper_knowledge_base();
    const BatchResult result = run_batch(cfg, kb ? kb->kb : builtin, opts);
    if (out_dir) write_batch(result, out_dir);
    emit(report_text, report_to_text(result.report));
  });
}

air_status air_run_one(const air_env* env, const air_kb* kb, const char* profile_json, const char* mode,
                       uint64_t seed, char** result_json) {
  return guarded([&] {
    require(env, "env");
    require(profile_json, "profile_json");
    require(result_json, "result_json");
    const RunMode m = RunMode::parse(mode ? mode : "full");
    const DegradationProfile input = profile_from_json(detail::parse_json(profile_json, "profile_json"));
    const Toolbox tools = Toolbox::from_environment(env->env);
    const PerfectOracle evaluator;
    const KnowledgeBase builtin = kb ? KnowledgeBase{} : paper_knowledge_base();
    const auto scheduler = make_scheduler(m.retrieval ? "experience" : "random", std::nullopt);
    SearchDeps deps;
    deps.scheduler = scheduler.get();
    deps.evaluator = &evaluator;
    deps.tools = &tools;
    deps.kb = kb ? &kb->kb : &builtin;
    deps.rollback = m.rollback;
    deps.policy.reflection = m.reflection;
    if (m.strict_threshold) deps.policy.accept_candidate = Severity::VeryLow;
    const WorkflowResult wr = run_workflow(input, deps, Substream::root(seed));
    const nlohmann::json doc = {{"success", restored(wr.final_profile)},
                                {"final", profile_to_json(wr.final_profile)},
                                {"trace", trace_to_json(wr.trace)}};
    *result_json = dup_string(doc.dump(2));
  });
}

air_status air_consistency(const char* config_path, const char* scheduler, const char* combinations,
                           const air_kb* kb, int n, uint64_t seed, char** table_text, char** table_json) {
  return guarded([&] {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    const HarnessConfig cfg = config_or_default(config_path);
    const auto sched = make_scheduler(scheduler ? scheduler : "experience", cfg.bridge);
    const auto combos = combinations_from_list(combinations ? combinations : "all");
    const KnowledgeBase builtin = kb ? KnowledgeBase{} : paper_knowledge_base();
    const auto rows = consistency_table(*sched, kb ? &kb->kb : &builtin, combos, n, seed);
    emit(table_text, consistency_to_text(rows));
    emit(table_json, consistency_to_json(rows).dump(2) + "\n");
  });
}

air_status air_verify(const char* dir, char** problems) {
  return guarded([&] {
    require(dir, "dir");
    require(problems, "problems");
    std::string text;
    for (const auto& p : verify_output(dir)) text += p + "\n";
    *problems = dup_string(text);
  });
}

}  // extern "C"
