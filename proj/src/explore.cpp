#include "agentir/explore.hpp"

#include <algorithm>
#include <sstream>

#include "json_util.hpp"
#include "parallel.hpp"

namespace agentir {

void ExplorationConfig::validate() const {
  if (samples_per_combination < 1) throw Error(ErrorCode::InvalidArgument, "samples_per_combination must be >= 1");
  if (trials_per_sample < 1) throw Error(ErrorCode::InvalidArgument, "trials_per_sample must be >= 1");
  if (success_threshold != Severity::VeryLow && success_threshold != Severity::Low) {
    throw Error(ErrorCode::InvalidArgument, "success_threshold must be very low or low");
  }
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
}

std::string ExplorationConfig::describe() const {
  std::ostringstream os;
  os << "explore seed=" << seed << " samples=" << samples_per_combination << " trials=" << trials_per_sample
     << " threshold=" << name(success_threshold) << " combinations=";
  for (std::size_t i = 0; i < combinations.size(); ++i) os << (i ? "," : "") << combinations[i].label();
  return os.str();
}

DegradationProfile exploration_sample(const DegradationCombination& combination, std::size_t combination_index,
                                      std::size_t sample_index, std::uint64_t seed) {
  DegradationProfile p("explore/" + combination.label() + "/" + std::to_string(sample_index));
  Rng rng = Substream::root(seed).child("sample").child(combination_index, sample_index).rng();
  for (auto d : combination.degradations) {
    p.set_severity(d, severity_from_level(level(Severity::Medium) + static_cast<int>(rng.below(3))));
  }
  return p;
}

namespace {

std::vector<Plan> permutations(const DegradationCombination& c) {
  std::vector<Plan> out;
  Plan order = c.tasks().tasks();
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace

std::vector<TrialResult> explore(const Environment& env, const ExplorationConfig& config, const Evaluator& ev) {
  config.validate();
  for (const auto& c : config.combinations) {
    for (auto t : c.tasks().tasks()) {
      if (env.tools_for(t).empty()) {
        throw Error(ErrorCode::MissingTools, "no tools for " + std::string(name(t)) + " needed by " + c.label());
      }
    }
  }

  const auto samples = static_cast<std::size_t>(config.samples_per_combination);
  const auto trials = static_cast<std::size_t>(config.trials_per_sample);
  std::vector<std::vector<Plan>> orders;
  for (const auto& c : config.combinations) orders.push_back(permutations(c));

  // One work unit per (combination, sample).
  std::vector<std::vector<TrialResult>> slots(config.combinations.size() * samples);
  detail::parallel_for(slots.size(), config.jobs, [&](std::size_t unit) {
    const std::size_t ci = unit / samples, si = unit % samples;
    const auto& combination = config.combinations[ci];
    const DegradationProfile start = exploration_sample(combination, ci, si, config.seed);
    const auto sorted = sorted_degradations(combination.degradations);
    auto& out = slots[unit];
    for (std::size_t pi = 0; pi < orders[ci].size(); ++pi) {
      const Plan& order = orders[ci][pi];
      for (std::size_t ti = 0; ti < trials; ++ti) {
        const Substream stream = Substream::root(config.seed).child("explore").child(ci, si, pi, ti);
        DegradationProfile state = start;
        for (std::size_t step = 0; step < order.size(); ++step) {
          const auto tools = env.tools_for(order[step]);
          const auto pick = stream.child("tool-choice").child(step).rng().below(tools.size());
          state = apply_tool(env, state, *tools[pick], stream.child("tools"));
        }
        TrialResult trial{sorted, order, {}};
        for (auto d : combination.degradations) {
          trial.success[task_for(d)] = ev.assess(state, d, stream.child("eval")) <= config.success_threshold;
        }
        out.push_back(std::move(trial));
      }
    }
  });

  std::vector<TrialResult> all;
  for (auto& s : slots) {
    for (auto& t : s) all.push_back(std::move(t));
  }
  return all;
}

KnowledgeBase explore_and_build_kb(const Environment& env, const ExplorationConfig& config, const Evaluator& ev) {
  KnowledgeBase kb;
  kb.records = aggregate(explore(env, config, ev));
  kb.rules = distill(kb.records);
  kb.provenance = config.describe() + " env_seed=" + std::to_string(env.seed()) +
                  " env_mode=" + (env.mode() == Environment::Mode::Tabular ? "tabular" : "mechanistic");
  return kb;
}

std::string trials_to_jsonl(const std::vector<TrialResult>& trials) {
  std::string out;
  for (const auto& t : trials) {
    nlohmann::json success = nlohmann::json::object();
    for (const auto& [task, ok] : t.success) success[std::string(name(task))] = ok;
    nlohmann::json line = {{"combination", detail::degradations_json(t.combination)},
                           {"order", detail::plan_json(t.order)},
                           {"success", success}};
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<TrialResult> trials_from_jsonl(const std::string& text) {
  using namespace detail;
  std::vector<TrialResult> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string path = "line " + std::to_string(lineno);
    const json doc = parse_json(line, path);
    TrialResult t;
    t.combination = sorted_degradations(as_degradations(field(doc, "combination", path), join(path, "combination")));
    t.order = as_plan(field(doc, "order", path), join(path, "order"));
    const auto& success = field(doc, "success", path);
    const auto spath = join(path, "success");
    if (!success.is_object()) schema_error(spath, "expected object");
    for (auto it = success.begin(); it != success.end(); ++it) {
      auto task = try_parse_task(it.key());
      if (!task) schema_error(join(spath, it.key()), "unknown task");
      t.success[*task] = as_bool(it.value(), join(spath, it.key()));
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace agentir
