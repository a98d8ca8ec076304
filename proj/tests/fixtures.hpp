#pragma once

// Random deterministic environments for search-versus-oracle comparisons.

#include <string>
#include <vector>

#include "agentir/env.hpp"
#include "agentir/rng.hpp"

namespace agentir::test {

struct DeterministicCase {
  Environment env;
  DegradationProfile input;
  Agenda agenda;
};

inline DeterministicCase random_deterministic_case(Rng& rng, std::size_t max_agenda = 3, std::size_t max_tools = 3) {
  Agenda agenda;
  const std::size_t n = 1 + rng.below(max_agenda);
  while (agenda.size() < n) agenda.insert(kAllTasks[rng.below(kAllTasks.size())]);
  const auto tasks = agenda.tasks();

  const OutcomeDistribution outcomes[] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  std::vector<ToolSpec> tools;
  for (auto t : tasks) {
    const std::size_t k = 1 + rng.below(max_tools);
    for (std::size_t i = 0; i < k; ++i) {
      tools.push_back({std::string(name(t)) + "#" + std::to_string(i), t, outcomes[rng.below(3)]});
    }
  }

  std::vector<InteractionRule> rules;
  const std::size_t n_rules = rng.below(5);
  for (std::size_t i = 0; i < n_rules; ++i) {
    const TaskKind task = tasks[rng.below(tasks.size())];
    const TaskKind other = tasks[rng.below(tasks.size())];
    RuleCondition cond = rng.below(2) == 0
                             ? RuleCondition{TaskInHistory{other}}
                             : RuleCondition{DegradationPresent{degradation_for(other),
                                                                severity_from_level(1 + static_cast<int>(rng.below(3)))}};
    RuleEffect effect = rng.below(2) == 0
                            ? RuleEffect{FailBoost{1.0}}
                            : RuleEffect{SideEffect{degradation_for(tasks[rng.below(tasks.size())]),
                                                    1 + static_cast<int>(rng.below(2)), 1.0}};
    rules.push_back({task, cond, effect});
  }

  DegradationProfile input("det");
  for (auto t : tasks) input.set_severity(degradation_for(t), severity_from_level(2 + static_cast<int>(rng.below(3))));
  return {Environment::mechanistic(std::move(tools), std::move(rules), rng.next_u64()), input, agenda};
}

}  // namespace agentir::test
