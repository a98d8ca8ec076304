#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agentir/core.hpp"
#include "agentir/env.hpp"
#include "agentir/knowledge.hpp"
#include "agentir/perception.hpp"

namespace agentir {

struct ExplorationConfig {
  std::vector<DegradationCombination> combinations = combinations_in_group('A');
  int samples_per_combination = 20;
  int trials_per_sample = 1;
  Severity success_threshold = Severity::Low;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
  std::string describe() const;
};

// Initial profile for one exploration sample: every degradation of the combination
// drawn uniformly from {Medium, High, VeryHigh}.
DegradationProfile exploration_sample(const DegradationCombination& combination, std::size_t combination_index,
                                      std::size_t sample_index, std::uint64_t seed);

// Straight-through execution of every order of every combination. Tuples come out
// grouped by combination, sample, order and trial, independent of `jobs`.
std::vector<TrialResult> explore(const Environment& env, const ExplorationConfig& config, const Evaluator& ev);

KnowledgeBase explore_and_build_kb(const Environment& env, const ExplorationConfig& config, const Evaluator& ev);

std::string trials_to_jsonl(const std::vector<TrialResult>& trials);
std::vector<TrialResult> trials_from_jsonl(const std::string& text);

}  // namespace agentir
