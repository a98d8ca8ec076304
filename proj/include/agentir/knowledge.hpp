#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentir/core.hpp"

namespace agentir {

// One straight-through exploration run: which tasks of the combination succeeded.
struct TrialResult {
  std::vector<Degradation> combination;
  Plan order;
  std::map<TaskKind, bool> success;
  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct ExperienceRecord {
  std::vector<Degradation> combination;  // sorted
  Plan order;
  std::map<TaskKind, double> per_task_fail;
  double total_fail = 0.0;  // mean of per_task_fail
  std::uint64_t n_trials = 0;
  friend bool operator==(const ExperienceRecord&, const ExperienceRecord&) = default;
};

struct PrecedenceRule {
  TaskKind before;
  TaskKind after;
  double margin = 0.0;
  bool indifferent = false;
  std::vector<std::vector<Degradation>> support;
  friend bool operator==(const PrecedenceRule&, const PrecedenceRule&) = default;
};

// Total-fail differences below this are reported as indifferent.
inline constexpr double kTieEpsilon = 0.005;

struct KnowledgeBase {
  int version = 1;
  std::vector<ExperienceRecord> records;
  std::vector<PrecedenceRule> rules;
  std::string provenance;

  const ExperienceRecord* find(const std::vector<Degradation>& combination, const Plan& order) const;
  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

// Groups trials by (combination, order). Throws InconsistentTrial when a trial's
// flags do not cover exactly the tasks of its combination.
std::vector<ExperienceRecord> aggregate(const std::vector<TrialResult>& trials);

// Deterministic rule extraction: one rule per task pair that is observed in both
// relative orders. Pairs from three-task combinations compare the mean total fail
// rate of all orders sharing the pair's relative order.
std::vector<PrecedenceRule> distill(const std::vector<ExperienceRecord>& records,
                                    double tie_epsilon = kTieEpsilon);

struct Retrieval {
  std::vector<PrecedenceRule> rules;
  std::vector<ExperienceRecord> records;
};
Retrieval retrieve(const KnowledgeBase& kb, const Agenda& agenda);

// Integer percent with ties rounded down (0.325 -> 32).
int display_percent(double fraction);

// "To address rain+haze in the image, when conducting first deraining and then
// dehazing, the fail rates of addressing ['rain', 'haze'] are ['5%', '37%'] ..."
// One sentence per combination; orders listed best first, combinations by label.
std::vector<std::string> describe_experience(const std::vector<ExperienceRecord>& records);
std::string experience_text(const std::vector<ExperienceRecord>& records);

// Records built straight from paper_calibration() plus the distilled rules.
KnowledgeBase paper_knowledge_base();
// Records from a set of calibration rows, each carrying `n_trials`.
std::vector<ExperienceRecord> records_from_calibration(std::uint64_t n_trials);

nlohmann::json kb_to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const nlohmann::json& doc);
std::string kb_to_string(const KnowledgeBase& kb);
void save_kb(const KnowledgeBase& kb, const std::string& path);
KnowledgeBase load_kb(const std::string& path);

}  // namespace agentir
