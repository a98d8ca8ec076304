#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "agentir/core.hpp"
#include "agentir/knowledge.hpp"
#include "agentir/rng.hpp"

namespace agentir {

// Orders an agenda. `presented` is the agenda in the order it is shown to the
// scheduler; the result is a permutation of it whose first element is not in
// `banned_first` (when |presented| > |banned_first|). Throws Unschedulable otherwise.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb,
                        const TaskSet& banned_first, Substream stream) const = 0;
  virtual std::string label() const = 0;
};

// Experience-grounded ordering. Exact-match records beat pairwise rules, which beat
// the lexicographic default. Ties and leftover freedom are broken by canonical task name.
Plan experience_schedule(const Agenda& agenda, const KnowledgeBase& kb, const TaskSet& banned_first,
                         std::vector<std::string>* warnings = nullptr);

// Uniform permutation (conditioned on the banned-first constraint).
Plan random_schedule(const Agenda& agenda, Substream stream, const TaskSet& banned_first = {});

class ExperienceScheduler final : public Scheduler {
 public:
  Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb, const TaskSet& banned_first,
                Substream stream) const override;
  std::string label() const override { return "experience"; }
};

class RandomScheduler final : public Scheduler {
 public:
  Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb, const TaskSet& banned_first,
                Substream stream) const override;
  std::string label() const override { return "random"; }
};

// Restores the plan's task set and asks the scheduler for a new order that does not
// start with any failed attempt.
Plan reschedule(const Scheduler& scheduler, const Plan& plan, const TaskSet& attempts, const KnowledgeBase* kb,
                Substream stream);

struct ConsistencyReport {
  double entropy_bits = 0.0;
  double variation_ratio = 0.0;
  double sensitivity_entropy = 0.0;
  double sensitivity_vr = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_presentations = 0;
  std::map<Plan, std::size_t> distribution;
};

using PlanCounts = std::map<Plan, std::size_t>;
double entropy_bits(const PlanCounts& counts);
double variation_ratio(const PlanCounts& counts);

// Schedules the agenda n_per_presentation times under every presentation order.
ConsistencyReport measure_consistency(const Scheduler& scheduler, const Agenda& agenda, const KnowledgeBase* kb,
                                      int n_per_presentation, Substream stream);

}  // namespace agentir
