#include "agentir/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace agentir {

namespace {

void require_schedulable(const Agenda& agenda, const TaskSet& banned_first) {
  if (!agenda.empty() && agenda.is_subset_of(banned_first)) {
    throw Error(ErrorCode::Unschedulable, "every task of the agenda is banned from the first position");
  }
}

bool reaches(const std::array<TaskSet, kNumDegradations>& succ, TaskKind from, TaskKind to) {
  TaskSet seen;
  std::vector<TaskKind> stack{from};
  while (!stack.empty()) {
    TaskKind t = stack.back();
    stack.pop_back();
    if (t == to) return true;
    if (seen.contains(t)) continue;
    seen.insert(t);
    for (auto n : succ[index_of(t)].tasks()) stack.push_back(n);
  }
  return false;
}

std::vector<TaskKind> by_name(std::vector<TaskKind> tasks) {
  std::sort(tasks.begin(), tasks.end(), task_name_less);
  return tasks;
}

Plan rule_order(const Agenda& agenda, const std::vector<PrecedenceRule>& applicable, const TaskSet& banned_first,
                std::vector<std::string>* warnings) {
  std::vector<const PrecedenceRule*> strict;
  for (const auto& r : applicable) {
    if (!r.indifferent) strict.push_back(&r);
  }
  std::stable_sort(strict.begin(), strict.end(), [](const PrecedenceRule* a, const PrecedenceRule* b) {
    if (a->margin != b->margin) return a->margin > b->margin;
    if (a->before != b->before) return task_name_less(a->before, b->before);
    return task_name_less(a->after, b->after);
  });

  std::array<TaskSet, kNumDegradations> succ{};
  std::array<TaskSet, kNumDegradations> pred{};
  for (const auto* r : strict) {
    if (reaches(succ, r->after, r->before)) {
      if (warnings) {
        warnings->push_back("dropped conflicting rule " + std::string(name(r->before)) + " before " +
                            std::string(name(r->after)));
      }
      continue;
    }
    succ[index_of(r->before)].insert(r->after);
    pred[index_of(r->after)].insert(r->before);
  }

  Plan plan;
  TaskSet placed;
  while (plan.size() < agenda.size()) {
    std::optional<TaskKind> pick;
    for (auto t : by_name(agenda.tasks())) {
      if (placed.contains(t)) continue;
      if (plan.empty() && banned_first.contains(t)) continue;
      if (!pred[index_of(t)].is_subset_of(placed)) continue;
      pick = t;
      break;
    }
    if (!pick) {
      // Only reachable for the first slot: every rule-free start is banned.
      for (auto t : by_name(agenda.tasks())) {
        if (!placed.contains(t) && !banned_first.contains(t)) {
          pick = t;
          break;
        }
      }
      if (!pick) throw Error(ErrorCode::Internal, "rule ordering stalled");
      if (warnings) {
        warnings->push_back("placed " + std::string(name(*pick)) + " first against precedence rules");
      }
      pred[index_of(*pick)] = TaskSet{};
    }
    plan.push_back(*pick);
    placed.insert(*pick);
  }
  return plan;
}

}  // namespace

Plan experience_schedule(const Agenda& agenda, const KnowledgeBase& kb, const TaskSet& banned_first,
                         std::vector<std::string>* warnings) {
  require_schedulable(agenda, banned_first);
  if (agenda.empty()) return {};
  const Retrieval found = retrieve(kb, agenda);

  const ExperienceRecord* best = nullptr;
  for (const auto& r : found.records) {
    if (r.order.empty() || banned_first.contains(r.order.front())) continue;
    if (!best || r.total_fail < best->total_fail ||
        (r.total_fail == best->total_fail && plan_name_less(r.order, best->order))) {
      best = &r;
    }
  }
  if (best) return best->order;
  return rule_order(agenda, found.rules, banned_first, warnings);
}

Plan random_schedule(const Agenda& agenda, Substream stream, const TaskSet& banned_first) {
  require_schedulable(agenda, banned_first);
  Plan plan = agenda.tasks();
  if (plan.empty()) return plan;
  Rng rng = stream.rng();
  std::vector<TaskKind> allowed;
  for (auto t : plan) {
    if (!banned_first.contains(t)) allowed.push_back(t);
  }
  const TaskKind first = allowed[rng.below(allowed.size())];
  std::vector<TaskKind> rest;
  for (auto t : plan) {
    if (t != first) rest.push_back(t);
  }
  rng.shuffle(rest);
  plan.clear();
  plan.push_back(first);
  plan.insert(plan.end(), rest.begin(), rest.end());
  return plan;
}

Plan ExperienceScheduler::schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb,
                                   const TaskSet& banned_first, Substream) const {
  static const KnowledgeBase empty;
  return experience_schedule(TaskSet::of(presented), kb ? *kb : empty, banned_first);
}

Plan RandomScheduler::schedule(const std::vector<TaskKind>& presented, const KnowledgeBase*,
                               const TaskSet& banned_first, Substream stream) const {
  return random_schedule(TaskSet::of(presented), stream, banned_first);
}

Plan reschedule(const Scheduler& scheduler, const Plan& plan, const TaskSet& attempts, const KnowledgeBase* kb,
                Substream stream) {
  const TaskSet tasks = TaskSet::of(plan);
  if (!attempts.is_subset_of(tasks) || attempts == tasks) {
    throw Error(ErrorCode::Unschedulable, "attempts must be a proper subset of the plan's tasks");
  }
  Plan next = scheduler.schedule(plan, kb, attempts, stream);
  if (!is_permutation_of(next, tasks) || attempts.contains(next.front())) {
    throw Error(ErrorCode::Internal, "scheduler " + scheduler.label() + " violated its contract");
  }
  return next;
}

double entropy_bits(const PlanCounts& counts) {
  std::size_t n = 0;
  for (const auto& [p, c] : counts) n += c;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (const auto& [p, c] : counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / static_cast<double>(n);
    h -= q * std::log2(q);
  }
  return h <= 0.0 ? 0.0 : h;
}

double variation_ratio(const PlanCounts& counts) {
  std::size_t n = 0, mode = 0;
  for (const auto& [p, c] : counts) {
    n += c;
    mode = std::max(mode, c);
  }
  if (n == 0) return 0.0;
  return 1.0 - static_cast<double>(mode) / static_cast<double>(n);
}

ConsistencyReport measure_consistency(const Scheduler& scheduler, const Agenda& agenda, const KnowledgeBase* kb,
                                      int n_per_presentation, Substream stream) {
  if (n_per_presentation < 1) throw Error(ErrorCode::InvalidArgument, "n_per_presentation must be >= 1");
  std::vector<TaskKind> presentation = agenda.tasks();
  ConsistencyReport report;
  double entropy_sum = 0.0, vr_sum = 0.0;
  std::size_t index = 0;
  do {
    PlanCounts local;
    for (int j = 0; j < n_per_presentation; ++j) {
      Plan plan = scheduler.schedule(presentation, kb, {}, stream.child(index, static_cast<std::uint64_t>(j)));
      ++local[plan];
      ++report.distribution[plan];
    }
    entropy_sum += entropy_bits(local);
    vr_sum += variation_ratio(local);
    ++index;
  } while (std::next_permutation(presentation.begin(), presentation.end()));

  report.n_presentations = index;
  report.n_samples = index * static_cast<std::size_t>(n_per_presentation);
  report.entropy_bits = entropy_bits(report.distribution);
  report.variation_ratio = variation_ratio(report.distribution);
  report.sensitivity_entropy = report.entropy_bits - entropy_sum / static_cast<double>(index);
  report.sensitivity_vr = report.variation_ratio - vr_sum / static_cast<double>(index);
  return report;
}

}  // namespace agentir
