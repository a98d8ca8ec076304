#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentir/core.hpp"
#include "agentir/env.hpp"
#include "agentir/perception.hpp"
#include "agentir/rng.hpp"

namespace agentir {

// A restoration tool. invoke() returns a new profile and never touches its input.
class ToolAdapter {
 public:
  virtual ~ToolAdapter() = default;
  virtual const std::string& id() const = 0;
  virtual TaskKind task() const = 0;
  virtual DegradationProfile invoke(const DegradationProfile& input, Substream stream) const = 0;
};

class SimToolAdapter final : public ToolAdapter {
 public:
  SimToolAdapter(std::shared_ptr<const Environment> env, ToolSpec spec);
  const std::string& id() const override { return spec_.id; }
  TaskKind task() const override { return spec_.task; }
  DegradationProfile invoke(const DegradationProfile& input, Substream stream) const override;

 private:
  std::shared_ptr<const Environment> env_;
  ToolSpec spec_;
};

// Runs a shell command that reads and writes profile JSON files. The template's
// {input} and {output} placeholders are replaced by temporary file paths.
class CommandToolAdapter final : public ToolAdapter {
 public:
  CommandToolAdapter(std::string id, TaskKind task, std::string command_template);
  const std::string& id() const override { return id_; }
  TaskKind task() const override { return task_; }
  DegradationProfile invoke(const DegradationProfile& input, Substream stream) const override;

 private:
  std::string id_;
  TaskKind task_;
  std::string template_;
};

class Toolbox {
 public:
  Toolbox() = default;
  // One simulator adapter per registered tool, in registry order.
  static Toolbox from_environment(std::shared_ptr<const Environment> env);

  void add(std::shared_ptr<const ToolAdapter> adapter);
  std::vector<const ToolAdapter*> for_task(TaskKind task) const;
  const std::vector<std::shared_ptr<const ToolAdapter>>& adapters() const { return adapters_; }

 private:
  std::vector<std::shared_ptr<const ToolAdapter>> adapters_;
};

enum class ToolOrder { FixedRegistry, SeededShuffle };

struct ExecutionPolicy {
  Severity accept_now = Severity::VeryLow;
  Severity accept_candidate = Severity::Low;
  ToolOrder tool_order = ToolOrder::SeededShuffle;
  // When false the first tool result is accepted without assessment.
  bool reflection = true;

  void validate() const;
  // Only very-low residual severity is accepted.
  static ExecutionPolicy strict();
};

enum class SubtaskStatus { Success, Failure };

struct SubtaskOutcome {
  SubtaskStatus status = SubtaskStatus::Failure;
  DegradationProfile result;
  std::vector<std::string> tools_tried;
  std::size_t invocations = 0;
  std::size_t candidates_considered = 0;
  std::vector<DegradationProfile> produced;
  std::vector<Severity> verdicts;  // one per invocation; empty without reflection
};

// Returns true when `second` is strictly better than `first`.
using Comparator = std::function<bool(const DegradationProfile& first, const DegradationProfile& second)>;

// Linear scan keeping the pairwise winner; exactly n-1 comparator calls.
std::size_t pick_best_index(const std::vector<DegradationProfile>& candidates, const Comparator& better,
                            std::size_t* comparisons = nullptr);
const DegradationProfile& pick_best(const std::vector<DegradationProfile>& candidates, const Comparator& better,
                                    std::size_t* comparisons = nullptr);

// Severities of all degradations sorted high to low, as assessed by `ev`.
std::array<Severity, kNumDegradations> severity_signature(const Evaluator& ev, const DegradationProfile& p,
                                                          Substream stream);
// Lexicographically smaller signature wins; ties go to the first argument.
Comparator default_comparator(const Evaluator& ev, Substream stream);

// Tries the task's tools in policy order with the acceptance ladder.
SubtaskOutcome execute_subtask(TaskKind task, const DegradationProfile& profile, const Toolbox& tools,
                               const Evaluator& ev, const ExecutionPolicy& policy, Substream stream);

nlohmann::json profile_to_json(const DegradationProfile& p);
DegradationProfile profile_from_json(const nlohmann::json& doc);

}  // namespace agentir
