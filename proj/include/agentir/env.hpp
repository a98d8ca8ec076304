#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "agentir/core.hpp"
#include "agentir/rng.hpp"

namespace agentir {

enum class Outcome { FullSuccess, PartialSuccess, NoEffect };

struct OutcomeDistribution {
  double full = 1.0;
  double partial = 0.0;
  double none = 0.0;

  // Throws Error{Schema} unless every entry is in [0,1] and they sum to 1 within 1e-9.
  void validate() const;
  bool degenerate() const;
  Outcome sample(double u) const;
  friend bool operator==(const OutcomeDistribution&, const OutcomeDistribution&) = default;
};

struct ToolSpec {
  std::string id;
  TaskKind task = TaskKind::Denoising;
  OutcomeDistribution base_outcome;
  friend bool operator==(const ToolSpec&, const ToolSpec&) = default;
};

struct DegradationPresent {
  Degradation degradation;
  Severity min_severity = Severity::Medium;
  friend bool operator==(const DegradationPresent&, const DegradationPresent&) = default;
};
struct TaskInHistory {
  TaskKind task;
  friend bool operator==(const TaskInHistory&, const TaskInHistory&) = default;
};
using RuleCondition = std::variant<DegradationPresent, TaskInHistory>;

// Moves up to `delta` probability mass from the success outcomes to NoEffect.
struct FailBoost {
  double delta = 0.0;
  friend bool operator==(const FailBoost&, const FailBoost&) = default;
};
// With probability `probability`, raises `degradation` by `levels` (saturating).
struct SideEffect {
  Degradation degradation;
  int levels = 1;
  double probability = 1.0;
  friend bool operator==(const SideEffect&, const SideEffect&) = default;
};
using RuleEffect = std::variant<FailBoost, SideEffect>;

struct InteractionRule {
  TaskKind task;
  RuleCondition condition;
  RuleEffect effect;

  bool matches(const DegradationProfile& state) const;
  friend bool operator==(const InteractionRule&, const InteractionRule&) = default;
};

// Applies FailBoost to `dist`, clamped so no entry goes negative, then renormalized.
OutcomeDistribution compose_fail_boost(const OutcomeDistribution& dist, double delta);

struct CalibrationRow {
  std::vector<Degradation> combination;  // sorted
  Plan order;
  std::map<Degradation, double> fail;
  friend bool operator==(const CalibrationRow&, const CalibrationRow&) = default;
};

struct TabularCalibration {
  std::vector<CalibrationRow> rows;
  // Fraction of successes that leave the degradation at Low instead of VeryLow.
  double partial_share = 0.0;
  // Fail probability used when no row matches the state.
  double fallback_fail = 0.2;

  // Fail probability for `task` given the distinct-task prefix already applied.
  // Averages over every row of `combination` consistent with the prefix; nullopt if none.
  std::optional<double> fail_probability(const std::vector<Degradation>& combination,
                                         const Plan& applied_before, TaskKind task) const;
  const CalibrationRow* find(const std::vector<Degradation>& combination, const Plan& order) const;
  friend bool operator==(const TabularCalibration&, const TabularCalibration&) = default;
};

// Per-order fail rates collected by self-exploration over group A, as published.
// Tie rows carry a 0.1 pp refinement so that their totals display as printed.
TabularCalibration paper_calibration();

class Environment {
 public:
  enum class Mode { Mechanistic, Tabular };

  static Environment mechanistic(std::vector<ToolSpec> tools, std::vector<InteractionRule> rules,
                                 std::uint64_t seed, double tool_correlation = 0.0);
  static Environment tabular(std::vector<ToolSpec> tools, TabularCalibration calibration,
                             std::uint64_t seed, double tool_correlation = 0.0);

  Mode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  double tool_correlation() const { return tool_correlation_; }
  const std::vector<ToolSpec>& tools() const { return tools_; }
  const std::vector<InteractionRule>& rules() const { return rules_; }
  const TabularCalibration& calibration() const { return calibration_; }

  // Throws Error{UnknownTool}.
  const ToolSpec& tool(std::string_view id) const;
  bool has_tool(const ToolSpec& tool) const;
  std::vector<const ToolSpec*> tools_for(TaskKind task) const;

  // Distribution for the target degradation after composing all applicable rules.
  OutcomeDistribution effective_distribution(const DegradationProfile& state,
                                             const ToolSpec& tool) const;
  // True when every reachable outcome distribution is degenerate.
  bool deterministic() const;

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  Environment() = default;
  void validate() const;

  Mode mode_ = Mode::Mechanistic;
  std::vector<ToolSpec> tools_;
  std::vector<InteractionRule> rules_;
  TabularCalibration calibration_;
  std::uint64_t seed_ = 0;
  double tool_correlation_ = 0.0;
};

// Applies `tool` to `state` and returns a new profile. Draws depend only on
// (env seed, stream, origin, task history, tool id), so re-applying the same tool to
// the same image state reproduces the result.
DegradationProfile apply_tool(const Environment& env, const DegradationProfile& state,
                              const ToolSpec& tool, Substream stream);

// Three tools per task (strong / balanced / weak) with the order interactions used by
// the three-degradation searches.
Environment default_mechanistic_env(std::uint64_t seed);
// The registry of default_mechanistic_env driven by paper_calibration().
Environment paper_tabular_env(std::uint64_t seed);
std::vector<ToolSpec> default_tool_registry();

Environment environment_from_json(const nlohmann::json& doc);
nlohmann::json environment_to_json(const Environment& env);
Environment load_environment(const std::string& path);

}  // namespace agentir
