#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agentir {

// Error kinds shared by every module; the C API maps them 1:1 onto status codes.
enum class ErrorCode {
  InvalidArgument = 1,
  Io,
  Schema,
  UnknownTool,
  NoTools,
  Unschedulable,
  EmptyInput,
  InconsistentTrial,
  NondeterministicEnv,
  MissingTools,
  Transport,
  Timeout,
  MalformedResponse,
  InvalidPermutation,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string_view error_code_name(ErrorCode code);

enum class Degradation : std::uint8_t {
  LowResolution,
  Noise,
  MotionBlur,
  DefocusBlur,
  Rain,
  Haze,
  JpegArtifact,
  LowLight,
};

enum class TaskKind : std::uint8_t {
  SuperResolution,
  Denoising,
  MotionDeblurring,
  DefocusDeblurring,
  Deraining,
  Dehazing,
  JpegArtifactRemoval,
  Brightening,
};

inline constexpr std::size_t kNumDegradations = 8;

inline constexpr std::array<Degradation, kNumDegradations> kAllDegradations = {
    Degradation::LowResolution, Degradation::Noise,     Degradation::MotionBlur,
    Degradation::DefocusBlur,   Degradation::Rain,      Degradation::Haze,
    Degradation::JpegArtifact,  Degradation::LowLight,
};

inline constexpr std::array<TaskKind, kNumDegradations> kAllTasks = {
    TaskKind::SuperResolution,   TaskKind::Denoising, TaskKind::MotionDeblurring,
    TaskKind::DefocusDeblurring, TaskKind::Deraining, TaskKind::Dehazing,
    TaskKind::JpegArtifactRemoval, TaskKind::Brightening,
};

constexpr TaskKind task_for(Degradation d) { return static_cast<TaskKind>(d); }
constexpr Degradation degradation_for(TaskKind t) { return static_cast<Degradation>(t); }
constexpr std::size_t index_of(Degradation d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index_of(TaskKind t) { return static_cast<std::size_t>(t); }

std::string_view name(Degradation d);
std::string_view name(TaskKind t);

// Accepts canonical names plus hyphen/underscore spellings and a few aliases
// ("low light", "low-light" for dark). Throws Error{Schema} on unknown names.
Degradation parse_degradation(std::string_view text);
TaskKind parse_task(std::string_view text);
std::optional<Degradation> try_parse_degradation(std::string_view text);
std::optional<TaskKind> try_parse_task(std::string_view text);

enum class Severity : std::uint8_t { VeryLow, Low, Medium, High, VeryHigh };

inline constexpr std::array<Severity, 5> kAllSeverities = {
    Severity::VeryLow, Severity::Low, Severity::Medium, Severity::High, Severity::VeryHigh};

// A degradation counts as present from this level upwards.
inline constexpr Severity kPresenceThreshold = Severity::Medium;

constexpr int level(Severity s) { return static_cast<int>(s); }
constexpr Severity severity_from_level(int lvl) {
  return static_cast<Severity>(lvl < 0 ? 0 : (lvl > 4 ? 4 : lvl));
}
constexpr Severity successor(Severity s) { return severity_from_level(level(s) + 1); }
constexpr Severity predecessor(Severity s) { return severity_from_level(level(s) - 1); }
constexpr bool is_present(Severity s) { return s >= kPresenceThreshold; }

std::string_view name(Severity s);
Severity parse_severity(std::string_view text);
std::optional<Severity> try_parse_severity(std::string_view text);

// Set of tasks, iterated in canonical order. Used for agendas and banned sets.
class TaskSet {
 public:
  TaskSet() = default;
  TaskSet(std::initializer_list<TaskKind> tasks) {
    for (auto t : tasks) insert(t);
  }
  template <typename Range>
  static TaskSet of(const Range& tasks) {
    TaskSet s;
    for (auto t : tasks) s.insert(t);
    return s;
  }

  void insert(TaskKind t) { mask_ |= bit(t); }
  void erase(TaskKind t) { mask_ &= static_cast<std::uint8_t>(~bit(t)); }
  bool contains(TaskKind t) const { return (mask_ & bit(t)) != 0; }
  bool empty() const { return mask_ == 0; }
  std::size_t size() const;
  std::vector<TaskKind> tasks() const;
  std::uint8_t mask() const { return mask_; }
  bool is_subset_of(const TaskSet& other) const { return (mask_ & ~other.mask_) == 0; }

  friend bool operator==(const TaskSet&, const TaskSet&) = default;

 private:
  static std::uint8_t bit(TaskKind t) { return static_cast<std::uint8_t>(1u << index_of(t)); }
  std::uint8_t mask_ = 0;
};

using Agenda = TaskSet;
using Plan = std::vector<TaskKind>;

bool is_permutation_of(const Plan& plan, const TaskSet& tasks);
std::string plan_to_string(const Plan& plan);
// Lexicographic comparison of plans by canonical task names.
bool plan_name_less(const Plan& a, const Plan& b);
bool task_name_less(TaskKind a, TaskKind b);

struct Application {
  TaskKind task;
  std::string tool_id;
  friend bool operator==(const Application&, const Application&) = default;
};

// The abstract image: severities per degradation plus the tools applied so far.
class DegradationProfile {
 public:
  DegradationProfile() { severities_.fill(Severity::VeryLow); }
  explicit DegradationProfile(std::string origin) : DegradationProfile() {
    origin_ = std::move(origin);
  }

  Severity severity(Degradation d) const { return severities_[index_of(d)]; }
  void set_severity(Degradation d, Severity s) { severities_[index_of(d)] = s; }
  bool present(Degradation d) const { return is_present(severity(d)); }
  std::vector<Degradation> present_degradations() const;
  bool clean() const { return present_degradations().empty(); }

  const std::vector<Application>& history() const { return history_; }
  void append_history(TaskKind task, std::string tool_id) {
    history_.push_back({task, std::move(tool_id)});
  }
  // Tasks in order of first application.
  Plan distinct_task_history() const;

  const std::string& origin() const { return origin_; }
  void set_origin(std::string origin) { origin_ = std::move(origin); }

  const std::array<Severity, kNumDegradations>& severities() const { return severities_; }

  // Stable 64-bit content hash (severities, history, origin).
  std::uint64_t fingerprint() const;

  friend bool operator==(const DegradationProfile&, const DegradationProfile&) = default;

 private:
  std::array<Severity, kNumDegradations> severities_{};
  std::vector<Application> history_;
  std::string origin_;
};

struct DegradationCombination {
  char group = 'A';
  std::vector<Degradation> degradations;

  TaskSet tasks() const;
  // "rain+haze"
  std::string label() const;
  friend bool operator==(const DegradationCombination&, const DegradationCombination&) = default;
};

// The sixteen combinations used for exploration (group A) and testing (A, B, C).
const std::vector<DegradationCombination>& builtin_combinations();
std::vector<DegradationCombination> combinations_in_group(char group);
// Looks up a builtin combination by label ("rain+haze"); degradations may be listed in any order.
std::optional<DegradationCombination> find_combination(std::string_view label);

// Sorted (canonical order) degradation set, the key used by experience records.
std::vector<Degradation> sorted_degradations(std::vector<Degradation> ds);

}  // namespace agentir
