#include "agentir/core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "agentir/rng.hpp"

namespace agentir {

namespace {

constexpr std::array<std::string_view, kNumDegradations> kDegradationNames = {
    "low resolution", "noise", "motion blur", "defocus blur",
    "rain",           "haze",  "jpeg compression artifact", "dark",
};

constexpr std::array<std::string_view, kNumDegradations> kTaskNames = {
    "super-resolution", "denoising", "motion deblurring",
    "defocus deblurring", "deraining", "dehazing",
    "jpeg compression artifact removal", "brightening",
};

constexpr std::array<std::string_view, 5> kSeverityNames = {"very low", "low", "medium", "high",
                                                            "very high"};

// Lowercase, '-' and '_' folded to ' ', whitespace collapsed.
std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::NoTools: return "NoTools";
    case ErrorCode::Unschedulable: return "Unschedulable";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InconsistentTrial: return "InconsistentTrial";
    case ErrorCode::NondeterministicEnv: return "NondeterministicEnv";
    case ErrorCode::MissingTools: return "MissingTools";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::string_view name(Degradation d) { return kDegradationNames[index_of(d)]; }
std::string_view name(TaskKind t) { return kTaskNames[index_of(t)]; }
std::string_view name(Severity s) { return kSeverityNames[static_cast<std::size_t>(level(s))]; }

std::optional<Degradation> try_parse_degradation(std::string_view text) {
  const std::string key = normalize(text);
  for (auto d : kAllDegradations) {
    if (normalize(name(d)) == key) return d;
  }
  if (key == "low light" || key == "lowlight") return Degradation::LowLight;
  if (key == "jpeg artifact" || key == "jpeg") return Degradation::JpegArtifact;
  if (key == "lowres" || key == "low res") return Degradation::LowResolution;
  return std::nullopt;
}

std::optional<TaskKind> try_parse_task(std::string_view text) {
  const std::string key = normalize(text);
  for (auto t : kAllTasks) {
    if (normalize(name(t)) == key) return t;
  }
  if (key == "jpeg artifact removal") return TaskKind::JpegArtifactRemoval;
  if (key == "sr") return TaskKind::SuperResolution;
  return std::nullopt;
}

Degradation parse_degradation(std::string_view text) {
  if (auto d = try_parse_degradation(text)) return *d;
  throw Error(ErrorCode::Schema, "unknown degradation '" + std::string(text) + "'");
}

TaskKind parse_task(std::string_view text) {
  if (auto t = try_parse_task(text)) return *t;
  throw Error(ErrorCode::Schema, "unknown task '" + std::string(text) + "'");
}

std::optional<Severity> try_parse_severity(std::string_view text) {
  const std::string key = normalize(text);
  for (auto s : kAllSeverities) {
    if (name(s) == key) return s;
  }
  if (key == "verylow") return Severity::VeryLow;
  if (key == "veryhigh") return Severity::VeryHigh;
  return std::nullopt;
}

Severity parse_severity(std::string_view text) {
  if (auto s = try_parse_severity(text)) return *s;
  throw Error(ErrorCode::Schema, "unknown severity '" + std::string(text) + "'");
}

std::size_t TaskSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<TaskKind> TaskSet::tasks() const {
  std::vector<TaskKind> out;
  for (auto t : kAllTasks) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

bool is_permutation_of(const Plan& plan, const TaskSet& tasks) {
  if (plan.size() != tasks.size()) return false;
  TaskSet seen;
  for (auto t : plan) {
    if (!tasks.contains(t) || seen.contains(t)) return false;
    seen.insert(t);
  }
  return true;
}

std::string plan_to_string(const Plan& plan) {
  std::string out = "[";
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i) out += ", ";
    out += name(plan[i]);
  }
  return out + "]";
}

bool task_name_less(TaskKind a, TaskKind b) { return name(a) < name(b); }

bool plan_name_less(const Plan& a, const Plan& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), task_name_less);
}

std::vector<Degradation> DegradationProfile::present_degradations() const {
  std::vector<Degradation> out;
  for (auto d : kAllDegradations) {
    if (present(d)) out.push_back(d);
  }
  return out;
}

Plan DegradationProfile::distinct_task_history() const {
  Plan out;
  TaskSet seen;
  for (const auto& app : history_) {
    if (!seen.contains(app.task)) {
      seen.insert(app.task);
      out.push_back(app.task);
    }
  }
  return out;
}

std::uint64_t DegradationProfile::fingerprint() const {
  std::uint64_t h = hash_string(origin_);
  for (auto s : severities_) h = hash_combine(h, static_cast<std::uint64_t>(level(s)));
  for (const auto& app : history_) {
    h = hash_combine(h, index_of(app.task));
    h = hash_combine(h, hash_string(app.tool_id));
  }
  return h;
}

TaskSet DegradationCombination::tasks() const {
  TaskSet s;
  for (auto d : degradations) s.insert(task_for(d));
  return s;
}

std::string DegradationCombination::label() const {
  std::string out;
  for (std::size_t i = 0; i < degradations.size(); ++i) {
    if (i) out += "+";
    out += name(degradations[i]);
  }
  return out;
}

const std::vector<DegradationCombination>& builtin_combinations() {
  using D = Degradation;
  static const std::vector<DegradationCombination> combos = {
      {'A', {D::Rain, D::Haze}},
      {'A', {D::MotionBlur, D::LowResolution}},
      {'A', {D::LowLight, D::Noise}},
      {'A', {D::DefocusBlur, D::JpegArtifact}},
      {'A', {D::Noise, D::JpegArtifact}},
      {'A', {D::Rain, D::LowResolution}},
      {'A', {D::MotionBlur, D::LowLight}},
      {'A', {D::DefocusBlur, D::Haze}},
      {'B', {D::MotionBlur, D::JpegArtifact}},
      {'B', {D::Haze, D::Noise}},
      {'B', {D::DefocusBlur, D::LowResolution}},
      {'B', {D::Rain, D::LowLight}},
      {'C', {D::Haze, D::MotionBlur, D::LowResolution}},
      {'C', {D::Rain, D::Noise, D::LowResolution}},
      {'C', {D::LowLight, D::DefocusBlur, D::JpegArtifact}},
      {'C', {D::MotionBlur, D::DefocusBlur, D::Noise}},
  };
  return combos;
}

std::vector<DegradationCombination> combinations_in_group(char group) {
  std::vector<DegradationCombination> out;
  for (const auto& c : builtin_combinations()) {
    if (c.group == group) out.push_back(c);
  }
  return out;
}

std::optional<DegradationCombination> find_combination(std::string_view label) {
  std::vector<Degradation> wanted;
  std::size_t start = 0;
  while (start <= label.size()) {
    auto end = label.find('+', start);
    if (end == std::string_view::npos) end = label.size();
    auto d = try_parse_degradation(label.substr(start, end - start));
    if (!d) return std::nullopt;
    wanted.push_back(*d);
    start = end + 1;
  }
  const auto key = sorted_degradations(wanted);
  for (const auto& c : builtin_combinations()) {
    if (sorted_degradations(c.degradations) == key) return c;
  }
  return std::nullopt;
}

std::vector<Degradation> sorted_degradations(std::vector<Degradation> ds) {
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  return ds;
}

}  // namespace agentir
