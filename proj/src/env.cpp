#include "agentir/env.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"

namespace agentir {

using detail::json;

namespace {

constexpr double kSumTolerance = 1e-9;

std::string short_name(TaskKind t) {
  switch (t) {
    case TaskKind::SuperResolution: return "sr";
    case TaskKind::Denoising: return "denoise";
    case TaskKind::MotionDeblurring: return "motion-deblur";
    case TaskKind::DefocusDeblurring: return "defocus-deblur";
    case TaskKind::Deraining: return "derain";
    case TaskKind::Dehazing: return "dehaze";
    case TaskKind::JpegArtifactRemoval: return "dejpeg";
    case TaskKind::Brightening: return "brighten";
  }
  return "tool";
}

bool is_zero_or_one(double p) { return p == 0.0 || p == 1.0; }

// Combination a tabular state belongs to: what is still present plus what has been addressed.
std::vector<Degradation> tabular_combination(const DegradationProfile& state, TaskKind task) {
  std::vector<Degradation> ds = state.present_degradations();
  for (const auto& app : state.history()) ds.push_back(degradation_for(app.task));
  ds.push_back(degradation_for(task));
  return sorted_degradations(std::move(ds));
}

std::uint64_t draw_base(const Environment& env, const DegradationProfile& state, TaskKind task,
                        Substream stream) {
  std::uint64_t h = hash_combine(env.seed(), stream.key());
  h = hash_combine(h, hash_string(state.origin()));
  for (const auto& app : state.history()) h = hash_combine(h, index_of(app.task));
  return hash_combine(h, index_of(task) + 101);
}

}  // namespace

void OutcomeDistribution::validate() const {
  for (double p : {full, partial, none}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::Schema, "outcome probability outside [0,1]");
  }
  if (std::abs(full + partial + none - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::Schema, "outcome probabilities do not sum to 1");
  }
}

bool OutcomeDistribution::degenerate() const {
  return full == 1.0 || partial == 1.0 || none == 1.0;
}

Outcome OutcomeDistribution::sample(double u) const {
  if (u < none) return Outcome::NoEffect;
  if (u < none + partial) return Outcome::PartialSuccess;
  return Outcome::FullSuccess;
}

OutcomeDistribution compose_fail_boost(const OutcomeDistribution& dist, double delta) {
  const double success = dist.full + dist.partial;
  const double moved = std::clamp(delta, 0.0, success);
  OutcomeDistribution out = dist;
  if (success > 0.0) {
    out.full = std::max(0.0, dist.full - moved * dist.full / success);
    out.partial = std::max(0.0, dist.partial - moved * dist.partial / success);
  }
  out.none = dist.none + moved;
  if (moved >= success) {
    out.full = 0.0;
    out.partial = 0.0;
  }
  const double total = out.full + out.partial + out.none;
  out.full /= total;
  out.partial /= total;
  out.none /= total;
  if (out.none > 1.0) out.none = 1.0;
  return out;
}

bool InteractionRule::matches(const DegradationProfile& state) const {
  if (const auto* p = std::get_if<DegradationPresent>(&condition)) {
    return state.severity(p->degradation) >= p->min_severity;
  }
  const auto& h = std::get<TaskInHistory>(condition);
  return std::any_of(state.history().begin(), state.history().end(),
                     [&](const Application& a) { return a.task == h.task; });
}

const CalibrationRow* TabularCalibration::find(const std::vector<Degradation>& combination,
                                               const Plan& order) const {
  const auto key = sorted_degradations(combination);
  for (const auto& row : rows) {
    if (row.combination == key && row.order == order) return &row;
  }
  return nullptr;
}

std::optional<double> TabularCalibration::fail_probability(
    const std::vector<Degradation>& combination, const Plan& applied_before, TaskKind task) const {
  Plan prefix = applied_before;
  auto it = std::find(prefix.begin(), prefix.end(), task);
  if (it == prefix.end()) {
    prefix.push_back(task);
  } else {
    prefix.erase(it + 1, prefix.end());
  }
  const auto key = sorted_degradations(combination);
  double sum = 0.0;
  int matched = 0;
  for (const auto& row : rows) {
    if (row.combination != key || row.order.size() < prefix.size()) continue;
    if (!std::equal(prefix.begin(), prefix.end(), row.order.begin())) continue;
    auto f = row.fail.find(degradation_for(task));
    if (f == row.fail.end()) continue;
    sum += f->second;
    ++matched;
  }
  if (matched == 0) return std::nullopt;
  return sum / matched;
}

TabularCalibration paper_calibration() {
  using D = Degradation;
  using T = TaskKind;
  auto row = [](std::vector<D> combo, Plan order, std::map<D, double> fail) {
    return CalibrationRow{sorted_degradations(std::move(combo)), std::move(order), std::move(fail)};
  };
  TabularCalibration cal;
  cal.rows = {
      row({D::LowLight, D::Noise}, {T::Denoising, T::Brightening}, {{D::LowLight, 0.220}, {D::Noise, 0.429}}),
      row({D::LowLight, D::Noise}, {T::Brightening, T::Denoising}, {{D::LowLight, 0.28}, {D::Noise, 0.42}}),
      row({D::DefocusBlur, D::Haze}, {T::DefocusDeblurring, T::Dehazing}, {{D::DefocusBlur, 0.0}, {D::Haze, 0.36}}),
      row({D::DefocusBlur, D::Haze}, {T::Dehazing, T::DefocusDeblurring}, {{D::DefocusBlur, 0.0}, {D::Haze, 0.40}}),
      row({D::DefocusBlur, D::JpegArtifact}, {T::JpegArtifactRemoval, T::DefocusDeblurring},
          {{D::DefocusBlur, 0.100}, {D::JpegArtifact, 0.309}}),
      row({D::DefocusBlur, D::JpegArtifact}, {T::DefocusDeblurring, T::JpegArtifactRemoval},
          {{D::DefocusBlur, 0.08}, {D::JpegArtifact, 0.48}}),
      row({D::MotionBlur, D::LowLight}, {T::MotionDeblurring, T::Brightening},
          {{D::MotionBlur, 0.220}, {D::LowLight, 0.249}}),
      row({D::MotionBlur, D::LowLight}, {T::Brightening, T::MotionDeblurring},
          {{D::MotionBlur, 0.279}, {D::LowLight, 0.250}}),
      row({D::MotionBlur, D::LowResolution}, {T::MotionDeblurring, T::SuperResolution},
          {{D::MotionBlur, 0.23}, {D::LowResolution, 0.09}}),
      row({D::MotionBlur, D::LowResolution}, {T::SuperResolution, T::MotionDeblurring},
          {{D::MotionBlur, 0.311}, {D::LowResolution, 0.06}}),
      row({D::Noise, D::JpegArtifact}, {T::Denoising, T::JpegArtifactRemoval},
          {{D::Noise, 0.381}, {D::JpegArtifact, 0.130}}),
      row({D::Noise, D::JpegArtifact}, {T::JpegArtifactRemoval, T::Denoising},
          {{D::Noise, 0.38}, {D::JpegArtifact, 0.14}}),
      row({D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, {{D::Rain, 0.05}, {D::Haze, 0.37}}),
      row({D::Rain, D::Haze}, {T::Dehazing, T::Deraining}, {{D::Rain, 0.249}, {D::Haze, 0.240}}),
      row({D::Rain, D::LowResolution}, {T::Deraining, T::SuperResolution},
          {{D::Rain, 0.26}, {D::LowResolution, 0.02}}),
      row({D::Rain, D::LowResolution}, {T::SuperResolution, T::Deraining},
          {{D::Rain, 0.631}, {D::LowResolution, 0.0}}),
  };
  cal.partial_share = 0.25;
  cal.fallback_fail = 0.2;
  return cal;
}

Environment Environment::mechanistic(std::vector<ToolSpec> tools, std::vector<InteractionRule> rules,
                                     std::uint64_t seed, double tool_correlation) {
  Environment env;
  env.mode_ = Mode::Mechanistic;
  env.tools_ = std::move(tools);
  env.rules_ = std::move(rules);
  env.seed_ = seed;
  env.tool_correlation_ = tool_correlation;
  env.validate();
  return env;
}

Environment Environment::tabular(std::vector<ToolSpec> tools, TabularCalibration calibration,
                                 std::uint64_t seed, double tool_correlation) {
  Environment env;
  env.mode_ = Mode::Tabular;
  env.tools_ = std::move(tools);
  env.calibration_ = std::move(calibration);
  env.seed_ = seed;
  env.tool_correlation_ = tool_correlation;
  env.validate();
  return env;
}

void Environment::validate() const {
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    tools_[i].base_outcome.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (tools_[j].id == tools_[i].id) {
        throw Error(ErrorCode::Schema, "duplicate tool id '" + tools_[i].id + "'");
      }
    }
  }
  for (const auto& rule : rules_) {
    if (const auto* fb = std::get_if<FailBoost>(&rule.effect); fb && fb->delta < 0.0) {
      throw Error(ErrorCode::Schema, "fail boost must be non-negative");
    }
    if (const auto* se = std::get_if<SideEffect>(&rule.effect)) {
      if (se->levels < 1) throw Error(ErrorCode::Schema, "side effect levels must be >= 1");
      if (!(se->probability >= 0.0 && se->probability <= 1.0)) {
        throw Error(ErrorCode::Schema, "side effect probability outside [0,1]");
      }
    }
  }
  if (!(tool_correlation_ >= 0.0 && tool_correlation_ <= 1.0)) {
    throw Error(ErrorCode::Schema, "tool_correlation outside [0,1]");
  }
  for (double p : {calibration_.partial_share, calibration_.fallback_fail}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::Schema, "calibration parameter outside [0,1]");
  }
  for (const auto& row : calibration_.rows) {
    for (const auto& [d, p] : row.fail) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::Schema, "fail probability outside [0,1]");
    }
  }
}

const ToolSpec& Environment::tool(std::string_view id) const {
  for (const auto& t : tools_) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::UnknownTool, "unknown tool '" + std::string(id) + "'");
}

bool Environment::has_tool(const ToolSpec& tool) const {
  return std::any_of(tools_.begin(), tools_.end(), [&](const ToolSpec& t) { return t == tool; });
}

std::vector<const ToolSpec*> Environment::tools_for(TaskKind task) const {
  std::vector<const ToolSpec*> out;
  for (const auto& t : tools_) {
    if (t.task == task) out.push_back(&t);
  }
  return out;
}

OutcomeDistribution Environment::effective_distribution(const DegradationProfile& state,
                                                        const ToolSpec& tool) const {
  if (mode_ == Mode::Tabular) {
    const double fail = calibration_
                            .fail_probability(tabular_combination(state, tool.task),
                                              state.distinct_task_history(), tool.task)
                            .value_or(calibration_.fallback_fail);
    const double success = 1.0 - fail;
    return {success * (1.0 - calibration_.partial_share), success * calibration_.partial_share, fail};
  }
  OutcomeDistribution dist = tool.base_outcome;
  for (const auto& rule : rules_) {
    if (rule.task != tool.task || !rule.matches(state)) continue;
    if (const auto* fb = std::get_if<FailBoost>(&rule.effect)) dist = compose_fail_boost(dist, fb->delta);
  }
  return dist;
}

bool Environment::deterministic() const {
  if (mode_ == Mode::Tabular) {
    if (!is_zero_or_one(calibration_.partial_share) || !is_zero_or_one(calibration_.fallback_fail)) {
      return false;
    }
    for (const auto& row : calibration_.rows) {
      for (const auto& [d, p] : row.fail) {
        if (!is_zero_or_one(p)) return false;
      }
    }
    // Averaging over several matching rows can still produce fractions.
    for (const auto& row : calibration_.rows) {
      if (row.order.size() > 2) return false;
    }
    return true;
  }
  for (const auto& t : tools_) {
    if (!t.base_outcome.degenerate()) return false;
  }
  for (const auto& rule : rules_) {
    if (const auto* fb = std::get_if<FailBoost>(&rule.effect)) {
      if (fb->delta != 0.0 && fb->delta < 1.0) return false;
    } else if (!is_zero_or_one(std::get<SideEffect>(rule.effect).probability)) {
      return false;
    }
  }
  return true;
}

DegradationProfile apply_tool(const Environment& env, const DegradationProfile& state,
                              const ToolSpec& tool, Substream stream) {
  if (!env.has_tool(tool)) throw Error(ErrorCode::UnknownTool, "tool '" + tool.id + "' is not registered");

  const OutcomeDistribution dist = env.effective_distribution(state, tool);
  const std::uint64_t base = draw_base(env, state, tool.task, stream);
  const std::uint64_t tool_key = hash_combine(base, hash_string(tool.id));

  // With probability tool_correlation the tool shares the image's latent draw.
  double u = Rng(tool_key).uniform();
  if (env.tool_correlation() > 0.0 && Rng(hash_combine(tool_key, 1)).uniform() < env.tool_correlation()) {
    u = Rng(hash_combine(base, 2)).uniform();
  }

  DegradationProfile next = state;
  const Degradation target = degradation_for(tool.task);
  switch (dist.sample(u)) {
    case Outcome::FullSuccess:
      next.set_severity(target, Severity::VeryLow);
      break;
    case Outcome::PartialSuccess:
      next.set_severity(target, std::min(state.severity(target), Severity::Low));
      break;
    case Outcome::NoEffect:
      break;
  }

  if (env.mode() == Environment::Mode::Mechanistic) {
    const auto& rules = env.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const auto& rule = rules[i];
      if (rule.task != tool.task || !rule.matches(state)) continue;
      const auto* se = std::get_if<SideEffect>(&rule.effect);
      if (!se) continue;
      if (Rng(hash_combine(tool_key, 1000 + i)).uniform() < se->probability) {
        next.set_severity(se->degradation,
                          severity_from_level(level(next.severity(se->degradation)) + se->levels));
      }
    }
  }
  next.append_history(tool.task, tool.id);
  return next;
}

std::vector<ToolSpec> default_tool_registry() {
  std::vector<ToolSpec> tools;
  for (auto t : kAllTasks) {
    const std::string base = short_name(t);
    tools.push_back({base + ".strong", t, {0.70, 0.20, 0.10}});
    tools.push_back({base + ".balanced", t, {0.50, 0.30, 0.20}});
    tools.push_back({base + ".weak", t, {0.30, 0.30, 0.40}});
  }
  return tools;
}

Environment default_mechanistic_env(std::uint64_t seed) {
  using D = Degradation;
  using T = TaskKind;
  std::vector<InteractionRule> rules = {
      {T::Dehazing, DegradationPresent{D::Noise, Severity::Medium}, FailBoost{0.5}},
      {T::Deraining, TaskInHistory{T::SuperResolution}, FailBoost{0.6}},
      {T::MotionDeblurring, DegradationPresent{D::JpegArtifact, Severity::Low}, SideEffect{D::JpegArtifact, 1, 0.5}},
      {T::DefocusDeblurring, DegradationPresent{D::JpegArtifact, Severity::Low}, SideEffect{D::JpegArtifact, 1, 0.5}},
      {T::Brightening, DegradationPresent{D::Noise, Severity::Low}, SideEffect{D::Noise, 1, 0.4}},
      {T::SuperResolution, DegradationPresent{D::MotionBlur, Severity::Medium}, FailBoost{0.4}},
      {T::SuperResolution, DegradationPresent{D::Noise, Severity::Medium}, FailBoost{0.3}},
      {T::Dehazing, DegradationPresent{D::Rain, Severity::Medium}, FailBoost{0.3}},
      {T::Dehazing, DegradationPresent{D::DefocusBlur, Severity::Medium}, FailBoost{0.2}},
      {T::Brightening, DegradationPresent{D::MotionBlur, Severity::Medium}, FailBoost{0.2}},
  };
  return Environment::mechanistic(default_tool_registry(), std::move(rules), seed);
}

Environment paper_tabular_env(std::uint64_t seed) {
  return Environment::tabular(default_tool_registry(), paper_calibration(), seed, 0.8);
}

// --- JSON -------------------------------------------------------------------

namespace {

json outcome_json(const OutcomeDistribution& d) {
  return json{{"full", d.full}, {"partial", d.partial}, {"none", d.none}};
}

json rule_json(const InteractionRule& r) {
  json j;
  j["task"] = std::string(name(r.task));
  if (const auto* p = std::get_if<DegradationPresent>(&r.condition)) {
    j["when"] = {{"present", std::string(name(p->degradation))}, {"min", std::string(name(p->min_severity))}};
  } else {
    j["when"] = {{"history", std::string(name(std::get<TaskInHistory>(r.condition).task))}};
  }
  if (const auto* fb = std::get_if<FailBoost>(&r.effect)) {
    j["effect"] = {{"fail_boost", fb->delta}};
  } else {
    const auto& se = std::get<SideEffect>(r.effect);
    j["effect"] = {{"side_effect",
                    {{"degradation", std::string(name(se.degradation))}, {"levels", se.levels}, {"p", se.probability}}}};
  }
  return j;
}

InteractionRule parse_rule(const json& j, const std::string& path) {
  using namespace detail;
  InteractionRule rule{as_task(field(j, "task", path), join(path, "task")), TaskInHistory{TaskKind::Denoising},
                       FailBoost{0.0}};
  const auto wpath = join(path, "when");
  const auto& when = field(j, "when", path);
  if (const auto* present = optional_field(when, "present", wpath)) {
    Severity min = Severity::Medium;
    if (const auto* m = optional_field(when, "min", wpath)) min = as_severity(*m, join(wpath, "min"));
    rule.condition = DegradationPresent{as_degradation(*present, join(wpath, "present")), min};
  } else if (const auto* hist = optional_field(when, "history", wpath)) {
    rule.condition = TaskInHistory{as_task(*hist, join(wpath, "history"))};
  } else {
    schema_error(wpath, "expected 'present' or 'history'");
  }
  const auto epath = join(path, "effect");
  const auto& effect = field(j, "effect", path);
  if (const auto* fb = optional_field(effect, "fail_boost", epath)) {
    const double delta = as_number(*fb, join(epath, "fail_boost"));
    if (delta < 0.0) schema_error(join(epath, "fail_boost"), "must be non-negative");
    rule.effect = FailBoost{delta};
  } else if (const auto* se = optional_field(effect, "side_effect", epath)) {
    const auto spath = join(epath, "side_effect");
    const auto levels = as_int(field(*se, "levels", spath), join(spath, "levels"));
    if (levels < 1) schema_error(join(spath, "levels"), "must be >= 1");
    rule.effect = SideEffect{as_degradation(field(*se, "degradation", spath), join(spath, "degradation")),
                             static_cast<int>(levels), as_probability(field(*se, "p", spath), join(spath, "p"))};
  } else {
    schema_error(epath, "expected 'fail_boost' or 'side_effect'");
  }
  return rule;
}

TabularCalibration parse_calibration(const json& j, const std::string& path) {
  using namespace detail;
  if (j.is_string()) {
    if (j.get<std::string>() == "paper") return paper_calibration();
    schema_error(path, "unknown calibration preset '" + j.get<std::string>() + "'");
  }
  TabularCalibration cal;
  const auto rpath = join(path, "rows");
  const auto& rows = as_array(field(j, "rows", path), rpath);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto p = join(rpath, i);
    CalibrationRow row;
    row.combination = sorted_degradations(as_degradations(field(rows[i], "combination", p), join(p, "combination")));
    row.order = as_plan(field(rows[i], "order", p), join(p, "order"));
    const auto fpath = join(p, "fail");
    const auto& fail = field(rows[i], "fail", p);
    if (!fail.is_object()) schema_error(fpath, "expected object");
    for (auto it = fail.begin(); it != fail.end(); ++it) {
      auto d = try_parse_degradation(it.key());
      if (!d) schema_error(join(fpath, it.key()), "unknown degradation");
      row.fail[*d] = as_probability(it.value(), join(fpath, it.key()));
    }
    cal.rows.push_back(std::move(row));
  }
  if (const auto* ps = optional_field(j, "partial_share", path)) cal.partial_share = as_probability(*ps, join(path, "partial_share"));
  if (const auto* ff = optional_field(j, "fallback_fail", path)) cal.fallback_fail = as_probability(*ff, join(path, "fallback_fail"));
  return cal;
}

json calibration_json(const TabularCalibration& cal) {
  json rows = json::array();
  for (const auto& row : cal.rows) {
    json fail = json::object();
    for (const auto& [d, p] : row.fail) fail[std::string(name(d))] = p;
    rows.push_back({{"combination", detail::degradations_json(row.combination)},
                    {"order", detail::plan_json(row.order)},
                    {"fail", fail}});
  }
  return json{{"rows", rows}, {"partial_share", cal.partial_share}, {"fallback_fail", cal.fallback_fail}};
}

}  // namespace

Environment environment_from_json(const json& doc) {
  using namespace detail;
  const std::string root = "$";
  if (!doc.is_object()) schema_error(root, "expected object");
  const std::string mode = as_string(field(doc, "mode", root), join(root, "mode"));
  std::uint64_t seed = 0;
  if (const auto* s = optional_field(doc, "seed", root)) seed = as_u64(*s, join(root, "seed"));
  double correlation = mode == "tabular" ? 0.8 : 0.0;
  if (const auto* c = optional_field(doc, "tool_correlation", root)) {
    correlation = as_probability(*c, join(root, "tool_correlation"));
  }

  std::vector<ToolSpec> tools;
  const auto* tools_json = optional_field(doc, "tools", root);
  if (!tools_json || (tools_json->is_string() && tools_json->get<std::string>() == "default")) {
    tools = default_tool_registry();
  } else {
    const auto tpath = join(root, "tools");
    const auto& arr = as_array(*tools_json, tpath);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = join(tpath, i);
      ToolSpec t;
      t.id = as_string(field(arr[i], "id", p), join(p, "id"));
      t.task = as_task(field(arr[i], "task", p), join(p, "task"));
      if (const auto* o = optional_field(arr[i], "outcome", p)) {
        const auto opath = join(p, "outcome");
        t.base_outcome = {as_probability(field(*o, "full", opath), join(opath, "full")),
                          as_probability(field(*o, "partial", opath), join(opath, "partial")),
                          as_probability(field(*o, "none", opath), join(opath, "none"))};
        if (std::abs(t.base_outcome.full + t.base_outcome.partial + t.base_outcome.none - 1.0) > kSumTolerance) {
          schema_error(opath, "probabilities do not sum to 1");
        }
      }
      tools.push_back(std::move(t));
    }
  }

  if (mode == "tabular") {
    const auto* cal = optional_field(doc, "calibration", root);
    TabularCalibration calibration = cal ? parse_calibration(*cal, join(root, "calibration")) : paper_calibration();
    return Environment::tabular(std::move(tools), std::move(calibration), seed, correlation);
  }
  if (mode == "mechanistic") {
    std::vector<InteractionRule> rules;
    const auto* rules_json = optional_field(doc, "rules", root);
    if (!rules_json || (rules_json->is_string() && rules_json->get<std::string>() == "default")) {
      if (!tools_json || tools_json->is_string()) return default_mechanistic_env(seed);
      rules = default_mechanistic_env(seed).rules();
    } else {
      const auto rpath = join(root, "rules");
      const auto& arr = as_array(*rules_json, rpath);
      for (std::size_t i = 0; i < arr.size(); ++i) rules.push_back(parse_rule(arr[i], join(rpath, i)));
    }
    return Environment::mechanistic(std::move(tools), std::move(rules), seed, correlation);
  }
  schema_error(join(root, "mode"), "expected 'tabular' or 'mechanistic'");
}

json environment_to_json(const Environment& env) {
  json tools = json::array();
  for (const auto& t : env.tools()) {
    tools.push_back({{"id", t.id}, {"task", std::string(name(t.task))}, {"outcome", outcome_json(t.base_outcome)}});
  }
  json doc = {{"mode", env.mode() == Environment::Mode::Tabular ? "tabular" : "mechanistic"},
              {"seed", env.seed()},
              {"tool_correlation", env.tool_correlation()},
              {"tools", tools}};
  if (env.mode() == Environment::Mode::Tabular) {
    doc["calibration"] = calibration_json(env.calibration());
  } else {
    json rules = json::array();
    for (const auto& r : env.rules()) rules.push_back(rule_json(r));
    doc["rules"] = rules;
  }
  return doc;
}

Environment load_environment(const std::string& path) {
  return environment_from_json(detail::load_json_file(path));
}

}  // namespace agentir
