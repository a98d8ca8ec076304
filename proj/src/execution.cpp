#include "agentir/execution.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json_util.hpp"

namespace agentir {

SimToolAdapter::SimToolAdapter(std::shared_ptr<const Environment> env, ToolSpec spec)
    : env_(std::move(env)), spec_(std::move(spec)) {
  if (!env_) throw Error(ErrorCode::InvalidArgument, "simulator adapter needs an environment");
  env_->tool(spec_.id);
}

DegradationProfile SimToolAdapter::invoke(const DegradationProfile& input, Substream stream) const {
  return apply_tool(*env_, input, spec_, stream);
}

CommandToolAdapter::CommandToolAdapter(std::string id, TaskKind task, std::string command_template)
    : id_(std::move(id)), task_(task), template_(std::move(command_template)) {
  if (template_.find("{input}") == std::string::npos || template_.find("{output}") == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "command template for " + id_ + " needs {input} and {output}");
  }
}

namespace {

void replace_all(std::string& text, std::string_view from, const std::string& to) {
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

DegradationProfile CommandToolAdapter::invoke(const DegradationProfile& input, Substream stream) const {
  namespace fs = std::filesystem;
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream stem;
  stem << "agentir-" << std::hex << stream.key() << "-" << counter.fetch_add(1);
  const fs::path dir = fs::temp_directory_path();
  const fs::path in = dir / (stem.str() + "-in.json");
  const fs::path out = dir / (stem.str() + "-out.json");

  detail::write_file(in.string(), profile_to_json(input).dump() + "\n");
  std::string cmd = template_;
  replace_all(cmd, "{input}", shell_quote(in.string()));
  replace_all(cmd, "{output}", shell_quote(out.string()));
  replace_all(cmd, "{seed}", std::to_string(stream.key()));
  const int rc = std::system(cmd.c_str());
  std::error_code ignored;
  fs::remove(in, ignored);
  if (rc != 0) {
    fs::remove(out, ignored);
    throw Error(ErrorCode::Io, "tool " + id_ + " exited with status " + std::to_string(rc));
  }
  DegradationProfile result = profile_from_json(detail::load_json_file(out.string()));
  fs::remove(out, ignored);
  result.set_origin(input.origin());
  result.append_history(task_, id_);
  return result;
}

Toolbox Toolbox::from_environment(std::shared_ptr<const Environment> env) {
  Toolbox box;
  for (const auto& spec : env->tools()) box.add(std::make_shared<SimToolAdapter>(env, spec));
  return box;
}

void Toolbox::add(std::shared_ptr<const ToolAdapter> adapter) {
  for (const auto& a : adapters_) {
    if (a->id() == adapter->id()) throw Error(ErrorCode::InvalidArgument, "duplicate tool id " + adapter->id());
  }
  adapters_.push_back(std::move(adapter));
}

std::vector<const ToolAdapter*> Toolbox::for_task(TaskKind task) const {
  std::vector<const ToolAdapter*> out;
  for (const auto& a : adapters_) {
    if (a->task() == task) out.push_back(a.get());
  }
  return out;
}

void ExecutionPolicy::validate() const {
  if (accept_now > accept_candidate) {
    throw Error(ErrorCode::InvalidArgument, "accept_now must not be laxer than accept_candidate");
  }
}

ExecutionPolicy ExecutionPolicy::strict() {
  ExecutionPolicy p;
  p.accept_candidate = Severity::VeryLow;
  return p;
}

std::size_t pick_best_index(const std::vector<DegradationProfile>& candidates, const Comparator& better,
                            std::size_t* comparisons) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyInput, "pick_best needs at least one candidate");
  std::size_t best = 0, calls = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    ++calls;
    if (better(candidates[best], candidates[i])) best = i;
  }
  if (comparisons) *comparisons = calls;
  return best;
}

const DegradationProfile& pick_best(const std::vector<DegradationProfile>& candidates, const Comparator& better,
                                    std::size_t* comparisons) {
  return candidates[pick_best_index(candidates, better, comparisons)];
}

std::array<Severity, kNumDegradations> severity_signature(const Evaluator& ev, const DegradationProfile& p,
                                                          Substream stream) {
  std::array<Severity, kNumDegradations> sig{};
  for (auto d : kAllDegradations) sig[index_of(d)] = ev.assess(p, d, stream);
  std::sort(sig.begin(), sig.end(), std::greater<>());
  return sig;
}

Comparator default_comparator(const Evaluator& ev, Substream stream) {
  return [&ev, stream](const DegradationProfile& first, const DegradationProfile& second) {
    return severity_signature(ev, second, stream) < severity_signature(ev, first, stream);
  };
}

SubtaskOutcome execute_subtask(TaskKind task, const DegradationProfile& profile, const Toolbox& tools,
                               const Evaluator& ev, const ExecutionPolicy& policy, Substream stream) {
  policy.validate();
  auto order = tools.for_task(task);
  if (order.empty()) throw Error(ErrorCode::NoTools, "no tools registered for " + std::string(name(task)));
  if (policy.tool_order == ToolOrder::SeededShuffle) {
    Rng rng = stream.child("tool-order").child(profile.fingerprint(), index_of(task)).rng();
    rng.shuffle(order);
  }
  const Substream tool_stream = stream.child("tools");
  const Substream eval_stream = stream.child("eval");

  SubtaskOutcome out;
  std::vector<std::size_t> candidates;
  for (const ToolAdapter* tool : order) {
    out.produced.push_back(tool->invoke(profile, tool_stream));
    out.tools_tried.push_back(tool->id());
    ++out.invocations;
    const DegradationProfile& result = out.produced.back();
    if (!policy.reflection) {
      out.status = SubtaskStatus::Success;
      out.result = result;
      return out;
    }
    const Severity verdict = reflect(ev, result, task, eval_stream);
    out.verdicts.push_back(verdict);
    if (verdict <= policy.accept_now) {
      out.status = SubtaskStatus::Success;
      out.result = result;
      return out;
    }
    if (verdict <= policy.accept_candidate) candidates.push_back(out.produced.size() - 1);
  }

  const Comparator better = default_comparator(ev, eval_stream);
  out.candidates_considered = candidates.size();
  if (!candidates.empty()) {
    std::vector<DegradationProfile> pool;
    for (auto i : candidates) pool.push_back(out.produced[i]);
    out.status = SubtaskStatus::Success;
    out.result = pick_best(pool, better);
  } else {
    out.status = SubtaskStatus::Failure;
    out.result = pick_best(out.produced, better);
  }
  return out;
}

nlohmann::json profile_to_json(const DegradationProfile& p) {
  nlohmann::json sev = nlohmann::json::object();
  for (auto d : kAllDegradations) {
    if (p.severity(d) != Severity::VeryLow) sev[std::string(name(d))] = std::string(name(p.severity(d)));
  }
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& app : p.history()) hist.push_back({{"task", std::string(name(app.task))}, {"tool", app.tool_id}});
  return {{"origin", p.origin()}, {"severities", sev}, {"history", hist}};
}

DegradationProfile profile_from_json(const nlohmann::json& doc) {
  using namespace detail;
  const std::string path = "$";
  DegradationProfile p;
  if (const auto* o = optional_field(doc, "origin", path)) p.set_origin(as_string(*o, join(path, "origin")));
  const auto spath = join(path, "severities");
  const auto& sev = field(doc, "severities", path);
  if (!sev.is_object()) schema_error(spath, "expected object");
  for (auto it = sev.begin(); it != sev.end(); ++it) {
    const auto kpath = join(spath, it.key());
    auto d = try_parse_degradation(it.key());
    if (!d) schema_error(kpath, "unknown degradation");
    p.set_severity(*d, as_severity(it.value(), kpath));
  }
  if (const auto* h = optional_field(doc, "history", path)) {
    const auto hpath = join(path, "history");
    const auto& arr = as_array(*h, hpath);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto ipath = join(hpath, i);
      p.append_history(as_task(field(arr[i], "task", ipath), join(ipath, "task")),
                       as_string(field(arr[i], "tool", ipath), join(ipath, "tool")));
    }
  }
  return p;
}

}  // namespace agentir
