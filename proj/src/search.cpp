#include "agentir/search.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json_util.hpp"

namespace agentir {

std::string RunMode::name() const {
  std::vector<std::string> parts;
  if (!reflection) parts.emplace_back("no-reflection");
  if (!rollback) parts.emplace_back("no-rollback");
  if (!retrieval) parts.emplace_back("no-retrieval");
  if (strict_threshold) parts.emplace_back("strict-threshold");
  if (parts.empty()) return "full";
  std::string out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

RunMode RunMode::parse(std::string_view text) {
  RunMode mode;
  if (text == "full") return mode;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('+', start);
    if (end == std::string_view::npos) end = text.size();
    const auto part = text.substr(start, end - start);
    if (part == "no-reflection") mode.reflection = false;
    else if (part == "no-rollback") mode.rollback = false;
    else if (part == "no-retrieval") mode.retrieval = false;
    else if (part == "strict-threshold") mode.strict_threshold = true;
    else throw Error(ErrorCode::InvalidArgument, "unknown run mode '" + std::string(part) + "'");
    start = end + 1;
  }
  return mode;
}

std::string_view name(RunStatus s) {
  switch (s) {
    case RunStatus::Clean: return "clean";
    case RunStatus::Success: return "success";
    case RunStatus::Compromise: return "compromise";
    case RunStatus::Error: return "error";
  }
  return "error";
}

namespace {

struct Frame {
  const SearchDeps& deps;
  Substream stream;
  SearchTrace& trace;
  std::size_t outer;
};

Plan without_front(const Plan& plan) { return Plan(plan.begin() + 1, plan.end()); }

TraceNode& open_node(Frame& ctx, std::optional<std::size_t> parent, std::size_t frame, std::size_t depth,
                     const Plan& plan, TaskKind subtask) {
  TraceNode node;
  node.id = ctx.trace.nodes.size();
  node.parent = parent;
  node.frame = frame;
  node.depth = depth;
  node.outer_iteration = ctx.outer;
  node.plan = plan;
  node.subtask = subtask;
  ctx.trace.nodes.push_back(std::move(node));
  return ctx.trace.nodes.back();
}

SubtaskOutcome attempt(Frame& ctx, std::size_t node_id, TaskKind task, const DegradationProfile& profile) {
  SubtaskOutcome out = execute_subtask(task, profile, *ctx.deps.tools, *ctx.deps.evaluator, ctx.deps.policy,
                                       ctx.stream);
  TraceNode& node = ctx.trace.nodes[node_id];
  node.status = out.status;
  node.tools_tried = out.tools_tried;
  node.invocations = out.invocations;
  ctx.trace.counters.invocations += out.invocations;
  return out;
}

DfsResult straight(Frame& ctx, const DegradationProfile& profile, const Plan& plan, std::optional<std::size_t> parent,
                   std::size_t frame, std::size_t depth) {
  AnnotatedProfile state{profile, {}, {}, std::nullopt};
  bool ok = true;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Plan rest(plan.begin() + static_cast<std::ptrdiff_t>(i), plan.end());
    const std::size_t id = open_node(ctx, parent, frame, depth + i, rest, plan[i]).id;
    auto out = attempt(ctx, id, plan[i], state.profile);
    state.profile = std::move(out.result);
    if (out.status == SubtaskStatus::Success) {
      state.completed.insert(plan[i]);
      state.completed_order.push_back(plan[i]);
    } else {
      ok = false;
      state.rejected = plan[i];
    }
    parent = id;
  }
  return {std::move(state), ok, plan};
}

DfsResult search_frame(Frame& ctx, const DegradationProfile& profile, const Plan& plan, const TaskSet& completed,
                       const Plan& completed_order, std::optional<std::size_t> parent, std::size_t depth) {
  if (plan.empty()) return {AnnotatedProfile{profile, completed, completed_order, std::nullopt}, true, plan};
  const std::size_t frame = ctx.trace.counters.nodes_expanded++;
  if (!ctx.deps.rollback) return straight(ctx, profile, plan, parent, frame, depth);

  TaskSet attempts;
  std::vector<AnnotatedProfile> inferiors;
  Plan current = plan;
  while (true) {
    const TaskKind subtask = current.front();
    const std::size_t id = open_node(ctx, parent, frame, depth, current, subtask).id;
    auto out = attempt(ctx, id, subtask, profile);
    AnnotatedProfile branch_best{out.result, completed, completed_order, subtask};
    if (out.status == SubtaskStatus::Success) {
      TaskSet next_completed = completed;
      next_completed.insert(subtask);
      Plan next_order = completed_order;
      next_order.push_back(subtask);
      DfsResult child = search_frame(ctx, out.result, without_front(current), next_completed, next_order, id,
                                     depth + 1);
      if (child.success) return {std::move(child.best), true, current};
      ctx.trace.nodes[id].rolled_back = true;
      ++ctx.trace.counters.rollbacks;
      branch_best = std::move(child.best);
    }
    attempts.insert(subtask);
    inferiors.push_back(std::move(branch_best));
    if (attempts.size() != current.size()) {
      const Substream s = ctx.stream.child("schedule").child(profile.fingerprint(), attempts.mask());
      current = reschedule(*ctx.deps.scheduler, current, attempts, ctx.deps.kb, s);
      ctx.trace.nodes[id].rescheduled = true;
      ++ctx.trace.counters.reschedules;
      continue;
    }
    std::vector<DegradationProfile> pool;
    pool.reserve(inferiors.size());
    for (const auto& inf : inferiors) pool.push_back(inf.profile);
    const auto best = pick_best_index(pool, default_comparator(*ctx.deps.evaluator, ctx.stream.child("eval")));
    return {std::move(inferiors[best]), false, current};
  }
}

void check_deps(const SearchDeps& deps) {
  if (!deps.scheduler || !deps.evaluator || !deps.tools) {
    throw Error(ErrorCode::InvalidArgument, "search needs a scheduler, an evaluator and tools");
  }
  deps.policy.validate();
}

}  // namespace

DfsResult dfs(const DegradationProfile& profile, const Plan& plan, const SearchDeps& deps, Substream stream,
              SearchTrace& trace, std::size_t outer_iteration) {
  check_deps(deps);
  if (TaskSet::of(plan).size() != plan.size()) throw Error(ErrorCode::InvalidArgument, "plan has duplicates");
  Frame ctx{deps, stream, trace, outer_iteration};
  return search_frame(ctx, profile, plan, {}, {}, std::nullopt, 0);
}

WorkflowResult run_workflow(const DegradationProfile& input, const SearchDeps& deps, Substream stream) {
  check_deps(deps);
  WorkflowResult result{input, {}};
  SearchTrace& trace = result.trace;
  trace.agenda = evaluate_agenda(*deps.evaluator, input, stream.child("eval"));
  if (trace.agenda.empty()) {
    trace.status = RunStatus::Clean;
    return result;
  }
  bool compromised = false;
  try {
    Plan plan = deps.scheduler->schedule(trace.agenda.tasks(), deps.kb, {},
                                         stream.child("schedule").child(input.fingerprint()));
    trace.first_plan = plan;
    std::size_t iteration = 0;
    while (!plan.empty()) {
      DfsResult r = dfs(result.final_profile, plan, deps, stream, trace, iteration);
      OuterIteration it{plan, r.success, {}};
      result.final_profile = std::move(r.best.profile);
      trace.completed_order.insert(trace.completed_order.end(), r.best.completed_order.begin(),
                                   r.best.completed_order.end());
      if (r.success) {
        trace.outer.push_back(std::move(it));
        break;
      }
      compromised = true;
      ++trace.counters.compromises;
      it.consumed = r.best.completed;
      if (r.best.rejected) it.consumed.insert(*r.best.rejected);
      if (!deps.rollback) {
        trace.outer.push_back(std::move(it));
        break;
      }
      Plan remaining;
      for (auto t : r.plan) {
        if (!it.consumed.contains(t)) remaining.push_back(t);
      }
      trace.outer.push_back(std::move(it));
      plan = std::move(remaining);
      ++iteration;
    }
    trace.status = compromised ? RunStatus::Compromise : RunStatus::Success;
  } catch (const Error& e) {
    trace.status = RunStatus::Error;
    trace.error = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return result;
}

SearchCounters recompute_counters(const SearchTrace& trace) {
  SearchCounters c;
  std::set<std::pair<std::size_t, std::size_t>> frames;
  for (const auto& n : trace.nodes) {
    if (n.rolled_back) ++c.rollbacks;
    if (n.rescheduled) ++c.reschedules;
    c.invocations += n.invocations;
    frames.insert({n.outer_iteration, n.frame});
  }
  c.nodes_expanded = frames.size();
  for (const auto& it : trace.outer) {
    if (!it.success) ++c.compromises;
  }
  return c;
}

nlohmann::json trace_to_json(const SearchTrace& trace) {
  using detail::plan_json;
  nlohmann::json tree = nlohmann::json::array();
  for (const auto& n : trace.nodes) {
    tree.push_back({{"id", n.id},
                    {"parent", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)},
                    {"frame", n.frame},
                    {"depth", n.depth},
                    {"outer_iteration", n.outer_iteration},
                    {"plan", plan_json(n.plan)},
                    {"subtask", std::string(name(n.subtask))},
                    {"status", n.status == SubtaskStatus::Success ? "success" : "failure"},
                    {"tools_tried", n.tools_tried},
                    {"invocations", n.invocations},
                    {"rolled_back", n.rolled_back},
                    {"rescheduled", n.rescheduled}});
  }
  nlohmann::json outer = nlohmann::json::array();
  for (const auto& it : trace.outer) {
    outer.push_back({{"plan", plan_json(it.plan)}, {"success", it.success}, {"consumed", plan_json(it.consumed.tasks())}});
  }
  nlohmann::json doc = {{"status", std::string(name(trace.status))},
                        {"agenda", plan_json(trace.agenda.tasks())},
                        {"first_plan", plan_json(trace.first_plan)},
                        {"completed_order", plan_json(trace.completed_order)},
                        {"counters",
                         {{"rollbacks", trace.counters.rollbacks},
                          {"reschedules", trace.counters.reschedules},
                          {"compromises", trace.counters.compromises},
                          {"invocations", trace.counters.invocations},
                          {"nodes_expanded", trace.counters.nodes_expanded}}},
                        {"outer", outer},
                        {"tree", tree}};
  if (!trace.error.empty()) doc["error"] = trace.error;
  return doc;
}

OracleResult brute_force_oracle(const DegradationProfile& profile, const Agenda& agenda, const Environment& env,
                                const ExecutionPolicy& policy) {
  if (!env.deterministic()) throw Error(ErrorCode::NondeterministicEnv, "oracle needs a deterministic environment");
  if (agenda.size() > 4) throw Error(ErrorCode::InvalidArgument, "oracle supports agendas of at most four tasks");
  policy.validate();

  auto signature = [](const DegradationProfile& p) {
    auto s = p.severities();
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  };
  auto ladder = [&](TaskKind task, const DegradationProfile& state) -> std::optional<DegradationProfile> {
    const auto tools = env.tools_for(task);
    if (tools.empty()) throw Error(ErrorCode::NoTools, "no tools registered for " + std::string(name(task)));
    std::optional<DegradationProfile> best;
    for (const ToolSpec* tool : tools) {
      DegradationProfile r = apply_tool(env, state, *tool, Substream{});
      const Severity s = r.severity(degradation_for(task));
      if (s <= policy.accept_now) return r;
      if (s <= policy.accept_candidate && (!best || signature(r) < signature(*best))) best = std::move(r);
    }
    return best;
  };

  Plan order = agenda.tasks();
  do {
    DegradationProfile state = profile;
    bool ok = true;
    for (auto task : order) {
      auto next = ladder(task, state);
      if (!next) {
        ok = false;
        break;
      }
      state = std::move(*next);
    }
    if (ok) return {true, order};
  } while (std::next_permutation(order.begin(), order.end()));
  return {false, {}};
}

}  // namespace agentir
