#include "agentir/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "agentir/env.hpp"
#include "json_util.hpp"

namespace agentir {

using detail::json;

namespace {

// Order in which a combination's degradations are displayed: the builtin listing
// when there is one, otherwise canonical order.
std::vector<Degradation> display_order(const std::vector<Degradation>& combination) {
  const auto key = sorted_degradations(combination);
  for (const auto& c : builtin_combinations()) {
    if (sorted_degradations(c.degradations) == key) return c.degradations;
  }
  return key;
}

std::string combination_label(const std::vector<Degradation>& combination) {
  return DegradationCombination{'?', display_order(combination)}.label();
}

std::string order_phrase(const Plan& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0) {
      out += "first ";
    } else if (i + 1 == order.size()) {
      out += order.size() > 2 ? ", and then " : " and then ";
    } else {
      out += ", then ";
    }
    out += name(order[i]);
  }
  return out;
}

bool before_in(const Plan& order, TaskKind a, TaskKind b) {
  auto ia = std::find(order.begin(), order.end(), a);
  auto ib = std::find(order.begin(), order.end(), b);
  return ia < ib;
}

}  // namespace

const ExperienceRecord* KnowledgeBase::find(const std::vector<Degradation>& combination,
                                            const Plan& order) const {
  const auto key = sorted_degradations(combination);
  for (const auto& r : records) {
    if (r.combination == key && r.order == order) return &r;
  }
  return nullptr;
}

std::vector<ExperienceRecord> aggregate(const std::vector<TrialResult>& trials) {
  struct Counts {
    std::map<TaskKind, std::uint64_t> failures;
    std::uint64_t n = 0;
  };
  std::map<std::pair<std::vector<Degradation>, Plan>, Counts> groups;
  for (const auto& trial : trials) {
    const auto combo = sorted_degradations(trial.combination);
    TaskSet tasks;
    for (auto d : combo) tasks.insert(task_for(d));
    TaskSet flagged;
    for (const auto& [t, ok] : trial.success) flagged.insert(t);
    if (!(flagged == tasks) || !is_permutation_of(trial.order, tasks)) {
      throw Error(ErrorCode::InconsistentTrial,
                  "trial flags/order do not match combination " + DegradationCombination{'?', combo}.label());
    }
    auto& c = groups[{combo, trial.order}];
    ++c.n;
    for (const auto& [t, ok] : trial.success) {
      c.failures[t] += ok ? 0 : 1;
    }
  }
  std::vector<ExperienceRecord> out;
  for (const auto& [key, c] : groups) {
    ExperienceRecord r;
    r.combination = key.first;
    r.order = key.second;
    r.n_trials = c.n;
    double sum = 0.0;
    for (const auto& [t, f] : c.failures) {
      const double rate = static_cast<double>(f) / static_cast<double>(c.n);
      r.per_task_fail[t] = rate;
      sum += rate;
    }
    r.total_fail = sum / static_cast<double>(r.per_task_fail.size());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PrecedenceRule> distill(const std::vector<ExperienceRecord>& records, double tie_epsilon) {
  // Signed margin per (combination, pair): positive means the first task should go first.
  struct PairEvidence {
    double signed_sum = 0.0;
    std::vector<std::vector<Degradation>> support;
  };
  std::map<std::pair<TaskKind, TaskKind>, PairEvidence> evidence;

  std::map<std::vector<Degradation>, std::vector<const ExperienceRecord*>> by_combo;
  for (const auto& r : records) by_combo[r.combination].push_back(&r);

  for (const auto& [combo, recs] : by_combo) {
    std::vector<TaskKind> tasks;
    for (auto d : combo) tasks.push_back(task_for(d));
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (std::size_t j = i + 1; j < tasks.size(); ++j) {
        const TaskKind a = tasks[i];
        const TaskKind b = tasks[j];
        double sum_ab = 0.0, sum_ba = 0.0;
        int n_ab = 0, n_ba = 0;
        for (const auto* r : recs) {
          if (before_in(r->order, a, b)) {
            sum_ab += r->total_fail;
            ++n_ab;
          } else {
            sum_ba += r->total_fail;
            ++n_ba;
          }
        }
        if (n_ab == 0 || n_ba == 0) continue;
        auto& ev = evidence[{a, b}];
        ev.signed_sum += sum_ba / n_ba - sum_ab / n_ab;
        ev.support.push_back(combo);
      }
    }
  }

  std::vector<PrecedenceRule> rules;
  for (const auto& [pair, ev] : evidence) {
    const double diff = ev.signed_sum / static_cast<double>(ev.support.size());
    PrecedenceRule rule{pair.first, pair.second, std::abs(diff), false, ev.support};
    if (std::abs(diff) < tie_epsilon) {
      rule.indifferent = true;
      rule.margin = 0.0;
      if (task_name_less(rule.after, rule.before)) std::swap(rule.before, rule.after);
    } else if (diff < 0.0) {
      std::swap(rule.before, rule.after);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

Retrieval retrieve(const KnowledgeBase& kb, const Agenda& agenda) {
  Retrieval out;
  for (const auto& rule : kb.rules) {
    if (agenda.contains(rule.before) && agenda.contains(rule.after)) out.rules.push_back(rule);
  }
  for (const auto& r : kb.records) {
    TaskSet tasks;
    for (auto d : r.combination) tasks.insert(task_for(d));
    if (tasks == agenda) out.records.push_back(r);
  }
  return out;
}

int display_percent(double fraction) {
  const double x = fraction * 100.0;
  const double lower = std::floor(x);
  if (std::abs(x - lower - 0.5) < 1e-9) return static_cast<int>(lower);
  return static_cast<int>(std::lround(x));
}

std::vector<std::string> describe_experience(const std::vector<ExperienceRecord>& records) {
  std::map<std::string, std::vector<const ExperienceRecord*>> by_label;
  for (const auto& r : records) by_label[combination_label(r.combination)].push_back(&r);

  std::vector<std::string> out;
  for (auto& [label, recs] : by_label) {
    std::stable_sort(recs.begin(), recs.end(), [](const ExperienceRecord* a, const ExperienceRecord* b) {
      if (a->total_fail != b->total_fail) return a->total_fail < b->total_fail;
      return plan_name_less(a->order, b->order);
    });
    const auto shown = display_order(recs.front()->combination);
    std::ostringstream s;
    s << "To address " << label << " in the image, ";
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = *recs[i];
      if (i) s << "; ";
      s << "when conducting " << order_phrase(r.order) << ", the fail rates of addressing [";
      for (std::size_t k = 0; k < shown.size(); ++k) s << (k ? ", " : "") << "'" << name(shown[k]) << "'";
      s << "] are [";
      for (std::size_t k = 0; k < shown.size(); ++k) {
        auto it = r.per_task_fail.find(task_for(shown[k]));
        const double f = it == r.per_task_fail.end() ? 0.0 : it->second;
        s << (k ? ", " : "") << "'" << display_percent(f) << "%'";
      }
      s << "] respectively, and the total fail rate is " << display_percent(r.total_fail) << "%";
    }
    s << ".";
    out.push_back(s.str());
  }
  return out;
}

std::string experience_text(const std::vector<ExperienceRecord>& records) {
  std::string out;
  for (const auto& line : describe_experience(records)) out += line + "\n";
  return out;
}

std::vector<ExperienceRecord> records_from_calibration(std::uint64_t n_trials) {
  std::vector<ExperienceRecord> out;
  for (const auto& row : paper_calibration().rows) {
    ExperienceRecord r;
    r.combination = row.combination;
    r.order = row.order;
    r.n_trials = n_trials;
    double sum = 0.0;
    for (const auto& [d, p] : row.fail) {
      r.per_task_fail[task_for(d)] = p;
      sum += p;
    }
    r.total_fail = sum / static_cast<double>(row.fail.size());
    out.push_back(std::move(r));
  }
  return out;
}

KnowledgeBase paper_knowledge_base() {
  KnowledgeBase kb;
  kb.records = records_from_calibration(1000);
  kb.rules = distill(kb.records);
  kb.provenance = "group-A self-exploration statistics (published fail rates)\n" + experience_text(kb.records);
  return kb;
}

json kb_to_json(const KnowledgeBase& kb) {
  json records = json::array();
  for (const auto& r : kb.records) {
    json fail = json::object();
    for (const auto& [t, f] : r.per_task_fail) fail[std::string(name(t))] = f;
    records.push_back({{"combination", detail::degradations_json(r.combination)},
                       {"order", detail::plan_json(r.order)},
                       {"per_task_fail", fail},
                       {"total_fail", r.total_fail},
                       {"n_trials", r.n_trials}});
  }
  json rules = json::array();
  for (const auto& rule : kb.rules) {
    json support = json::array();
    for (const auto& c : rule.support) support.push_back(detail::degradations_json(c));
    rules.push_back({{"before", std::string(name(rule.before))},
                     {"after", std::string(name(rule.after))},
                     {"margin", rule.margin},
                     {"indifferent", rule.indifferent},
                     {"support", support}});
  }
  return json{{"version", kb.version}, {"records", records}, {"rules", rules}, {"provenance", kb.provenance}};
}

KnowledgeBase kb_from_json(const json& doc) {
  using namespace detail;
  const std::string root = "$";
  KnowledgeBase kb;
  if (!doc.is_object()) schema_error(root, "expected object");
  kb.version = static_cast<int>(as_int(field(doc, "version", root), join(root, "version")));
  if (kb.version != 1) schema_error(join(root, "version"), "unsupported version");

  const auto rpath = join(root, "records");
  const auto& records = as_array(field(doc, "records", root), rpath);
  std::set<std::pair<std::vector<Degradation>, Plan>> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto p = join(rpath, i);
    const auto& j = records[i];
    ExperienceRecord r;
    r.combination = sorted_degradations(as_degradations(field(j, "combination", p), join(p, "combination")));
    r.order = as_plan(field(j, "order", p), join(p, "order"));
    TaskSet tasks;
    for (auto d : r.combination) tasks.insert(task_for(d));
    if (!is_permutation_of(r.order, tasks)) schema_error(join(p, "order"), "not a permutation of the combination");
    const auto fpath = join(p, "per_task_fail");
    const auto& fail = field(j, "per_task_fail", p);
    if (!fail.is_object()) schema_error(fpath, "expected object");
    for (auto it = fail.begin(); it != fail.end(); ++it) {
      const auto fp = join(fpath, it.key());
      auto t = try_parse_task(it.key());
      if (!t || !tasks.contains(*t)) schema_error(fp, "task not in combination");
      r.per_task_fail[*t] = as_probability(it.value(), fp);
    }
    if (r.per_task_fail.size() != tasks.size()) schema_error(fpath, "missing tasks");
    r.total_fail = as_probability(field(j, "total_fail", p), join(p, "total_fail"));
    r.n_trials = as_u64(field(j, "n_trials", p), join(p, "n_trials"));
    if (r.n_trials == 0) schema_error(join(p, "n_trials"), "must be positive");
    if (!seen.insert({r.combination, r.order}).second) schema_error(p, "duplicate (combination, order)");
    kb.records.push_back(std::move(r));
  }

  const auto rupath = join(root, "rules");
  const auto& rules = as_array(field(doc, "rules", root), rupath);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto p = join(rupath, i);
    const auto& j = rules[i];
    PrecedenceRule rule{as_task(field(j, "before", p), join(p, "before")),
                        as_task(field(j, "after", p), join(p, "after")),
                        as_probability(field(j, "margin", p), join(p, "margin")),
                        as_bool(field(j, "indifferent", p), join(p, "indifferent")),
                        {}};
    const auto spath = join(p, "support");
    const auto& support = as_array(field(j, "support", p), spath);
    for (std::size_t k = 0; k < support.size(); ++k) {
      rule.support.push_back(sorted_degradations(as_degradations(support[k], join(spath, k))));
    }
    kb.rules.push_back(std::move(rule));
  }
  kb.provenance = as_string(field(doc, "provenance", root), join(root, "provenance"));
  return kb;
}

std::string kb_to_string(const KnowledgeBase& kb) { return kb_to_json(kb).dump(2) + "\n"; }

void save_kb(const KnowledgeBase& kb, const std::string& path) { detail::write_file(path, kb_to_string(kb)); }

KnowledgeBase load_kb(const std::string& path) { return kb_from_json(detail::load_json_file(path)); }

}  // namespace agentir
