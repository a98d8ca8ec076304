#include "agentir/bridge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdio>

#include <httplib.h>

#include "json_util.hpp"

namespace agentir {

std::uint64_t replay_key(const std::string& prompt, const std::string& image_ref) {
  return hash_string(prompt + "\n" + image_ref);
}

std::string replay_key_hex(const std::string& prompt, const std::string& image_ref) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(replay_key(prompt, image_ref)));
  return buf;
}

HttpTransport::HttpTransport(std::string endpoint, double timeout_seconds) : timeout_(timeout_seconds) {
  const std::string scheme = "http://";
  if (endpoint.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::InvalidArgument, "bridge endpoint must start with http://: " + endpoint);
  }
  if (!(timeout_seconds > 0.0)) throw Error(ErrorCode::InvalidArgument, "bridge timeout must be positive");
  const auto slash = endpoint.find('/', scheme.size());
  base_ = endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
}

std::string HttpTransport::complete(const std::string& prompt, const std::string& image_ref) {
  httplib::Client client(base_);
  const auto sec = static_cast<time_t>(timeout_);
  const auto usec = static_cast<time_t>((timeout_ - std::floor(timeout_)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  nlohmann::json body = {{"prompt", prompt}};
  if (!image_ref.empty()) body["image"] = image_ref;
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = "bridge request to " + base_ + path_ + " failed: " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Error(ErrorCode::Timeout, what);
    }
    throw Error(ErrorCode::Transport, what);
  }
  if (res->status != 200) {
    throw Error(ErrorCode::Transport, "bridge returned HTTP " + std::to_string(res->status));
  }
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
    throw Error(ErrorCode::MalformedResponse, "bridge response lacks a \"text\" string");
  }
  return doc["text"].get<std::string>();
}

ReplayTransport::ReplayTransport(const nlohmann::json& doc) {
  using namespace detail;
  const std::string path = "$";
  const auto& entries = as_array(field(doc, "entries", path), join(path, "entries"));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto epath = join(join(path, "entries"), i);
    const auto& e = entries[i];
    std::uint64_t key = 0;
    if (const auto* k = optional_field(e, "key", epath)) {
      const auto& hex = as_string(*k, join(epath, "key"));
      char* end = nullptr;
      key = std::strtoull(hex.c_str(), &end, 16);
      if (hex.empty() || *end != '\0') schema_error(join(epath, "key"), "expected hexadecimal key");
    } else {
      const auto* img = optional_field(e, "image", epath);
      key = replay_key(as_string(field(e, "prompt", epath), join(epath, "prompt")),
                       img ? as_string(*img, join(epath, "image")) : std::string());
    }
    std::vector<std::string> texts;
    if (const auto* t = optional_field(e, "text", epath)) {
      texts.push_back(as_string(*t, join(epath, "text")));
    } else {
      const auto tpath = join(epath, "texts");
      const auto& arr = as_array(field(e, "texts", epath), tpath);
      for (std::size_t j = 0; j < arr.size(); ++j) texts.push_back(as_string(arr[j], join(tpath, j)));
      if (texts.empty()) schema_error(tpath, "expected at least one text");
    }
    if (!entries_.emplace(key, std::move(texts)).second) schema_error(epath, "duplicate replay entry");
  }
}

std::unique_ptr<ReplayTransport> ReplayTransport::from_file(const std::string& path) {
  return std::make_unique<ReplayTransport>(detail::load_json_file(path));
}

std::string ReplayTransport::complete(const std::string& prompt, const std::string& image_ref) {
  const auto key = replay_key(prompt, image_ref);
  std::lock_guard lock(mu_);
  ++calls_;
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorCode::Transport, "no replay entry for key " + replay_key_hex(prompt, image_ref));
  }
  auto& served = served_[key];
  const auto& texts = it->second;
  const std::string& text = texts[std::min(served, texts.size() - 1)];
  ++served;
  return text;
}

std::size_t ReplayTransport::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::unique_ptr<Transport> make_transport(const BridgeConfig& cfg) {
  if (!cfg.replay_file.empty()) return ReplayTransport::from_file(cfg.replay_file);
  std::string endpoint = cfg.endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("AGENT_BRIDGE_URL")) endpoint = env;
  }
  if (endpoint.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no bridge endpoint: set AGENT_BRIDGE_URL or a replay file");
  }
  return std::make_unique<HttpTransport>(endpoint, cfg.timeout_seconds);
}

std::string format_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", '" : "'") + items[i] + "'";
  return out + "]";
}

namespace {

std::vector<std::string> task_names(const Plan& plan) {
  std::vector<std::string> out;
  for (auto t : plan) out.emplace_back(name(t));
  return out;
}

std::string lower_trim(const std::string& text) {
  auto b = text.find_first_not_of(" \t\r\n\"'`");
  if (b == std::string::npos) return {};
  auto e = text.find_last_not_of(" \t\r\n\"'`.!");
  std::string out = text.substr(b, e - b + 1);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string schedule_prompt(const std::vector<Degradation>& degradations, const Plan& agenda,
                            const std::string& experience, const TaskSet& failed_tries) {
  std::vector<std::string> degs;
  for (auto d : degradations) degs.emplace_back(name(d));
  const std::string agenda_list = format_list(task_names(agenda));
  std::string prompt = "There's an image suffering from degradations " + format_list(degs) +
                       ". We will invoke dedicated tools to address these degradations, i.e., we will conduct "
                       "these tasks: " +
                       agenda_list +
                       ". Now we need to determine the order of these unordered tasks. For your information, based "
                       "on past trials, we have the following experience:\n" +
                       experience +
                       "\nBased on this experience, please give the correct order of the tasks. Your output must be "
                       "a JSON object with two fields: \"thought\" and \"order\", where \"order\" must be a "
                       "permutation of " +
                       agenda_list + " in the order you determine.";
  if (!failed_tries.empty()) {
    Plan failed;
    for (auto t : agenda) {
      if (failed_tries.contains(t)) failed.push_back(t);
    }
    const std::string f = format_list(task_names(failed));
    prompt += "\nBesides, in attempts just now, we found the result is unsatisfactory if " + f +
              " is conducted first. Remember not to arrange " + f + " in the first place.";
  }
  return prompt;
}

std::string assess_prompt(Degradation d) {
  return "What's the severity of " + std::string(name(d)) +
         " in this image? Answer the question using a single word or phrase in the followings: very low, low, "
         "medium, high, very high.";
}

Plan parse_schedule_response(const std::string& text, const TaskSet& agenda, const TaskSet& failed_tries,
                             std::string* thought) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorCode::MalformedResponse, "response holds no JSON object");
  }
  auto doc = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::MalformedResponse, "response JSON is invalid");
  auto order = doc.find("order");
  if (order == doc.end() || !order->is_array()) {
    throw Error(ErrorCode::MalformedResponse, "response lacks an \"order\" array");
  }
  Plan plan;
  for (const auto& item : *order) {
    if (!item.is_string()) throw Error(ErrorCode::MalformedResponse, "order entries must be strings");
    auto t = try_parse_task(item.get<std::string>());
    if (!t) throw Error(ErrorCode::InvalidPermutation, "unknown task '" + item.get<std::string>() + "'");
    plan.push_back(*t);
  }
  if (!is_permutation_of(plan, agenda)) {
    throw Error(ErrorCode::InvalidPermutation, "order " + plan_to_string(plan) + " is not a permutation of the agenda");
  }
  if (failed_tries.contains(plan.front())) {
    throw Error(ErrorCode::InvalidPermutation, "order starts with a failed attempt");
  }
  if (thought) {
    auto th = doc.find("thought");
    *thought = th != doc.end() && th->is_string() ? th->get<std::string>() : std::string();
  }
  return plan;
}

Severity parse_severity_response(const std::string& text) {
  const std::string cleaned = lower_trim(text);
  for (auto s : {Severity::VeryLow, Severity::Low, Severity::Medium, Severity::High, Severity::VeryHigh}) {
    if (cleaned == name(s)) return s;
  }
  throw Error(ErrorCode::MalformedResponse, "unrecognized severity answer '" + text + "'");
}

Plan remote_schedule(Transport& transport, int max_retries, const std::vector<Degradation>& degradations,
                     const Plan& agenda, const std::string& experience, const TaskSet& failed_tries,
                     std::string* thought) {
  if (agenda.empty()) throw Error(ErrorCode::InvalidArgument, "agenda must not be empty");
  const TaskSet tasks = TaskSet::of(agenda);
  const std::string prompt = schedule_prompt(degradations, agenda, experience, failed_tries);
  for (int attempt = 0;; ++attempt) {
    try {
      return parse_schedule_response(transport.complete(prompt, ""), tasks, failed_tries, thought);
    } catch (const Error& e) {
      const bool retryable = e.code() == ErrorCode::MalformedResponse || e.code() == ErrorCode::InvalidPermutation;
      if (!retryable || attempt >= max_retries) throw;
    }
  }
}

Severity remote_assess(Transport& transport, const std::string& image_ref, Degradation d) {
  return parse_severity_response(transport.complete(assess_prompt(d), image_ref));
}

RemoteScheduler::RemoteScheduler(std::shared_ptr<Transport> transport, int max_retries)
    : transport_(std::move(transport)), max_retries_(max_retries) {
  if (!transport_) throw Error(ErrorCode::InvalidArgument, "remote scheduler needs a transport");
  if (max_retries_ < 0) throw Error(ErrorCode::InvalidArgument, "max_retries must be >= 0");
}

Plan RemoteScheduler::schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb,
                               const TaskSet& banned_first, Substream) const {
  const TaskSet agenda = TaskSet::of(presented);
  if (agenda.is_subset_of(banned_first)) {
    throw Error(ErrorCode::Unschedulable, "every task of the agenda is banned from the first position");
  }
  std::vector<Degradation> degradations;
  for (auto t : presented) degradations.push_back(degradation_for(t));
  std::string experience = "No relevant experience.";
  if (kb) {
    const auto found = retrieve(*kb, agenda);
    if (!found.records.empty()) experience = experience_text(found.records);
  }
  std::string thought;
  Plan plan = remote_schedule(*transport_, max_retries_, degradations, presented, experience, banned_first, &thought);
  std::lock_guard lock(mu_);
  thoughts_.push_back(std::move(thought));
  return plan;
}

std::vector<std::string> RemoteScheduler::thoughts() const {
  std::lock_guard lock(mu_);
  return thoughts_;
}

RemoteEvaluator::RemoteEvaluator(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {
  if (!transport_) throw Error(ErrorCode::InvalidArgument, "remote evaluator needs a transport");
}

std::string RemoteEvaluator::image_ref(const DegradationProfile& profile) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(profile.fingerprint()));
  return profile.origin() + "#" + buf;
}

Severity RemoteEvaluator::assess(const DegradationProfile& profile, Degradation d, Substream) const {
  return remote_assess(*transport_, image_ref(profile), d);
}

}  // namespace agentir
