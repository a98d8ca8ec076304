#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "agentir/core.hpp"
#include "agentir/knowledge.hpp"
#include "agentir/perception.hpp"
#include "agentir/scheduling.hpp"

namespace agentir {

struct BridgeConfig {
  std::string endpoint;  // http://host:port/path; falls back to AGENT_BRIDGE_URL
  double timeout_seconds = 30.0;
  int max_retries = 2;
  std::string replay_file;  // when set, no network connection is ever opened
};

// Completion backend: prompt (plus optional image reference) in, text out.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const std::string& prompt, const std::string& image_ref) = 0;
};

// POST {"prompt": ..., "image": ...} -> {"text": ...}
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string endpoint, double timeout_seconds);
  std::string complete(const std::string& prompt, const std::string& image_ref) override;

 private:
  std::string base_;
  std::string path_;
  double timeout_;
};

// Canned responses keyed by replay_key(prompt, image_ref). An entry holding a list of
// texts answers successive calls in order and then repeats its last text.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(const nlohmann::json& doc);
  static std::unique_ptr<ReplayTransport> from_file(const std::string& path);
  std::string complete(const std::string& prompt, const std::string& image_ref) override;
  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::vector<std::string>> entries_;
  std::map<std::uint64_t, std::size_t> served_;
  std::size_t calls_ = 0;
};

std::uint64_t replay_key(const std::string& prompt, const std::string& image_ref = "");
std::string replay_key_hex(const std::string& prompt, const std::string& image_ref = "");

// Replay file when configured, otherwise HTTP. Throws InvalidArgument with neither.
std::unique_ptr<Transport> make_transport(const BridgeConfig& cfg);

// "['rain', 'haze']"
std::string format_list(const std::vector<std::string>& items);
std::string schedule_prompt(const std::vector<Degradation>& degradations, const Plan& agenda,
                            const std::string& experience, const TaskSet& failed_tries);
std::string assess_prompt(Degradation d);

// Parses {"thought": ..., "order": [...]} (optionally wrapped in prose or code fences).
// Throws MalformedResponse or InvalidPermutation.
Plan parse_schedule_response(const std::string& text, const TaskSet& agenda, const TaskSet& failed_tries,
                             std::string* thought = nullptr);
Severity parse_severity_response(const std::string& text);

Plan remote_schedule(Transport& transport, int max_retries, const std::vector<Degradation>& degradations,
                     const Plan& agenda, const std::string& experience, const TaskSet& failed_tries,
                     std::string* thought = nullptr);
Severity remote_assess(Transport& transport, const std::string& image_ref, Degradation d);

class RemoteScheduler final : public Scheduler {
 public:
  RemoteScheduler(std::shared_ptr<Transport> transport, int max_retries);
  Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase* kb, const TaskSet& banned_first,
                Substream stream) const override;
  std::string label() const override { return "remote"; }
  std::vector<std::string> thoughts() const;

 private:
  std::shared_ptr<Transport> transport_;
  int max_retries_;
  mutable std::mutex mu_;
  mutable std::vector<std::string> thoughts_;
};

class RemoteEvaluator final : public Evaluator {
 public:
  explicit RemoteEvaluator(std::shared_ptr<Transport> transport);
  Severity assess(const DegradationProfile& profile, Degradation d, Substream stream) const override;
  static std::string image_ref(const DegradationProfile& profile);

 private:
  std::shared_ptr<Transport> transport_;
};

}  // namespace agentir
