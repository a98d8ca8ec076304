#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "agentir/bridge.hpp"
#include "agentir/knowledge.hpp"

using namespace agentir;
using D = Degradation;
using T = TaskKind;

namespace {

std::string golden(const std::string& file) {
  std::ifstream in(std::string(AGENTIR_TEST_DIR) + "/golden/" + file, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json replay_doc(const std::string& prompt, nlohmann::json texts, const std::string& image = "") {
  nlohmann::json entry = {{"prompt", prompt}};
  if (!image.empty()) entry["image"] = image;
  if (texts.is_array()) entry["texts"] = texts;
  else entry["text"] = texts;
  return {{"entries", {entry}}};
}

const std::string kOrderOk = R"({"thought": "Deraining should be done before dehazing.", "order": ["deraining", "dehazing"]})";

std::string rain_haze_prompt(const TaskSet& failed = {}) {
  return schedule_prompt({D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "No relevant experience.", failed);
}

// Minimal completion server on loopback.
struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

}  // namespace

TEST_CASE("prompts match the golden text byte for byte") {
  CHECK(schedule_prompt({D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "Deraining first worked better.",
                        {T::Deraining}) == golden("schedule_prompt_rain_haze.txt"));
  CHECK(assess_prompt(D::Haze) == golden("assess_prompt_haze.txt"));
  CHECK(rain_haze_prompt().find("Besides") == std::string::npos);
  CHECK(format_list({"a", "b"}) == "['a', 'b']");
  CHECK(format_list({}) == "[]");
}

TEST_CASE("schedule responses are validated") {
  const TaskSet agenda{T::Deraining, T::Dehazing};
  std::string thought;
  CHECK(parse_schedule_response(kOrderOk, agenda, {}, &thought) == Plan{T::Deraining, T::Dehazing});
  CHECK(thought == "Deraining should be done before dehazing.");
  CHECK(parse_schedule_response("```json\n" + kOrderOk + "\n```", agenda, {}) == Plan{T::Deraining, T::Dehazing});

  auto code_of = [&](const std::string& text, const TaskSet& failed) {
    try {
      parse_schedule_response(text, agenda, failed);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code_of("no json here", {}) == ErrorCode::MalformedResponse);
  CHECK(code_of(R"({"thought": "x"})", {}) == ErrorCode::MalformedResponse);
  CHECK(code_of(R"({"order": ["dehazing"]})", {}) == ErrorCode::InvalidPermutation);
  CHECK(code_of(R"({"order": ["dehazing", "dehazing"]})", {}) == ErrorCode::InvalidPermutation);
  CHECK(code_of(R"({"order": ["deraining", "levitation"]})", {}) == ErrorCode::InvalidPermutation);
  CHECK(code_of(kOrderOk, {T::Deraining}) == ErrorCode::InvalidPermutation);
}

TEST_CASE("severity answers") {
  CHECK(parse_severity_response("very low") == Severity::VeryLow);
  CHECK(parse_severity_response("Medium") == Severity::Medium);
  CHECK(parse_severity_response("  \"High.\"\n") == Severity::High);
  CHECK(parse_severity_response("VERY HIGH") == Severity::VeryHigh);
  CHECK_THROWS_AS(parse_severity_response("fairly bad"), Error);
  CHECK_THROWS_AS(parse_severity_response(""), Error);
}

TEST_CASE("replay scheduling") {
  ReplayTransport replay(replay_doc(rain_haze_prompt(), kOrderOk));
  std::string thought;
  CHECK(remote_schedule(replay, 2, {D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "No relevant experience.", {},
                        &thought) == Plan{T::Deraining, T::Dehazing});
  CHECK(replay.calls() == 1);
  CHECK(thought.find("before dehazing") != std::string::npos);

  // Unknown prompts name the key that a fixture would need.
  try {
    replay.complete("unexpected", "");
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Transport);
    CHECK(std::string(e.what()).find(replay_key_hex("unexpected")) != std::string::npos);
  }
}

TEST_CASE("invalid orders are retried, then reported") {
  ReplayTransport bad(replay_doc(rain_haze_prompt(), R"({"thought": "", "order": ["dehazing"]})"));
  try {
    remote_schedule(bad, 2, {D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "No relevant experience.", {});
    FAIL("expected InvalidPermutation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPermutation);
  }
  CHECK(bad.calls() == 3);

  // First answer ignores the failed try, the retry complies.
  const TaskSet failed{T::Deraining};
  ReplayTransport fixed(replay_doc(rain_haze_prompt(failed),
                                   nlohmann::json::array({kOrderOk, R"({"order": ["dehazing", "deraining"]})"})));
  CHECK(remote_schedule(fixed, 2, {D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "No relevant experience.",
                        failed) == Plan{T::Dehazing, T::Deraining});
  CHECK(fixed.calls() == 2);

  ReplayTransport garbage(replay_doc(rain_haze_prompt(), "I would rather not."));
  CHECK_THROWS_AS(
      remote_schedule(garbage, 0, {D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, "No relevant experience.", {}),
      Error);
  CHECK(garbage.calls() == 1);
}

TEST_CASE("remote scheduler and evaluator over replay") {
  const auto kb = paper_knowledge_base();
  std::vector<ExperienceRecord> rh;
  for (const auto& r : retrieve(kb, {T::Deraining, T::Dehazing}).records) rh.push_back(r);
  const std::string prompt =
      schedule_prompt({D::Rain, D::Haze}, {T::Deraining, T::Dehazing}, experience_text(rh), {});
  auto transport = std::make_shared<ReplayTransport>(replay_doc(prompt, kOrderOk));
  const RemoteScheduler sched(transport, 1);
  CHECK(sched.schedule({T::Deraining, T::Dehazing}, &kb, {}, Substream{}) == Plan{T::Deraining, T::Dehazing});
  REQUIRE(sched.thoughts().size() == 1);
  CHECK_THROWS_AS(sched.schedule({T::Deraining}, &kb, {T::Deraining}, Substream{}), Error);

  DegradationProfile p("img-7");
  p.set_severity(D::Haze, Severity::High);
  auto eval_transport = std::make_shared<ReplayTransport>(
      replay_doc(assess_prompt(D::Haze), "Medium", RemoteEvaluator::image_ref(p)));
  const RemoteEvaluator ev(eval_transport);
  CHECK(ev.assess(p, D::Haze, Substream{}) == Severity::Medium);
  CHECK(RemoteEvaluator::image_ref(p).rfind("img-7#", 0) == 0);
}

TEST_CASE("replay configuration never touches the network") {
  const auto path = (std::filesystem::temp_directory_path() / "agentir_replay.json").string();
  {
    std::ofstream out(path);
    out << replay_doc(rain_haze_prompt(), kOrderOk).dump();
  }
  // An endpoint that would fail if contacted.
  BridgeConfig cfg;
  cfg.endpoint = "http://192.0.2.1:9/";
  cfg.timeout_seconds = 0.05;
  cfg.replay_file = path;
  auto t = make_transport(cfg);
  CHECK(dynamic_cast<ReplayTransport*>(t.get()) != nullptr);
  CHECK(t->complete(rain_haze_prompt(), "") == kOrderOk);
  std::filesystem::remove(path);

  BridgeConfig none;
  if (std::getenv("AGENT_BRIDGE_URL") == nullptr) CHECK_THROWS_AS(make_transport(none), Error);
  CHECK_THROWS_AS(HttpTransport("https://example.com", 1.0), Error);
  CHECK_THROWS_AS(ReplayTransport(nlohmann::json{{"entries", {{{"prompt", "p"}}}}}), Error);
}

TEST_CASE("http transport against a loopback server") {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/ok", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const auto body = nlohmann::json::parse(req.body);
    res.set_content(nlohmann::json{{"text", "echo:" + body["prompt"].get<std::string>() +
                                                 (body.contains("image") ? "|" + body["image"].get<std::string>() : "")}}
                         .dump(),
                     "application/json");
  });
  srv.server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  srv.server.Post("/odd", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"answer": "x"})", "application/json");
  });
  srv.server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content(R"({"text": "late"})", "application/json");
  });

  HttpTransport ok(srv.url("/ok"), 5.0);
  CHECK(ok.complete("hello", "") == "echo:hello");
  CHECK(ok.complete("hello", "img#1") == "echo:hello|img#1");
  CHECK(hits == 2);

  auto code_of = [](HttpTransport& t) {
    try {
      t.complete("p", "");
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  HttpTransport broken(srv.url("/broken"), 5.0);
  CHECK(code_of(broken) == ErrorCode::Transport);
  HttpTransport odd(srv.url("/odd"), 5.0);
  CHECK(code_of(odd) == ErrorCode::MalformedResponse);
  HttpTransport slow(srv.url("/slow"), 0.2);
  CHECK(code_of(slow) == ErrorCode::Timeout);
}
