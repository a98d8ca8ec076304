#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "agentir/knowledge.hpp"
#include "agentir/scheduling.hpp"
#include "stats.hpp"

using namespace agentir;
using T = TaskKind;

namespace {

// Returns the presentation order unchanged.
class VerbatimScheduler final : public Scheduler {
 public:
  Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase*, const TaskSet&,
                Substream) const override {
    return presented;
  }
  std::string label() const override { return "verbatim"; }
};

// Ignores the banned set.
class RogueScheduler final : public Scheduler {
 public:
  Plan schedule(const std::vector<TaskKind>& presented, const KnowledgeBase*, const TaskSet&,
                Substream) const override {
    Plan p = presented;
    std::sort(p.begin(), p.end());
    return p;
  }
  std::string label() const override { return "rogue"; }
};

PrecedenceRule rule(T before, T after, double margin) { return {before, after, margin, false, {}}; }

TaskSet random_agenda(Rng& rng, std::size_t max_size) {
  TaskSet s;
  const std::size_t n = 1 + rng.below(max_size);
  while (s.size() < n) s.insert(kAllTasks[rng.below(kAllTasks.size())]);
  return s;
}

}  // namespace

TEST_CASE("experience schedule on the built-in knowledge base") {
  const auto kb = paper_knowledge_base();
  CHECK(experience_schedule({T::Deraining, T::Dehazing}, kb, {}) == Plan{T::Deraining, T::Dehazing});
  CHECK(experience_schedule({T::Denoising, T::JpegArtifactRemoval}, kb, {}) ==
        Plan{T::Denoising, T::JpegArtifactRemoval});
  CHECK(experience_schedule({T::Deraining, T::Dehazing}, kb, {T::Deraining}) == Plan{T::Dehazing, T::Deraining});
  CHECK_THROWS_AS(experience_schedule({T::Deraining}, kb, {T::Deraining}), Error);
  CHECK(experience_schedule({}, kb, {}).empty());
}

TEST_CASE("experience schedule reproduces every preferred pair") {
  const auto kb = paper_knowledge_base();
  const std::vector<Plan> preferred = {
      {T::Denoising, T::Brightening},        {T::DefocusDeblurring, T::Dehazing},
      {T::JpegArtifactRemoval, T::DefocusDeblurring}, {T::MotionDeblurring, T::Brightening},
      {T::MotionDeblurring, T::SuperResolution},      {T::Deraining, T::Dehazing},
      {T::Deraining, T::SuperResolution},
  };
  for (const auto& p : preferred) {
    CAPTURE(plan_to_string(p));
    CHECK(experience_schedule(TaskSet::of(p), kb, {}) == p);
    // Rules alone give the same answer once the exact records are gone.
    KnowledgeBase rules_only = kb;
    rules_only.records.clear();
    CHECK(experience_schedule(TaskSet::of(p), rules_only, {}) == p);
  }
}

TEST_CASE("rules order agendas without exact records") {
  KnowledgeBase kb;
  kb.rules = {rule(T::Deraining, T::Dehazing, 0.03), rule(T::Deraining, T::SuperResolution, 0.1)};
  const auto plan = experience_schedule({T::Dehazing, T::Deraining, T::SuperResolution}, kb, {});
  CHECK(plan.front() == T::Deraining);
  // Leftover freedom goes to the name order ("dehazing" < "super-resolution").
  CHECK(plan == Plan{T::Deraining, T::Dehazing, T::SuperResolution});
  // Without knowledge the lexicographic default applies.
  CHECK(experience_schedule({T::SuperResolution, T::Brightening}, KnowledgeBase{}, {}) ==
        Plan{T::Brightening, T::SuperResolution});
}

TEST_CASE("conflicting rules keep the larger margin and report the drop") {
  KnowledgeBase kb;
  kb.rules = {rule(T::Denoising, T::Dehazing, 0.2), rule(T::Dehazing, T::Deraining, 0.1),
              rule(T::Deraining, T::Denoising, 0.05)};
  std::vector<std::string> warnings;
  const auto plan = experience_schedule({T::Denoising, T::Dehazing, T::Deraining}, kb, {}, &warnings);
  CHECK(plan == Plan{T::Denoising, T::Dehazing, T::Deraining});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("deraining before denoising") != std::string::npos);
}

TEST_CASE("experience schedule ignores presentation order") {
  const auto kb = paper_knowledge_base();
  const ExperienceScheduler sched;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const TaskSet agenda = random_agenda(rng, 4);
    std::vector<TaskKind> presented = agenda.tasks();
    const Plan reference = sched.schedule(presented, &kb, {}, Substream::root(0));
    REQUIRE(is_permutation_of(reference, agenda));
    do {
      REQUIRE(sched.schedule(presented, &kb, {}, Substream::root(static_cast<std::uint64_t>(i))) == reference);
    } while (std::next_permutation(presented.begin(), presented.end()));
  }
}

TEST_CASE("schedules are permutations honouring the banned set") {
  Rng rng(8);
  for (int i = 0; i < 5000; ++i) {
    const TaskSet agenda = random_agenda(rng, 6);
    TaskSet banned;
    for (auto t : agenda.tasks()) {
      if (rng.below(2) == 0) banned.insert(t);
    }
    KnowledgeBase kb;
    for (int k = 0; k < 6; ++k) {
      const T a = kAllTasks[rng.below(8)], b = kAllTasks[rng.below(8)];
      if (a != b) kb.rules.push_back(rule(a, b, rng.uniform()));
    }
    if (agenda.is_subset_of(banned)) {
      REQUIRE_THROWS_AS(experience_schedule(agenda, kb, banned), Error);
      REQUIRE_THROWS_AS(random_schedule(agenda, Substream::root(i), banned), Error);
      continue;
    }
    for (const Plan& p : {experience_schedule(agenda, kb, banned), random_schedule(agenda, Substream::root(i), banned)}) {
      REQUIRE(is_permutation_of(p, agenda));
      REQUIRE_FALSE(banned.contains(p.front()));
    }
  }
}

TEST_CASE("random schedule is uniform and reproducible") {
  CHECK(random_schedule({T::Dehazing}, Substream::root(1)) == Plan{T::Dehazing});
  const TaskSet agenda{T::Deraining, T::Dehazing};
  const std::size_t n = 10000;
  std::size_t derain_first = 0;
  for (std::size_t i = 0; i < n; ++i) {
    derain_first += random_schedule(agenda, Substream::root(3).child(i)).front() == T::Deraining;
  }
  CHECK(test::within_sigma(derain_first, n, 0.5, 3.0));
  CHECK(random_schedule({T::Deraining, T::Dehazing, T::Denoising, T::Brightening}, Substream::root(9)) ==
        random_schedule({T::Deraining, T::Dehazing, T::Denoising, T::Brightening}, Substream::root(9)));
}

TEST_CASE("reschedule avoids failed first attempts") {
  const ExperienceScheduler sched;
  const KnowledgeBase empty;
  CHECK(reschedule(sched, {T::Deraining, T::Dehazing}, {T::Deraining}, &empty, Substream{}) ==
        Plan{T::Dehazing, T::Deraining});

  KnowledgeBase kb;
  kb.rules = {rule(T::Denoising, T::Dehazing, 0.1)};
  // a = brightening, b = denoising, c = dehazing: b must lead once a has failed.
  const auto next = reschedule(sched, {T::Brightening, T::Denoising, T::Dehazing}, {T::Brightening}, &kb, Substream{});
  CHECK(next.front() == T::Denoising);
  CHECK(next == Plan{T::Denoising, T::Brightening, T::Dehazing});

  CHECK_THROWS_AS(reschedule(sched, {T::Deraining, T::Dehazing}, {T::Deraining, T::Dehazing}, &kb, Substream{}),
                  Error);
  CHECK_THROWS_AS(reschedule(sched, {T::Deraining}, {T::Dehazing}, &kb, Substream{}), Error);
  try {
    reschedule(RogueScheduler{}, {T::Deraining, T::Dehazing}, {T::Deraining}, &kb, Substream{});
    FAIL("expected a contract violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Internal);
  }
}

TEST_CASE("entropy and variation ratio") {
  CHECK(entropy_bits({{{T::Deraining}, 10}}) == 0.0);
  CHECK(variation_ratio({{{T::Deraining}, 10}}) == 0.0);
  for (std::size_t k = 1; k <= 24; ++k) {
    PlanCounts counts;
    for (std::size_t i = 0; i < k; ++i) counts[Plan(i + 1, T::Denoising)] = 5;
    CHECK(entropy_bits(counts) == doctest::Approx(std::log2(static_cast<double>(k))).epsilon(1e-12));
    CHECK(variation_ratio(counts) == doctest::Approx(1.0 - 1.0 / static_cast<double>(k)));
  }
}

TEST_CASE("consistency of deterministic, verbatim and random schedulers") {
  const auto kb = paper_knowledge_base();
  const TaskSet pair{T::Deraining, T::Dehazing};

  const auto det = measure_consistency(ExperienceScheduler{}, pair, &kb, 30, Substream::root(0));
  CHECK(det.entropy_bits == 0.0);
  CHECK(det.variation_ratio == 0.0);
  CHECK(det.sensitivity_entropy == 0.0);
  CHECK(det.sensitivity_vr == 0.0);
  CHECK(det.n_presentations == 2);
  CHECK(det.n_samples == 60);

  const auto verbatim = measure_consistency(VerbatimScheduler{}, pair, &kb, 30, Substream::root(0));
  CHECK(verbatim.entropy_bits == doctest::Approx(1.0));
  CHECK(verbatim.sensitivity_entropy == doctest::Approx(1.0));
  CHECK(verbatim.sensitivity_vr == doctest::Approx(0.5));

  const int n = 5000;
  const auto rnd = measure_consistency(RandomScheduler{}, pair, &kb, n, Substream::root(1));
  const std::size_t total = rnd.n_samples;
  const double sigma = test::binomial_sigma(0.5, total);
  CHECK(std::abs(rnd.variation_ratio - 0.5) <= 3 * sigma);
  CHECK(rnd.entropy_bits > 0.999);
  CHECK(std::abs(rnd.sensitivity_vr) <= 6 * test::binomial_sigma(0.5, static_cast<std::size_t>(n)));
  CHECK(std::abs(rnd.sensitivity_entropy) < 0.01);

  const auto triple = measure_consistency(ExperienceScheduler{}, {T::Deraining, T::Dehazing, T::SuperResolution},
                                          &kb, 2, Substream::root(0));
  CHECK(triple.n_presentations == 6);
  CHECK_THROWS_AS(measure_consistency(ExperienceScheduler{}, pair, &kb, 0, Substream{}), Error);
}
