#include <doctest.h>

#include <cmath>

#include "agentir/perception.hpp"
#include "stats.hpp"

using namespace agentir;

namespace {

NoisyOracle forced(Degradation d, double p_miss, double p_false) {
  NoiseModel m;
  m[d] = {p_miss, p_false};
  return NoisyOracle(m);
}

std::vector<PresencePrediction> confusion(Degradation d, std::size_t tp, std::size_t fn, std::size_t fp,
                                          std::size_t tn = 0) {
  std::vector<PresencePrediction> out;
  for (std::size_t i = 0; i < tp; ++i) out.push_back({d, true, true});
  for (std::size_t i = 0; i < fn; ++i) out.push_back({d, false, true});
  for (std::size_t i = 0; i < fp; ++i) out.push_back({d, true, false});
  for (std::size_t i = 0; i < tn; ++i) out.push_back({d, false, false});
  return out;
}

}  // namespace

TEST_CASE("agenda follows the presence threshold") {
  const PerfectOracle ev;
  DegradationProfile p("a");
  p.set_severity(Degradation::Rain, Severity::High);
  p.set_severity(Degradation::Haze, Severity::Medium);
  p.set_severity(Degradation::Noise, Severity::Low);
  CHECK(evaluate_agenda(ev, p, Substream::root(0)) == TaskSet{TaskKind::Deraining, TaskKind::Dehazing});
  CHECK(evaluate_agenda(ev, DegradationProfile{}, Substream::root(0)).empty());
  const auto noisy = forced(Degradation::Noise, 0.0, 1.0);
  CHECK(evaluate_agenda(noisy, DegradationProfile{}, Substream::root(0)).contains(TaskKind::Denoising));
}

TEST_CASE("reflect reads the task's own degradation") {
  const PerfectOracle ev;
  DegradationProfile p;
  CHECK(reflect(ev, p, TaskKind::Denoising, Substream{}) == Severity::VeryLow);
  p.set_severity(Degradation::Haze, Severity::High);
  CHECK(reflect(ev, p, TaskKind::Dehazing, Substream{}) == Severity::High);
  p.set_severity(Degradation::Noise, Severity::Low);
  CHECK(reflect(forced(Degradation::Noise, 1.0, 0.0), p, TaskKind::Denoising, Substream{}) == Severity::VeryLow);
}

TEST_CASE("noisy assessments are reproducible per stream") {
  const NoisyOracle ev(paper_noise_model());
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    DegradationProfile p("r" + std::to_string(i));
    for (auto d : kAllDegradations) p.set_severity(d, severity_from_level(static_cast<int>(rng.below(5))));
    const auto s = Substream::root(i);
    for (auto d : kAllDegradations) {
      const Severity a = ev.assess(p, d, s);
      REQUIRE(a == ev.assess(p, d, s));
      REQUIRE(std::abs(level(a) - level(p.severity(d))) <= 2);
    }
    REQUIRE(evaluate_agenda(ev, p, s) == evaluate_agenda(ev, p, s));
  }
}

TEST_CASE("a miss moves exactly one level down") {
  const auto ev = forced(Degradation::Haze, 1.0, 0.0);
  for (auto s : kAllSeverities) {
    DegradationProfile p;
    p.set_severity(Degradation::Haze, s);
    CHECK(ev.assess(p, Degradation::Haze, Substream{}) == predecessor(s));
  }
}

TEST_CASE("classification metrics match the published rows") {
  const auto perfect = classification_metrics(confusion(Degradation::Rain, 100, 0, 0));
  REQUIRE(perfect.size() == 1);
  CHECK(perfect[0].precision == 1.0);
  CHECK(perfect[0].recall == 1.0);
  CHECK(perfect[0].f1 == 1.0);

  const auto noise = classification_metrics(confusion(Degradation::Noise, 92, 8, 1));
  REQUIRE(noise.size() == 1);
  CHECK(std::round(noise[0].precision * 100) == 99);
  CHECK(noise[0].recall == doctest::Approx(0.92));
  CHECK(std::round(noise[0].f1 * 100) == 95);

  const auto motion = classification_metrics(confusion(Degradation::MotionBlur, 52, 48, 7));
  CHECK(motion[0].recall == doctest::Approx(0.52));

  const auto none_predicted = classification_metrics(confusion(Degradation::Haze, 0, 10, 0));
  CHECK(none_predicted[0].precision_undefined);
  CHECK(none_predicted[0].precision == 0.0);
  CHECK(none_predicted[0].f1 == 0.0);

  CHECK_THROWS_AS(classification_metrics({}), Error);
}

TEST_CASE("f1 is the harmonic mean of precision and recall") {
  Rng rng(12);
  for (int i = 0; i < 5000; ++i) {
    std::vector<PresencePrediction> preds;
    for (auto d : kAllDegradations) {
      auto part = confusion(d, 1 + rng.below(50), rng.below(50), rng.below(50), rng.below(50));
      preds.insert(preds.end(), part.begin(), part.end());
    }
    for (const auto& m : classification_metrics(preds)) {
      REQUIRE(m.precision >= 0.0);
      REQUIRE(m.precision <= 1.0);
      REQUIRE(m.recall >= 0.0);
      REQUIRE(m.recall <= 1.0);
      REQUIRE(m.f1 >= 0.0);
      REQUIRE(m.f1 <= 1.0);
      REQUIRE(std::abs(m.f1 - 2 * m.precision * m.recall / (m.precision + m.recall)) <= 1e-9);
    }
  }
}

TEST_CASE("calibrated noise reproduces target precision and recall") {
  const auto model = paper_noise_model();
  const NoisyOracle ev(model);
  const std::size_t n = 20000;
  for (auto d : kAllDegradations) {
    CAPTURE(name(d));
    const auto target = paper_evaluator_metrics(d);
    Rng pop = Substream::root(77).child(index_of(d)).rng();
    std::vector<PresencePrediction> preds;
    for (std::size_t i = 0; i < n; ++i) {
      DegradationProfile p("cal" + std::to_string(i));
      Severity s;
      if (pop.uniform() < kPaperPrevalence) {
        s = pop.uniform() < kPaperMediumShare ? Severity::Medium
                                              : (pop.below(2) == 0 ? Severity::High : Severity::VeryHigh);
      } else {
        s = pop.below(2) == 0 ? Severity::VeryLow : Severity::Low;
      }
      p.set_severity(d, s);
      preds.push_back({d, is_present(ev.assess(p, d, Substream::root(5))), is_present(s)});
    }
    const auto m = classification_metrics(preds).at(0);
    CHECK(test::within_sigma(m.true_positives, m.true_positives + m.false_negatives, target.recall, 3.0));
    CHECK(test::within_sigma(m.true_positives, m.true_positives + m.false_positives, target.precision, 3.0));
  }
}

TEST_CASE("unattainable calibration targets are rejected") {
  CHECK_THROWS_AS(NoiseModel::from_targets(0.9, 0.1, 0.3, 0.6), Error);
  CHECK_THROWS_AS(NoiseModel::from_targets(0.0, 0.9, 0.3, 0.6), Error);
  NoiseModel bad;
  bad[Degradation::Rain] = {1.5, 0.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("evaluator config blocks") {
  CHECK(dynamic_cast<const PerfectOracle*>(evaluator_from_json(nullptr).get()) != nullptr);
  const auto paper = evaluator_from_json({{"kind", "paper"}});
  REQUIRE(dynamic_cast<const NoisyOracle*>(paper.get()) != nullptr);
  CHECK(dynamic_cast<const NoisyOracle*>(paper.get())->model() == paper_noise_model());
  const auto custom = evaluator_from_json({{"kind", "noisy"}, {"noise", {{"rain", {{"p_miss", 0.25}, {"p_false", 0.1}}}}}});
  const auto& cm = dynamic_cast<const NoisyOracle*>(custom.get())->model();
  CHECK(cm[Degradation::Rain].p_miss == 0.25);
  CHECK(cm[Degradation::Rain].p_false == 0.1);
  CHECK_THROWS_AS(evaluator_from_json({{"kind", "psychic"}}), Error);
}
