#include <doctest.h>

#include <algorithm>
#include <set>

#include "agentir/core.hpp"
#include "agentir/rng.hpp"

using namespace agentir;

TEST_CASE("task_for is a bijection with the canonical names") {
  CHECK(task_for(Degradation::Rain) == TaskKind::Deraining);
  CHECK(task_for(Degradation::LowResolution) == TaskKind::SuperResolution);
  CHECK(task_for(Degradation::JpegArtifact) == TaskKind::JpegArtifactRemoval);
  std::set<std::string_view> names;
  for (auto d : kAllDegradations) {
    const TaskKind t = task_for(d);
    CHECK(degradation_for(t) == d);
    CHECK(task_for(degradation_for(t)) == t);
    names.insert(name(t));
    CHECK(parse_task(name(t)) == t);
    CHECK(parse_degradation(name(d)) == d);
  }
  CHECK(names.size() == 8);
  CHECK(name(TaskKind::JpegArtifactRemoval) == "jpeg compression artifact removal");
  CHECK(parse_degradation("Low-Light") == Degradation::LowLight);
  CHECK(parse_task("jpeg_artifact_removal") == TaskKind::JpegArtifactRemoval);
  CHECK_THROWS_AS(parse_task("sharpening"), Error);
  CHECK_FALSE(try_parse_degradation("fog").has_value());
}

TEST_CASE("severity order is total and saturating") {
  CHECK(Severity::VeryLow < Severity::VeryHigh);
  for (int a = 0; a < 5; ++a) {
    const auto s = severity_from_level(a);
    CHECK_FALSE(s < s);
    CHECK(parse_severity(name(s)) == s);
  }
  CHECK(successor(Severity::VeryHigh) == Severity::VeryHigh);
  CHECK(predecessor(Severity::VeryLow) == Severity::VeryLow);
  CHECK(successor(Severity::Low) == Severity::Medium);
  CHECK(is_present(Severity::Medium));
  CHECK_FALSE(is_present(Severity::Low));
}

TEST_CASE("builtin combinations follow the published table") {
  const auto& all = builtin_combinations();
  REQUIRE(all.size() == 16);
  CHECK(combinations_in_group('A').size() == 8);
  CHECK(combinations_in_group('B').size() == 4);
  CHECK(combinations_in_group('C').size() == 4);
  for (const auto& c : all) CHECK(c.degradations.size() == (c.group == 'C' ? 3u : 2u));

  auto has = [](char g, std::vector<Degradation> ds) {
    for (const auto& c : combinations_in_group(g)) {
      if (sorted_degradations(c.degradations) == sorted_degradations(ds)) return true;
    }
    return false;
  };
  CHECK(has('A', {Degradation::Rain, Degradation::Haze}));
  CHECK(has('A', {Degradation::DefocusBlur, Degradation::JpegArtifact}));
  CHECK(has('B', {Degradation::MotionBlur, Degradation::JpegArtifact}));
  CHECK(has('B', {Degradation::Haze, Degradation::Noise}));
  CHECK(has('C', {Degradation::Haze, Degradation::MotionBlur, Degradation::LowResolution}));

  auto rh = find_combination("haze+rain");
  REQUIRE(rh.has_value());
  CHECK(rh->group == 'A');
  CHECK_FALSE(find_combination("rain+fog").has_value());
}

TEST_CASE("task sets iterate canonically and compare as sets") {
  TaskSet s{TaskKind::Dehazing, TaskKind::Deraining};
  CHECK(s.size() == 2);
  CHECK(s.tasks() == Plan{TaskKind::Deraining, TaskKind::Dehazing});
  CHECK(s == TaskSet::of(Plan{TaskKind::Deraining, TaskKind::Dehazing}));
  CHECK(TaskSet{TaskKind::Dehazing}.is_subset_of(s));
  CHECK(is_permutation_of({TaskKind::Dehazing, TaskKind::Deraining}, s));
  CHECK_FALSE(is_permutation_of({TaskKind::Dehazing, TaskKind::Dehazing}, s));
  CHECK_FALSE(is_permutation_of({TaskKind::Dehazing}, s));
  s.erase(TaskKind::Dehazing);
  CHECK(s.tasks() == Plan{TaskKind::Deraining});
}

TEST_CASE("profiles are value types") {
  Rng rng(7);
  for (int iter = 0; iter < 10000; ++iter) {
    DegradationProfile original("o" + std::to_string(iter % 5));
    for (auto d : kAllDegradations) original.set_severity(d, severity_from_level(static_cast<int>(rng.below(5))));
    if (rng.bernoulli(0.5)) original.append_history(TaskKind::Denoising, "t");
    const DegradationProfile snapshot = original;
    DegradationProfile copy = original;
    const auto d = kAllDegradations[rng.below(8)];
    copy.set_severity(d, successor(copy.severity(d)) == copy.severity(d) ? Severity::VeryLow
                                                                          : successor(copy.severity(d)));
    copy.append_history(TaskKind::Dehazing, "x");
    copy.set_origin("elsewhere");
    REQUIRE(original == snapshot);
    REQUIRE(original.fingerprint() == snapshot.fingerprint());
    REQUIRE(copy.fingerprint() != original.fingerprint());
  }
}

TEST_CASE("present degradations use the Medium threshold") {
  DegradationProfile p;
  CHECK(p.clean());
  p.set_severity(Degradation::Rain, Severity::High);
  p.set_severity(Degradation::Haze, Severity::Low);
  CHECK(p.present_degradations() == std::vector<Degradation>{Degradation::Rain});
  p.append_history(TaskKind::Deraining, "a");
  p.append_history(TaskKind::Dehazing, "b");
  p.append_history(TaskKind::Deraining, "c");
  CHECK(p.distinct_task_history() == Plan{TaskKind::Deraining, TaskKind::Dehazing});
}

TEST_CASE("substreams are independent of usage order") {
  const auto root = Substream::root(42);
  const double a1 = root.child(1).uniform();
  const double b1 = root.child(2).uniform();
  const double b2 = root.child(2).uniform();
  const double a2 = root.child(1).uniform();
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  CHECK(a1 != b1);
  CHECK(root.child("x").key() == root.child("x").key());
  CHECK(root.child(1, 2).key() == root.child(1).child(2).key());

  Rng rng(3);
  std::array<int, 6> counts{};
  for (int i = 0; i < 60000; ++i) ++counts[rng.below(6)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);  // ~4.4 sigma
  std::vector<int> v{1, 2, 3, 4, 5};
  rng.shuffle(v);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5});
}
