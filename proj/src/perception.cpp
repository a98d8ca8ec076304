#include "agentir/perception.hpp"

#include <algorithm>
#include <map>

#include "json_util.hpp"

namespace agentir {

void NoiseModel::validate() const {
  for (const auto& p : params) {
    if (!(p.p_miss >= 0.0 && p.p_miss <= 1.0) || !(p.p_false >= 0.0 && p.p_false <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "noise probabilities must lie in [0,1]");
    }
  }
}

NoiseParams NoiseModel::from_targets(double precision, double recall, double prevalence,
                                     double medium_share) {
  if (!(precision > 0.0 && precision <= 1.0) || !(recall > 0.0 && recall <= 1.0) ||
      !(prevalence > 0.0 && prevalence < 1.0) || !(medium_share > 0.0 && medium_share <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "calibration targets out of range");
  }
  // Only a Medium instance can drop below the presence threshold after one miss.
  NoiseParams p;
  p.p_miss = (1.0 - recall) / medium_share;
  const double tp = prevalence * recall;
  const double fp = tp * (1.0 - precision) / precision;
  p.p_false = fp / (1.0 - prevalence);
  if (p.p_miss > 1.0 || p.p_false > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "precision/recall targets unattainable for this population");
  }
  return p;
}

PresenceMetrics paper_evaluator_metrics(Degradation d) {
  switch (d) {
    case Degradation::Noise: return {0.99, 0.92, 0.95};
    case Degradation::MotionBlur: return {0.88, 0.52, 0.65};
    case Degradation::DefocusBlur: return {0.82, 0.65, 0.72};
    case Degradation::JpegArtifact: return {0.98, 1.00, 0.99};
    case Degradation::Rain: return {0.97, 0.98, 0.98};
    case Degradation::Haze: return {0.88, 0.91, 0.89};
    case Degradation::LowLight: return {0.87, 0.65, 0.74};
    case Degradation::LowResolution: return {1.0, 1.0, 1.0};
  }
  return {1.0, 1.0, 1.0};
}

NoiseModel paper_noise_model() {
  NoiseModel model;
  for (auto d : kAllDegradations) {
    if (d == Degradation::LowResolution) continue;
    const auto m = paper_evaluator_metrics(d);
    model[d] = NoiseModel::from_targets(m.precision, m.recall, kPaperPrevalence, kPaperMediumShare);
  }
  return model;
}

NoisyOracle::NoisyOracle(NoiseModel model) : model_(model) { model_.validate(); }

Severity NoisyOracle::assess(const DegradationProfile& profile, Degradation d, Substream stream) const {
  const Severity truth = profile.severity(d);
  const NoiseParams& p = model_[d];
  Rng rng = stream.child(profile.fingerprint()).child(index_of(d)).rng();
  const double u_false = rng.uniform();
  const double u_miss = rng.uniform();
  if (!is_present(truth) && u_false < p.p_false) return Severity::Medium;
  if (truth != Severity::VeryLow && u_miss < p.p_miss) return predecessor(truth);
  return truth;
}

Agenda evaluate_agenda(const Evaluator& ev, const DegradationProfile& profile, Substream stream) {
  Agenda agenda;
  for (auto d : kAllDegradations) {
    if (is_present(ev.assess(profile, d, stream))) agenda.insert(task_for(d));
  }
  return agenda;
}

Severity reflect(const Evaluator& ev, const DegradationProfile& profile, TaskKind task, Substream stream) {
  return ev.assess(profile, degradation_for(task), stream);
}

std::vector<ClassificationMetrics> classification_metrics(const std::vector<PresencePrediction>& predictions) {
  if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
  std::map<Degradation, ClassificationMetrics> by;
  for (const auto& p : predictions) {
    auto& m = by.try_emplace(p.degradation, ClassificationMetrics{p.degradation}).first->second;
    if (p.predicted_present && p.truly_present) ++m.true_positives;
    else if (p.predicted_present) ++m.false_positives;
    else if (p.truly_present) ++m.false_negatives;
    else ++m.true_negatives;
  }
  std::vector<ClassificationMetrics> out;
  for (auto& [d, m] : by) {
    const auto predicted = m.true_positives + m.false_positives;
    const auto actual = m.true_positives + m.false_negatives;
    m.precision_undefined = predicted == 0;
    m.precision = predicted ? static_cast<double>(m.true_positives) / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? static_cast<double>(m.true_positives) / static_cast<double>(actual) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    out.push_back(m);
  }
  return out;
}

std::shared_ptr<const Evaluator> evaluator_from_json(const nlohmann::json& block) {
  using namespace detail;
  const std::string path = "$.evaluator";
  if (block.is_null()) return std::make_shared<PerfectOracle>();
  const std::string kind = block.is_string() ? block.get<std::string>()
                                             : as_string(field(block, "kind", path), join(path, "kind"));
  if (kind == "perfect") return std::make_shared<PerfectOracle>();
  if (kind == "paper") return std::make_shared<NoisyOracle>(paper_noise_model());
  if (kind != "noisy") schema_error(join(path, "kind"), "expected perfect, noisy or paper");
  NoiseModel model;
  if (const auto* noise = block.is_object() ? optional_field(block, "noise", path) : nullptr) {
    const auto npath = join(path, "noise");
    if (!noise->is_object()) schema_error(npath, "expected object");
    for (auto it = noise->begin(); it != noise->end(); ++it) {
      const auto p = join(npath, it.key());
      auto d = try_parse_degradation(it.key());
      if (!d) schema_error(p, "unknown degradation");
      if (const auto* m = optional_field(it.value(), "p_miss", p)) model[*d].p_miss = as_probability(*m, join(p, "p_miss"));
      if (const auto* f = optional_field(it.value(), "p_false", p)) model[*d].p_false = as_probability(*f, join(p, "p_false"));
    }
  }
  return std::make_shared<NoisyOracle>(model);
}

}  // namespace agentir
