#pragma once

#include <array>
#include <memory>
#include <vector>

#include <json.hpp>

#include "agentir/core.hpp"
#include "agentir/rng.hpp"

namespace agentir {

// Severity assessment of one degradation. Implementations must be stateless:
// the same (profile, degradation, stream) always yields the same answer.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Severity assess(const DegradationProfile& profile, Degradation d, Substream stream) const = 0;
};

// Reads the stored severity.
class PerfectOracle final : public Evaluator {
 public:
  Severity assess(const DegradationProfile& profile, Degradation d, Substream) const override {
    return profile.severity(d);
  }
};

struct NoiseParams {
  double p_miss = 0.0;   // non-VeryLow level reported one level lower
  double p_false = 0.0;  // absent (<= Low) level reported as Medium
  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct NoiseModel {
  std::array<NoiseParams, kNumDegradations> params{};

  NoiseParams& operator[](Degradation d) { return params[index_of(d)]; }
  const NoiseParams& operator[](Degradation d) const { return params[index_of(d)]; }
  void validate() const;

  // Solves for (p_miss, p_false) hitting a target precision/recall on a population
  // where `prevalence` of assessments are present and `medium_share` of the present
  // ones sit exactly at Medium. Throws InvalidArgument when unattainable.
  static NoiseParams from_targets(double precision, double recall, double prevalence,
                                  double medium_share);
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

// Reference population assumptions used to turn the published precision/recall
// table into a noise model.
inline constexpr double kPaperPrevalence = 0.3;
inline constexpr double kPaperMediumShare = 0.6;

struct PresenceMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
// Published evaluator quality per degradation; low resolution is read off the image size.
PresenceMetrics paper_evaluator_metrics(Degradation d);
NoiseModel paper_noise_model();

class NoisyOracle final : public Evaluator {
 public:
  explicit NoisyOracle(NoiseModel model);
  Severity assess(const DegradationProfile& profile, Degradation d, Substream stream) const override;
  const NoiseModel& model() const { return model_; }

 private:
  NoiseModel model_;
};

// Agenda of tasks whose degradation is assessed at or above Medium.
Agenda evaluate_agenda(const Evaluator& ev, const DegradationProfile& profile, Substream stream);
Severity reflect(const Evaluator& ev, const DegradationProfile& profile, TaskKind task, Substream stream);

struct PresencePrediction {
  Degradation degradation;
  bool predicted_present;
  bool truly_present;
};

struct ClassificationMetrics {
  Degradation degradation;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // no predicted positives; reported as 0
};

// Per-degradation binary metrics, in canonical degradation order, for every
// degradation that has at least one instance. Throws EmptyInput.
std::vector<ClassificationMetrics> classification_metrics(const std::vector<PresencePrediction>& predictions);

// Builds an evaluator from a config block: {"kind": "perfect"|"noisy"|"paper",
// "noise": {"<degradation>": {"p_miss":..,"p_false":..}}}. A null block is perfect.
std::shared_ptr<const Evaluator> evaluator_from_json(const nlohmann::json& block);

}  // namespace agentir
