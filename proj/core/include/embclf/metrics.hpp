#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace embclf {

inline constexpr double kDecisionThreshold = 0.5;

struct Prediction {
  std::uint64_t id = 0;
  double score = 0.5;
  std::uint8_t hard_label = 1;  // score >= 0.5

  static Prediction from_score(std::uint64_t id, double score) {
    return {id, score, static_cast<std::uint8_t>(score >= kDecisionThreshold ? 1 : 0)};
  }
};

struct LabeledId {
  std::uint64_t id = 0;
  std::uint8_t label = 0;
};

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::uint64_t total() const { return tp + fp + tn + fn; }
};

// Positive class is label 1. auroc is nullopt when only one class is
// present.
struct MetricReport {
  std::optional<double> auroc;
  double accuracy = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
};

// Tie-aware AUROC from average ranks: the probability that a random
// positive outscores a random negative, ties counting one half. nullopt if
// either class is absent.
std::optional<double> auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Metrics of `preds` against `truth`, matched position by position. Throws
// ValidationError if lengths or ids disagree.
MetricReport evaluate(std::span<const Prediction> preds, std::span<const LabeledId> truth);

// "auroc=...\naccuracy=...\n..." with full precision; undefined AUROC
// prints as "undefined".
std::string format_report_kv(const MetricReport& report, const std::string& prefix = {});

// Fixed-width table, one row per (name, report).
std::string format_report_table(std::span<const std::pair<std::string, MetricReport>> rows);

// "id,score,hard_label" lines with a header.
std::string format_predictions_csv(std::span<const Prediction> preds);

}  // namespace embclf
