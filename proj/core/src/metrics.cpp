#include "embclf/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "embclf/error.hpp"

namespace embclf {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::optional<double> auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ValidationError("auroc: score and label counts differ");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(negatives));
}

MetricReport evaluate(std::span<const Prediction> preds, std::span<const LabeledId> truth) {
  if (preds.size() != truth.size()) {
    throw ValidationError("evaluate: " + std::to_string(preds.size()) + " predictions for " +
                          std::to_string(truth.size()) + " labels");
  }
  MetricReport r;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(preds.size());
  labels.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].id != truth[i].id) {
      throw ValidationError("evaluate: prediction id " + std::to_string(preds[i].id) + " does not match label id " +
                            std::to_string(truth[i].id) + " at position " + std::to_string(i));
    }
    const bool predicted = preds[i].hard_label == 1;
    const bool actual = truth[i].label == 1;
    if (predicted && actual) ++r.counts.tp;
    else if (predicted) ++r.counts.fp;
    else if (actual) ++r.counts.fn;
    else ++r.counts.tn;
    scores.push_back(preds[i].score);
    labels.push_back(truth[i].label);
  }
  const auto total = r.counts.total();
  r.accuracy = total ? static_cast<double>(r.counts.tp + r.counts.tn) / static_cast<double>(total) : 0.0;
  const auto f1_den = 2 * r.counts.tp + r.counts.fp + r.counts.fn;
  r.f1 = f1_den ? 2.0 * static_cast<double>(r.counts.tp) / static_cast<double>(f1_den) : 0.0;
  r.auroc = auroc(scores, labels);
  return r;
}

std::string format_report_kv(const MetricReport& r, const std::string& prefix) {
  std::string s;
  s += prefix + "auroc=" + (r.auroc ? fmt_double(*r.auroc) : std::string("undefined")) + "\n";
  s += prefix + "accuracy=" + fmt_double(r.accuracy) + "\n";
  s += prefix + "f1=" + fmt_double(r.f1) + "\n";
  s += prefix + "tp=" + std::to_string(r.counts.tp) + "\n";
  s += prefix + "fp=" + std::to_string(r.counts.fp) + "\n";
  s += prefix + "tn=" + std::to_string(r.counts.tn) + "\n";
  s += prefix + "fn=" + std::to_string(r.counts.fn) + "\n";
  return s;
}

std::string format_report_table(std::span<const std::pair<std::string, MetricReport>> rows) {
  std::size_t width = 4;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s  %8s  %8s  %8s  %6s  %6s  %6s  %6s\n", static_cast<int>(width), "name",
                "auroc", "acc", "f1", "tp", "fp", "tn", "fn");
  out += buf;
  for (const auto& [name, r] : rows) {
    char auc[16];
    if (r.auroc) std::snprintf(auc, sizeof auc, "%.4f", *r.auroc);
    else std::snprintf(auc, sizeof auc, "n/a");
    std::snprintf(buf, sizeof buf, "%-*s  %8s  %8.4f  %8.4f  %6llu  %6llu  %6llu  %6llu\n", static_cast<int>(width),
                  name.c_str(), auc, r.accuracy, r.f1, static_cast<unsigned long long>(r.counts.tp),
                  static_cast<unsigned long long>(r.counts.fp), static_cast<unsigned long long>(r.counts.tn),
                  static_cast<unsigned long long>(r.counts.fn));
    out += buf;
  }
  return out;
}

std::string format_predictions_csv(std::span<const Prediction> preds) {
  std::string out = "id,score,hard_label\n";
  for (const auto& p : preds) {
    out += std::to_string(p.id) + "," + fmt_double(p.score) + "," + std::to_string(p.hard_label) + "\n";
  }
  return out;
}

}  // namespace embclf
