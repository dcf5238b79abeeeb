// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 1). Pass criterion names as arguments to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "embclf/embclf.hpp"
#include "embclf_cli/cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace embclf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Gradient correctness: 10 configs, d=8, hidden 4, p=4, batch 3; central
// differences, rel 1e-4, abs floor 1e-7; under a minute.
Outcome gradients() {
  const auto t0 = Clock::now();
  std::size_t coords = 0, bad = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = fixture::random_grad_case(1000 + seed, 8, 4, 4, 3);
    std::size_t checked = 0;
    bad += fixture::check_grads(c, {}, &checked, 1e-4, 1e-4, 1e-7).size();
    coords += checked;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 60, fmt("10 configs, %zu coordinates, %zu mismatches, %.2f s", coords, bad, t)};
}

// Retrieval exactness: 20 databases of <= 1000 entries, d in {8,16,64},
// 100 queries each; ids and order exact, similarities within 1e-9.
Outcome retrieval() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  std::size_t checks = 0, bad = 0;
  const std::size_t dims[] = {8, 16, 64};
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = dims[t % 3];
    const std::size_t n = 2 + rng.below(999);
    std::vector<oracle::Item> items;
    std::vector<DatabaseEntry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      oracle::Item it{rng.below(1u << 30) * 1000 + i, static_cast<std::uint8_t>(i < 2 ? i : rng.below(2)), {}};
      for (std::size_t j = 0; j < d; ++j) it.v.push_back(rng.normal());
      entries.push_back({it.id, it.label, it.v});
      items.push_back(std::move(it));
    }
    const auto db = ProjectedDatabase::build(entries);
    const auto same = [](const std::vector<Neighbor>& a, const std::vector<Neighbor>& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id != b[i].id || a[i].label != b[i].label || std::abs(a[i].similarity - b[i].similarity) > 1e-9) {
          return false;
        }
      }
      return true;
    };
    for (int q = 0; q < 100; ++q) {
      std::vector<double> v(d);
      for (auto& x : v) x = rng.normal();
      const std::size_t k = 1 + rng.below(50);
      ++checks;
      if (!same(db.top_k(v, k), oracle::linear_scan(items, v, k))) ++bad;

      // Mining with a database member as the query.
      const auto& member = items[rng.below(n)];
      const auto pos = oracle::linear_scan(items, member.v, 1, member.id, member.label);
      const auto neg = oracle::linear_scan(items, member.v, 1, std::nullopt,
                                           static_cast<std::uint8_t>(1 - member.label));
      if (pos.empty() || neg.empty()) continue;
      ++checks;
      const auto pair = mine_contrastive(db, member.id, member.v);
      if (!same({pair.positive}, pos) || !same({pair.negative}, neg)) ++bad;
    }
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 60, fmt("%zu comparisons, %zu mismatches, %.2f s", checks, bad, t)};
}

// RKC oracle equivalence on 500 queries plus closed-form spot checks.
Outcome rkc_oracle() {
  const auto store = synth_generate(two_cluster_layout(16, 0.3, 1.0, 1000), 77);
  const auto db_store = store.subset(Split::train);
  std::vector<oracle::Item> items;
  for (const auto& r : db_store.records()) items.push_back({r.id, r.label, {r.hidden.begin(), r.hidden.end()}});
  const auto db = ProjectedDatabase::from_store(db_store);
  Rng rng(5);
  double worst = 0;
  std::size_t queries = 0;
  for (const auto& r : store.records()) {
    if (queries == 500) break;
    if (r.split == Split::train && rng.below(4) != 0) continue;
    const std::vector<double> q(r.hidden.begin(), r.hidden.end());
    const std::size_t k = 1 + rng.below(40);
    const bool self = r.split == Split::train;
    const double want = oracle::rkc_vote(oracle::linear_scan(items, q, k, self ? std::optional(r.id) : std::nullopt));
    worst = std::max(worst, std::abs(predict_rkc(db, r.id, q, k, self).score - want));
    // raw mode rebuilds the database from the store; sample it
    if (queries % 10 == 0) {
      worst = std::max(worst, std::abs(predict_rkc_raw(db_store, r.id, r.hidden, k, self).score - want));
    }
    ++queries;
  }
  const auto tiny = ProjectedDatabase::build({{1, 1, {1, 0}}});
  const double s08 = predict_rkc(tiny, 9, std::vector<double>{0.8, 0.6}, 1, false).score;
  const double s0 = predict_rkc(tiny, 9, std::vector<double>{0, 1}, 1, false).score;
  const bool spots = std::abs(s08 - 0.689974) <= 1e-5 && s0 == 0.5;
  return {queries == 500 && worst <= 1e-9 && spots,
          fmt("%zu queries, max |score - oracle| %.3g; sigma(0.8)=%.6f, sigma(0)=%.17g", queries, worst, s08, s0)};
}

// AUROC vs the O(N^2) pairwise oracle on 50 sets including heavy ties.
Outcome auroc_oracle() {
  Rng rng(11);
  double worst = 0;
  int sets = 0;
  while (sets < 50) {
    const std::size_t n = 2 + rng.below(400);
    const int levels = sets % 3 == 0 ? 0 : static_cast<int>(2 + rng.below(6));
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (std::size_t i = 0; i < n; ++i) {
      y.push_back(static_cast<std::uint8_t>(rng.below(2)));
      double x = rng.uniform() + 0.2 * y.back();
      if (levels) x = std::floor(x * levels);
      s.push_back(x);
    }
    const auto got = auroc(s, y);
    if (!got) continue;
    worst = std::max(worst, std::abs(*got - oracle::pairwise_auroc(s, y)));
    ++sets;
  }
  const std::vector<double> sep = {0.1, 0.2, 0.3, 0.7, 0.8};
  const auto perfect = auroc(sep, std::vector<std::uint8_t>{0, 0, 0, 1, 1});
  return {worst <= 1e-9 && perfect && *perfect == 1.0,
          fmt("50 sets, max |auroc - oracle| %.3g; perfect separation %.17g", worst, perfect.value_or(-1))};
}

// Two clusters at +-2*1 in 64 dims, 1000 per class, default hyperparameters.
Outcome separable() {
  const auto t0 = Clock::now();
  const auto store = synth_generate(two_cluster_layout(64, 2.0, 1.0, 1000), 42);
  TrainConfig config;
  config.threads = 1;
  const auto run = train_stage2(store, config);
  const auto& best = run.history[run.best_epoch - 1];
  const double t = seconds_since(t0);
  const double auc = best.val_auroc.value_or(0);
  return {best.val_accuracy >= 0.99 && auc >= 0.999 && t < 120,
          fmt("best epoch %u: val acc %.4f, val AUROC %.6f, %.1f s single-threaded", run.best_epoch,
              best.val_accuracy, auc, t)};
}

// Full objective vs w/o contrastive term on the confounder store, matched
// seeds, test accuracy of the retrieval classifier over the train split.
Outcome ablation() {
  const auto t0 = Clock::now();
  const auto store = synth_generate(confounder_layout(64, 50, 10, 1.0, 1.0, 0.5, 1000), 100);
  TrainConfig config;
  auto rows = ablate(store, config, kDefaultRkcK);
  const auto& full = rows[0];
  const auto& no_cl = rows[1];
  const double gap = 100 * (full.test_rkc.accuracy - no_cl.test_rkc.accuracy);
  return {gap >= 5.0,
          fmt("RKC test acc full %.3f vs w/o L_CL %.3f (gap %.1f points); LRC %.3f vs %.3f; w/o L_LR RKC %.3f; %.0f s",
              full.test_rkc.accuracy, no_cl.test_rkc.accuracy, gap, full.test_lrc.accuracy, no_cl.test_lrc.accuracy,
              rows[2].test_rkc.accuracy, seconds_since(t0))};
}

TrainConfig small_head(std::uint64_t seed, std::uint32_t epochs) {
  TrainConfig c;
  c.seed = seed;
  c.hidden_dim = 256;
  c.projection_dim = 256;
  c.max_epochs = epochs;
  return c;
}

// Source-trained heads on a shifted and rotated target: RKC > LRC.
Outcome cross_domain() {
  const auto t0 = Clock::now();
  int wins = 0;
  std::string per;
  for (int t = 0; t < 10; ++t) {
    const auto src = synth_generate(shifted_layout(64, 3.0, 0.0, 0.0, 1.0, 500, "A"), 10 + t);
    const auto tgt = synth_generate(shifted_layout(64, 3.0, 1.5, 0.9, 1.0, 500, "B"), 5000 + t);
    const auto run = train_stage2(src, small_head(t, 30));
    const auto r = cross_dataset_eval(run.best.heads, src, tgt);
    wins += r.rkc.accuracy > r.lrc.accuracy;
    per += fmt(" %.2f/%.2f", r.rkc.accuracy, r.lrc.accuracy);
  }
  return {wins >= 9, fmt("RKC > LRC in %d/10 trials (rkc/lrc:%s); %.0f s", wins, per.c_str(), seconds_since(t0))};
}

// Perturbed queries (shared drift plus noise); database of train vs train
// plus its perturbed copies.
Outcome augmented_db() {
  const auto t0 = Clock::now();
  int wins = 0;
  std::string per;
  for (int t = 0; t < 10; ++t) {
    const auto store = synth_generate(shifted_layout(16, 3.0, 0.0, 0.0, 1.0, 500, "A"), 10 + t);
    std::vector<double> drift(16, 0.0);
    drift[0] = 1.0;
    drift[2] = 4.0;
    const auto perturbed = perturb_gaussian(store, 0.5, 777 + t, drift);
    const auto train = store.subset(Split::train);
    const auto augmented = augment_db(train, perturbed.subset(Split::train));
    const auto run = train_stage2(store, small_head(t, 15));
    const auto& head = run.best.heads.proj;
    const auto queries = make_queries(perturbed, Split::test, &head);
    const double orig =
        evaluate(predict_rkc_batch(project_database(head, train, std::nullopt), queries, 20), queries.truth()).accuracy;
    const double aug =
        evaluate(predict_rkc_batch(project_database(head, augmented, std::nullopt), queries, 20), queries.truth())
            .accuracy;
    wins += aug >= orig;
    per += fmt(" %.2f/%.2f", aug, orig);
  }
  return {wins >= 9, fmt("augmented >= original in %d/10 trials (aug/orig:%s); %.0f s", wins, per.c_str(),
                         seconds_since(t0))};
}

// Accuracy over K on overlapping clusters.
Outcome k_sweep_shape() {
  const auto t0 = Clock::now();
  const auto store = synth_generate(two_cluster_layout(16, 0.2, 1.0, 1500), 3);
  const auto run = train_stage2(store, small_head(0, 15));
  const auto& head = run.best.heads.proj;
  const auto db = project_database(head, store, Split::train);
  const auto queries = make_queries(store, Split::test, &head);
  const std::vector<std::size_t> ks = {1, 5, 10, 20, 50};
  const auto rows = k_sweep(db, queries, ks);
  const double a1 = rows[0].report.accuracy, a20 = rows[3].report.accuracy, a50 = rows[4].report.accuracy;
  return {a20 >= a1 && std::abs(a50 - a20) <= 0.02,
          fmt("acc K=1 %.4f, K=5 %.4f, K=10 %.4f, K=20 %.4f, K=50 %.4f; %.0f s", a1, rows[1].report.accuracy,
              rows[2].report.accuracy, a20, a50, seconds_since(t0))};
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Bytes of every file under each output (a file or a directory).
std::map<std::string, std::string> capture(const fs::path& root, const std::vector<std::string>& outputs) {
  std::map<std::string, std::string> files;
  for (const auto& o : outputs) {
    const fs::path path = root / o;
    if (!fs::is_directory(path)) {
      files[o] = read_file(path);
      continue;
    }
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
  }
  return files;
}

// Every subcommand rerun from its manifest reproduces its outputs.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "embclf_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto p = [&](const std::string& s) { return (root / s).string(); };
  {
    std::ofstream(p("spec.json")) << R"({"layout": "two_cluster", "dimension": 8, "offset": 0.5, "per_class": 80})";
    std::ofstream(p("target.json"))
        << R"({"layout": "shifted", "dimension": 8, "separation": 3, "shift": 1, "rotate": 0.5, "per_class": 80, "tag": "B"})";
  }
  const std::vector<std::string> small = {"--epochs", "2", "--hidden-dim", "16", "--projection-dim", "16"};
  const auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  struct Step {
    std::vector<std::string> args;
    std::string manifest;
    std::vector<std::string> outputs;  // paths (files or directories) the step writes
  };
  const std::vector<Step> steps = {
      {{"synth", "--spec", p("spec.json"), "--seed", "4", "--out", p("toy.remb")}, p("toy.remb.manifest.json"),
       {"toy.remb", "toy.remb.manifest.json"}},
      {{"synth", "--spec", p("target.json"), "--seed", "5", "--out", p("target.remb")},
       p("target.remb.manifest.json"), {"target.remb", "target.remb.manifest.json"}},
      {{"synth", "--from", p("toy.remb"), "--perturb-sigma", "0.3", "--perturb-seed", "6", "--out", p("noisy.remb")},
       p("noisy.remb.manifest.json"), {"noisy.remb", "noisy.remb.manifest.json"}},
      {with({"train", "--store", p("toy.remb"), "--out", p("train"), "--seed", "7"}, small), p("train/manifest.json"),
       {"train"}},
      {{"eval", "--store", p("toy.remb"), "--checkpoint", p("train/best.rhed"), "--out", p("eval")},
       p("eval/manifest.json"), {"eval"}},
      {{"rkc", "--db", p("toy.remb"), "--db-split", "train", "--checkpoint", p("train/best.rhed"), "--queries",
        p("toy.remb"), "--query-split", "test", "--out", p("rkc")},
       p("rkc/manifest.json"), {"rkc"}},
      {{"cross-eval", "--checkpoint", p("train/best.rhed"), "--source", p("toy.remb"), "--target", p("target.remb"),
        "--out", p("cross")},
       p("cross/manifest.json"), {"cross"}},
      {{"augment-db", "--db", p("toy.remb"), "--perturbed", p("noisy.remb"), "--fraction", "0.5", "--seed", "2",
        "--out", p("aug.remb")},
       p("aug.remb.manifest.json"), {"aug.remb", "aug.remb.manifest.json"}},
      {with({"ablate", "--store", p("toy.remb"), "--out", p("ablate")}, small), p("ablate/manifest.json"), {"ablate"}},
      {{"sweep-k", "--db", p("aug.remb"), "--raw", "--queries", p("noisy.remb"), "--query-split", "test", "--out",
        p("sweep")},
       p("sweep/manifest.json"), {"sweep"}},
      {{"inspect", "--store", p("toy.remb"), "--checkpoint", p("train/best.rhed"), "--defaults", "--out",
        p("inspect")},
       p("inspect/manifest.json"), {"inspect"}},
  };
  std::ostringstream sink;
  std::vector<std::string> failed;
  for (const auto& s : steps) {
    if (cli::cli_dispatch(s.args, sink, sink) != 0) {
      failed.push_back(s.args[0] + " (first run)");
      continue;
    }
    const auto before = capture(root, s.outputs);
    const auto manifest_text = read_file(s.manifest);
    for (const auto& o : s.outputs) fs::remove_all(root / o);
    fs::create_directories(fs::path(s.manifest).parent_path());
    std::ofstream(s.manifest, std::ios::binary) << manifest_text;
    if (cli::cli_dispatch({s.args[0], "--config", s.manifest}, sink, sink) != 0) {
      failed.push_back(s.args[0] + " (rerun)");
      continue;
    }
    if (capture(root, s.outputs) != before) failed.push_back(s.args[0] + " (outputs differ)");
  }
  fs::remove_all(root);
  std::string detail = fmt("%zu invocations rerun from their manifests", steps.size());
  for (const auto& f : failed) detail += "; " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient-correctness", gradients},   {"retrieval-exactness", retrieval},
      {"rkc-oracle-equivalence", rkc_oracle}, {"metric-oracle", auroc_oracle},
      {"separable-training", separable},     {"loss-ablation-direction", ablation},
      {"cross-domain-direction", cross_domain}, {"augmented-db-direction", augmented_db},
      {"k-sweep-shape", k_sweep_shape},      {"determinism", determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
