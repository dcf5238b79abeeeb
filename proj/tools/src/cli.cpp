#include "embclf_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "embclf/embclf.hpp"

namespace embclf::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Command-line mistakes: reported with usage text and exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { text, integer, real, flag };

struct Param {
  std::string name;
  Kind kind;
  json fallback;  // null: no default
  std::string help;
  bool required = false;
};

// Resolved options of one invocation, keyed by flag name without dashes.
class Options {
 public:
  explicit Options(json values) : values_(std::move(values)) {}
  const json& raw() const { return values_; }
  bool has(const std::string& key) const { return values_.contains(key) && !values_.at(key).is_null(); }
  std::string text(const std::string& key) const { return has(key) ? values_.at(key).get<std::string>() : ""; }
  std::uint64_t integer(const std::string& key) const { return values_.at(key).get<std::uint64_t>(); }
  double real(const std::string& key) const { return values_.at(key).get<double>(); }
  bool flag(const std::string& key) const { return values_.at(key).get<bool>(); }
  std::uint32_t u32(const std::string& key) const {
    const auto v = integer(key);
    if (v > 0xFFFFFFFFull) throw ValidationError("--" + key + " is out of range");
    return static_cast<std::uint32_t>(v);
  }

 private:
  json values_;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<Param> params;
  std::function<void(const Options&, std::ostream&)> run;
};

json parse_value(const Param& p, const std::string& raw) {
  switch (p.kind) {
    case Kind::text:
      return raw;
    case Kind::integer: {
      std::uint64_t v = 0;
      const auto* end = raw.data() + raw.size();
      const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
      if (ec != std::errc() || ptr != end) throw UsageError("--" + p.name + ": expected a non-negative integer, got '" + raw + "'");
      return v;
    }
    case Kind::real: {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != raw.size()) throw UsageError("--" + p.name + ": expected a number, got '" + raw + "'");
      return v;
    }
    case Kind::flag:
      return true;
  }
  return nullptr;
}

bool type_matches(Kind kind, const json& v) {
  switch (kind) {
    case Kind::text: return v.is_string();
    case Kind::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::real: return v.is_number();
    case Kind::flag: return v.is_boolean();
  }
  return false;
}

json load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw FormatError("config file '" + path + "' must hold a JSON object");
  if (doc.contains("options")) {
    if (doc.contains("command") && doc.at("command") != command) {
      throw ValidationError("config file '" + path + "' is a manifest for '" + doc.at("command").get<std::string>() +
                            "', not '" + command + "'");
    }
    return doc.at("options");
  }
  return doc;
}

// flag > config file > default
json resolve(const Command& cmd, const std::map<std::string, CLI::Option*>& given,
             const std::map<std::string, std::string>& raw, const std::map<std::string, bool>& flags,
             const json& config) {
  for (const auto& [key, value] : config.items()) {
    const bool known = std::any_of(cmd.params.begin(), cmd.params.end(), [&](const Param& p) { return p.name == key; });
    if (!known) throw ValidationError("config: unknown option '" + key + "' for '" + cmd.name + "'");
  }
  json out = json::object();
  for (const auto& p : cmd.params) {
    json v;
    if (given.at(p.name)->count() > 0) {
      v = p.kind == Kind::flag ? json(flags.at(p.name)) : parse_value(p, raw.at(p.name));
    } else if (config.contains(p.name) && !config.at(p.name).is_null()) {
      v = config.at(p.name);
      if (!type_matches(p.kind, v)) throw ValidationError("config: option '" + p.name + "' has the wrong type");
    } else {
      v = p.fallback;
    }
    if (p.required && v.is_null()) throw UsageError("--" + p.name + " is required");
    out[p.name] = v;
  }
  return out;
}

// ---- files ----

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

fs::path make_out_dir(const Options& o) {
  const fs::path dir(o.text("out"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_manifest(const fs::path& path, const std::string& command, const Options& o) {
  json m;
  m["command"] = command;
  m["toolkit_version"] = EMBCLF_VERSION;
  m["options"] = o.raw();
  write_text(path, m.dump(2) + "\n");
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError(what + ": bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// ---- shared parameter groups ----

Param out_param(const std::string& fallback, const std::string& help) {
  return {"out", Kind::text, fallback.empty() ? json(nullptr) : json(fallback), help, fallback.empty()};
}

Param threads_param() {
  return {"threads", Kind::integer, default_thread_count(), "worker threads (default from EMBCLF_THREADS)"};
}

std::vector<Param> train_params() {
  const TrainConfig d;
  return {
      {"seed", Kind::integer, d.seed, "run seed (initialisation and shuffling)"},
      {"epochs", Kind::integer, d.max_epochs, "training epochs"},
      {"batch-size", Kind::integer, d.batch_size, "mini-batch size"},
      {"lr", Kind::real, d.optimizer.learning_rate, "AdamW learning rate"},
      {"weight-decay", Kind::real, d.optimizer.weight_decay, "AdamW decoupled weight decay"},
      {"beta1", Kind::real, d.optimizer.beta1, "AdamW beta1"},
      {"beta2", Kind::real, d.optimizer.beta2, "AdamW beta2"},
      {"epsilon", Kind::real, d.optimizer.epsilon, "AdamW epsilon"},
      {"grad-clip", Kind::real, d.grad_clip, "global gradient-norm clip"},
      {"hidden-dim", Kind::integer, d.hidden_dim, "projection MLP hidden width"},
      {"projection-dim", Kind::integer, d.projection_dim, "projection output dimension"},
      {"positives", Kind::integer, d.positives_per_example, "mined positives per example"},
      {"negatives", Kind::integer, d.negatives_per_example, "mined negatives per example"},
      {"disable-cl", Kind::flag, false, "drop the contrastive loss"},
      {"disable-lr", Kind::flag, false, "drop the logistic loss"},
  };
}

TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.seed = o.integer("seed");
  c.max_epochs = o.u32("epochs");
  c.batch_size = o.u32("batch-size");
  c.optimizer.learning_rate = o.real("lr");
  c.optimizer.weight_decay = o.real("weight-decay");
  c.optimizer.beta1 = o.real("beta1");
  c.optimizer.beta2 = o.real("beta2");
  c.optimizer.epsilon = o.real("epsilon");
  c.grad_clip = o.real("grad-clip");
  c.hidden_dim = o.u32("hidden-dim");
  c.projection_dim = o.u32("projection-dim");
  c.positives_per_example = o.u32("positives");
  c.negatives_per_example = o.u32("negatives");
  c.flags.disable_cl = o.flag("disable-cl");
  c.flags.disable_lr = o.flag("disable-lr");
  c.threads = static_cast<unsigned>(o.integer("threads"));
  return c;
}

std::vector<Param> with(std::vector<Param> a, const std::vector<Param>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Retrieval head: a checkpoint's projection head, or none for raw hidden states.
struct RetrievalSpace {
  std::optional<Checkpoint> ckpt;
  const ProjectionHead* head() const { return ckpt ? &ckpt->heads.proj : nullptr; }
};

RetrievalSpace retrieval_space(const Options& o) {
  const bool raw = o.flag("raw");
  if (raw == o.has("checkpoint")) throw UsageError("give exactly one of --checkpoint and --raw");
  RetrievalSpace s;
  if (!raw) s.ckpt = load_checkpoint(o.text("checkpoint"));
  return s;
}

ProjectedDatabase build_db(const RetrievalSpace& space, const EmbeddingStore& store, SplitSelector split) {
  if (space.head()) return project_database(*space.head(), store, split);
  if (store.count(split) == 0) throw EmptyInputError("empty database: no records in the selected split");
  return ProjectedDatabase::from_store(store, split);
}

std::vector<Param> retrieval_params() {
  return {
      {"db", Kind::text, nullptr, "database store (.remb)", true},
      {"checkpoint", Kind::text, nullptr, "heads checkpoint (.rhed); retrieval in projected space"},
      {"raw", Kind::flag, false, "retrieve on raw hidden states instead of a checkpoint"},
      {"queries", Kind::text, nullptr, "query store (.remb)", true},
      {"db-split", Kind::text, "all", "database split: train, val, test or all"},
      {"query-split", Kind::text, "all", "query split: train, val, test or all"},
      {"exclude-self", Kind::flag, false, "skip the database entry whose id equals the query id"},
  };
}

// ---- subcommands ----

void run_synth(const Options& o, std::ostream& out) {
  if (o.has("spec") == o.has("from")) throw UsageError("give exactly one of --spec and --from");
  EmbeddingStore store;
  if (o.has("spec")) {
    std::ifstream in(o.text("spec"), std::ios::binary);
    if (!in) throw IoError("cannot open spec file '" + o.text("spec") + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError("spec file '" + o.text("spec") + "': " + e.what());
    }
    store = synth_generate(synth_spec_from_json(doc), o.integer("seed"));
  } else {
    store = read_store(o.text("from"));
  }
  const double sigma = o.real("perturb-sigma");
  const auto drift = parse_list(o.text("perturb-drift"), "--perturb-drift");
  if (sigma > 0 || !drift.empty()) store = perturb_gaussian(store, sigma, o.integer("perturb-seed"), drift);

  const fs::path path(o.text("out"));
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_store(store, path.string());
  write_manifest(path.string() + ".manifest.json", "synth", o);
  out << "wrote " << store.size() << " records (train " << store.count(Split::train) << ", val "
      << store.count(Split::val) << ", test " << store.count(Split::test) << ") dimension " << store.dimension()
      << " to " << path.string() << "\n";
}

void run_train(const Options& o, std::ostream& out) {
  const auto config = train_config(o);
  const auto store = read_store(o.text("store"));
  const auto dir = make_out_dir(o);
  const auto run = train_stage2(store, config);
  save_checkpoint(run.best, (dir / "best.rhed").string());
  save_checkpoint(run.last, (dir / "last.rhed").string());
  write_text(dir / "history.csv", format_history_csv(run.history));
  const auto val = evaluate(predict_lrc(run.best.heads, store, Split::val), labels_of(store, Split::val));
  write_text(dir / "metrics.txt", "best_epoch=" + std::to_string(run.best_epoch) + "\n" + format_report_kv(val, "val_"));
  write_manifest(dir / "manifest.json", "train", o);
  const std::pair<std::string, MetricReport> rows[] = {{"val (best epoch " + std::to_string(run.best_epoch) + ")", val}};
  out << format_report_table(rows);
}

void run_eval(const Options& o, std::ostream& out) {
  const auto store = read_store(o.text("store"));
  const auto ckpt = load_checkpoint(o.text("checkpoint"));
  const auto split = parse_split_selector(o.text("split"));
  const auto preds = predict_lrc(ckpt.heads, store, split);
  const auto report = evaluate(preds, labels_of(store, split));
  const auto dir = make_out_dir(o);
  write_text(dir / "predictions.csv", format_predictions_csv(preds));
  write_text(dir / "metrics.txt", format_report_kv(report));
  write_manifest(dir / "manifest.json", "eval", o);
  const std::pair<std::string, MetricReport> rows[] = {{"LRC " + o.text("split"), report}};
  out << format_report_table(rows);
}

void run_rkc(const Options& o, std::ostream& out) {
  const auto space = retrieval_space(o);
  const auto db_store = read_store(o.text("db"));
  const auto q_store = read_store(o.text("queries"));
  const auto db = build_db(space, db_store, parse_split_selector(o.text("db-split")));
  const auto queries = make_queries(q_store, parse_split_selector(o.text("query-split")), space.head());
  if (queries.size() == 0) throw EmptyInputError("no queries in the selected split");
  const auto k = o.integer("k");
  const auto preds = predict_rkc_batch(db, queries, k, o.flag("exclude-self"), static_cast<unsigned>(o.integer("threads")));
  const auto report = evaluate(preds, queries.truth());
  const auto dir = make_out_dir(o);
  write_text(dir / "predictions.csv", format_predictions_csv(preds));
  write_text(dir / "metrics.txt", format_report_kv(report));
  write_manifest(dir / "manifest.json", "rkc", o);
  const std::pair<std::string, MetricReport> rows[] = {{"RKC K=" + std::to_string(k), report}};
  out << format_report_table(rows);
}

void run_cross_eval(const Options& o, std::ostream& out) {
  const auto ckpt = load_checkpoint(o.text("checkpoint"));
  const auto source = read_store(o.text("source"));
  const auto target = read_store(o.text("target"));
  const auto report = cross_dataset_eval(ckpt.heads, source, target, o.integer("k"),
                                         static_cast<unsigned>(o.integer("threads")));
  const auto dir = make_out_dir(o);
  write_text(dir / "metrics.txt", format_report_kv(report.rkc, "rkc_") + format_report_kv(report.lrc, "lrc_"));
  write_manifest(dir / "manifest.json", "cross-eval", o);
  const std::pair<std::string, MetricReport> rows[] = {{"target RKC", report.rkc}, {"target LRC", report.lrc}};
  out << format_report_table(rows);
}

void run_augment_db(const Options& o, std::ostream& out) {
  const auto base = read_store(o.text("db"));
  const auto perturbed = read_store(o.text("perturbed"));
  std::optional<std::uint64_t> offset;
  if (o.has("id-offset")) offset = o.integer("id-offset");
  const auto merged = augment_db(base, perturbed, offset, o.real("fraction"), o.integer("seed"));
  const fs::path path(o.text("out"));
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_store(merged, path.string());
  write_manifest(path.string() + ".manifest.json", "augment-db", o);
  out << "wrote " << merged.size() << " records (" << base.size() << " original, " << merged.size() - base.size()
      << " perturbed) to " << path.string() << "\n";
}

std::string variant_key(const std::string& name) {
  if (name == "full") return "full";
  if (name == "w/o L_CL") return "wo_cl";
  return "wo_lr";
}

void run_ablate(const Options& o, std::ostream& out) {
  const auto config = train_config(o);
  const auto store = read_store(o.text("store"));
  const auto rows = ablate(store, config, o.integer("k"));
  const auto dir = make_out_dir(o);
  std::string kv;
  std::vector<std::pair<std::string, MetricReport>> table;
  for (const auto& r : rows) {
    const auto key = variant_key(r.name);
    kv += key + ".best_epoch=" + std::to_string(r.run.best_epoch) + "\n";
    kv += format_report_kv(r.val_lrc, key + ".val_lrc_");
    kv += format_report_kv(r.test_lrc, key + ".test_lrc_");
    kv += format_report_kv(r.test_rkc, key + ".test_rkc_");
    write_text(dir / ("history_" + key + ".csv"), format_history_csv(r.run.history));
    table.emplace_back(r.name + " LRC", r.test_lrc);
    table.emplace_back(r.name + " RKC", r.test_rkc);
  }
  const auto text = format_report_table(table);
  write_text(dir / "metrics.txt", kv);
  write_text(dir / "report.txt", text);
  write_manifest(dir / "manifest.json", "ablate", o);
  out << text;
}

void run_sweep_k(const Options& o, std::ostream& out) {
  std::vector<std::size_t> ks;
  for (double v : parse_list(o.text("ks"), "--ks")) {
    if (!(v >= 1) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ValidationError("--ks: every K must be a positive integer");
    }
    ks.push_back(static_cast<std::size_t>(v));
  }
  const auto space = retrieval_space(o);
  const auto db_store = read_store(o.text("db"));
  const auto q_store = read_store(o.text("queries"));
  const auto db = build_db(space, db_store, parse_split_selector(o.text("db-split")));
  const auto queries = make_queries(q_store, parse_split_selector(o.text("query-split")), space.head());
  if (queries.size() == 0) throw EmptyInputError("no queries in the selected split");
  const auto rows = k_sweep(db, queries, ks, o.flag("exclude-self"), static_cast<unsigned>(o.integer("threads")));
  std::string csv = "k,auroc,accuracy,f1\n";
  std::vector<std::pair<std::string, MetricReport>> table;
  char buf[128];
  for (const auto& r : rows) {
    char auc[32];
    if (r.report.auroc) std::snprintf(auc, sizeof auc, "%.17g", *r.report.auroc);
    else std::snprintf(auc, sizeof auc, "undefined");
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g\n", r.k, auc, r.report.accuracy, r.report.f1);
    csv += buf;
    table.emplace_back("K=" + std::to_string(r.k), r.report);
  }
  const auto dir = make_out_dir(o);
  write_text(dir / "sweep.csv", csv);
  write_manifest(dir / "manifest.json", "sweep-k", o);
  out << format_report_table(table);
}

std::string describe_defaults() {
  const TrainConfig d;
  std::ostringstream s;
  s << "projection_dim=" << d.projection_dim << "\n"
    << "hidden_dim=" << d.hidden_dim << "\n"
    << "mlp_layers=2\n"
    << "optimizer=AdamW\n"
    << "learning_rate=" << d.optimizer.learning_rate << "\n"
    << "weight_decay=" << d.optimizer.weight_decay << "\n"
    << "beta1=" << d.optimizer.beta1 << "\n"
    << "beta2=" << d.optimizer.beta2 << "\n"
    << "epsilon=" << d.optimizer.epsilon << "\n"
    << "batch_size=" << d.batch_size << "\n"
    << "epochs=" << d.max_epochs << "\n"
    << "grad_clip=" << d.grad_clip << "\n"
    << "positives_per_example=" << d.positives_per_example << "\n"
    << "negatives_per_example=" << d.negatives_per_example << "\n"
    << "rkc_top_k=" << kDefaultRkcK << "\n"
    << "decision_threshold=" << kDecisionThreshold << "\n"
    << "threads=" << default_thread_count() << "\n";
  return s.str();
}

std::string describe_store(const EmbeddingStore& s) {
  std::ostringstream o;
  std::map<std::string, std::size_t> tags;
  std::size_t pos[3] = {0, 0, 0};
  for (const auto& r : s.records()) {
    ++tags[r.dataset_tag];
    pos[static_cast<int>(r.split)] += r.label;
  }
  o << "dimension=" << s.dimension() << "\n"
    << "records=" << s.size() << "\n"
    << "provenance=" << s.provenance() << "\n";
  for (Split sp : {Split::train, Split::val, Split::test}) {
    o << "split." << to_string(sp) << "=" << s.count(sp) << " (label 1: " << pos[static_cast<int>(sp)] << ")\n";
  }
  for (const auto& [tag, n] : tags) o << "tag." << tag << "=" << n << "\n";
  return o.str();
}

std::string describe_checkpoint(const Checkpoint& c) {
  std::ostringstream o;
  o << "input_dim=" << c.heads.proj.input_dim() << "\n"
    << "hidden_dim=" << c.heads.proj.hidden_dim() << "\n"
    << "projection_dim=" << c.heads.proj.output_dim() << "\n"
    << "parameters=" << c.heads.parameter_count() << "\n"
    << "optimizer_step=" << c.optim.step << "\n"
    << "learning_rate=" << c.optim.config.learning_rate << "\n"
    << "weight_decay=" << c.optim.config.weight_decay << "\n";
  return o.str();
}

void run_inspect(const Options& o, std::ostream& out) {
  if (!o.has("store") && !o.has("checkpoint") && !o.flag("defaults")) {
    throw UsageError("give at least one of --store, --checkpoint and --defaults");
  }
  std::string text;
  if (o.flag("defaults")) text += describe_defaults();
  if (o.has("store")) text += describe_store(read_store(o.text("store")));
  if (o.has("checkpoint")) text += describe_checkpoint(load_checkpoint(o.text("checkpoint")));
  if (o.has("out")) {
    const auto dir = make_out_dir(o);
    write_text(dir / "inspect.txt", text);
    write_manifest(dir / "manifest.json", "inspect", o);
  }
  out << text;
}

std::vector<Command> commands() {
  const Param k_param{"k", Kind::integer, kDefaultRkcK, "neighbors voting in RKC"};
  return {
      {"synth", "generate a synthetic store, optionally perturbed",
       {{"spec", Kind::text, nullptr, "synthetic spec (JSON)"},
        {"from", Kind::text, nullptr, "existing store to copy or perturb instead of --spec"},
        {"seed", Kind::integer, 0, "generator seed"},
        {"perturb-sigma", Kind::real, 0.0, "std. dev. of Gaussian noise added to every coordinate"},
        {"perturb-drift", Kind::text, "", "comma-separated shift added to every vector"},
        {"perturb-seed", Kind::integer, 0, "noise seed"},
        out_param("", "output store (.remb); the manifest goes next to it")},
       run_synth},
      {"train", "train the projection and logistic heads",
       with({{"store", Kind::text, nullptr, "training store (.remb)", true}, out_param("", "output directory"),
             threads_param()},
            train_params()),
       run_train},
      {"eval", "score a split with the logistic head",
       {{"store", Kind::text, nullptr, "store (.remb)", true},
        {"checkpoint", Kind::text, nullptr, "heads checkpoint (.rhed)", true},
        {"split", Kind::text, "test", "split: train, val, test or all"},
        out_param("eval-out", "output directory")},
       run_eval},
      {"rkc", "classify queries by retrieval vote",
       with(retrieval_params(), {k_param, out_param("rkc-out", "output directory"), threads_param()}), run_rkc},
      {"cross-eval", "apply source-trained heads to a target corpus",
       {{"checkpoint", Kind::text, nullptr, "heads trained on the source (.rhed)", true},
        {"source", Kind::text, nullptr, "source store (.remb)", true},
        {"target", Kind::text, nullptr, "target store (.remb); train split is the database, test split the queries",
         true},
        k_param, out_param("cross-eval-out", "output directory"), threads_param()},
       run_cross_eval},
      {"augment-db", "merge perturbed copies into a database store",
       {{"db", Kind::text, nullptr, "original database store (.remb)", true},
        {"perturbed", Kind::text, nullptr, "perturbed store (.remb)", true},
        {"id-offset", Kind::integer, nullptr, "added to perturbed ids (default: max original id + 1)"},
        {"fraction", Kind::real, 1.0, "fraction of perturbed records to add"},
        {"seed", Kind::integer, 0, "seed for choosing the fraction"},
        out_param("", "output store (.remb); the manifest goes next to it")},
       run_augment_db},
      {"ablate", "train with the full objective and each loss term removed",
       with({{"store", Kind::text, nullptr, "store (.remb)", true}, k_param,
             out_param("ablate-out", "output directory"), threads_param()},
            train_params()),
       run_ablate},
      {"sweep-k", "RKC metrics over a list of K",
       with(retrieval_params(), {{"ks", Kind::text, "1,5,10,20,50", "comma-separated K values"},
                                 out_param("sweep-k-out", "output directory"), threads_param()}),
       run_sweep_k},
      {"inspect", "describe a store, a checkpoint or the default hyperparameters",
       {{"store", Kind::text, nullptr, "store (.remb)"},
        {"checkpoint", Kind::text, nullptr, "checkpoint (.rhed)"},
        {"defaults", Kind::flag, false, "print the default hyperparameters"},
        {"out", Kind::text, nullptr, "optional output directory"}},
       run_inspect},
  };
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"Retrieval-guided embedding classifier toolkit", "embclf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EMBCLF_VERSION);

  struct Bound {
    std::map<std::string, CLI::Option*> options;
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> flags;
    std::string config;
    CLI::Option* config_opt = nullptr;
  };
  std::vector<Bound> bound(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto* sub = app.add_subcommand(cmds[i].name, cmds[i].description);
    auto& b = bound[i];
    for (const auto& p : cmds[i].params) {
      std::string help = p.help;
      if (!p.fallback.is_null() && p.kind != Kind::flag) help += " [" + (p.fallback.is_string() ? p.fallback.get<std::string>() : p.fallback.dump()) + "]";
      if (p.required) help += " (required)";
      if (p.kind == Kind::flag) {
        b.options[p.name] = sub->add_flag("--" + p.name, b.flags[p.name], help);
      } else {
        b.options[p.name] = sub->add_option("--" + p.name, b.raw[p.name], help)
                                ->type_name(p.kind == Kind::integer ? "UINT" : p.kind == Kind::real ? "FLOAT" : "TEXT");
      }
    }
    b.config_opt = sub->add_option("--config", b.config, "JSON options file or a manifest.json from an earlier run");
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return 0;
    }
    const CLI::App* target = &app;
    for (auto* s : subs) {
      if (s->parsed()) target = s;
    }
    err << "error: " << one_line(e.what()) << "\n" << target->help();
    return 2;
  }

  std::size_t chosen = 0;
  while (!subs[chosen]->parsed()) ++chosen;
  const auto& cmd = cmds[chosen];
  auto& b = bound[chosen];
  try {
    const json config = b.config_opt->count() > 0 ? load_config(b.config, cmd.name) : json::object();
    const Options options(resolve(cmd, b.options, b.raw, b.flags, config));
    cmd.run(options, out);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n" << subs[chosen]->help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace embclf::cli
