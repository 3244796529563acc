#pragma once

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "legalie/confgate.hpp"
#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/evalkit.hpp"
#include "legalie/extraction.hpp"
#include "legalie/genix/checkpoint.hpp"
#include "legalie/genix/extract.hpp"
#include "legalie/genix/train.hpp"
#include "legalie/legalstats.hpp"
#include "legalie/parallel.hpp"
#include "legalie/rulex.hpp"
#include "legalie/synth.hpp"
#include "legalie/taskschema.hpp"

namespace legalie::cli {

inline constexpr std::uint64_t builtin_seed = 7;
inline constexpr const char* seed_env = "LEGALIE_SEED";

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv(seed_env); s && *s) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(s, &used);
      if (used == std::strlen(s)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(seed_env) + " must be a non-negative integer, got '" + s + "'");
  }
  return builtin_seed;
}

// Documents paired with the tasks to extract: the document's own category,
// plus the criminal ruling for facts documents that carry one.
struct Job {
  std::size_t doc;
  Task task;
};

inline std::vector<Job> plan_jobs(const std::vector<Document>& docs, const std::set<Task>& only) {
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    std::vector<Task> tasks{d.category};
    if (d.category != Task::ruling_criminal && is_criminal(d.category) && !text::trim(d.ruling).empty())
      tasks.push_back(Task::ruling_criminal);
    for (Task t : tasks)
      if (only.empty() || only.count(t)) jobs.push_back({i, t});
  }
  return jobs;
}

inline std::vector<Extraction> rule_extract(const std::vector<TaskSpec>& specs, const std::vector<Document>& docs,
                                            const rulex::RuleSet& rules, std::vector<Job> jobs, int n_jobs,
                                            std::ostream& err) {
  std::set<Task> uncovered;
  std::erase_if(jobs, [&](const Job& j) {
    if (rules.covers(j.task)) return false;
    uncovered.insert(j.task);
    return true;
  });
  for (Task t : uncovered) err << "warning: ruleset has no rules for task " << to_string(t) << "; skipped\n";
  return parallel_map<Extraction>(jobs.size(), n_jobs, [&](std::size_t i) {
    return rulex::extract(spec_for(specs, jobs[i].task), docs[jobs[i].doc], rules);
  });
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline std::vector<Task> parse_tasks(const std::vector<std::string>& names) {
  std::vector<Task> out;
  for (const auto& n : names) {
    auto t = parse_task(n);
    if (!t) throw UsageError("unknown task '" + n + "'");
    out.push_back(*t);
  }
  return out;
}

inline std::vector<TaskSpec> specs_from(const std::string& path) {
  return path.empty() ? builtin_tasks() : load_task_specs(path);
}

// ---------------------------------------------------------------------------

struct Options {
  std::uint64_t seed = builtin_seed;
  std::string tasks_file;

  // gen-corpus
  std::string out;
  std::string preset = "benchmark";
  std::size_t per_task = 100;
  double noise = 0.0;
  bool with_civil = false;
  std::size_t n_drunk = 2000, n_fraud = 2000;
  std::string config;

  // split
  std::string corpus;
  std::string out_dir;
  std::size_t n_train = 50, n_test = 100;
  bool pooled = false;

  // extract
  std::string engine = "rule";
  std::string rules;
  std::string ckpt;
  int jobs = 1;
  std::vector<std::string> only_tasks;

  // train
  std::string train_path;
  std::string init_ckpt;
  std::string mode = "finetune";
  int epochs = 100;
  int batch = 8;
  std::optional<double> lr;
  int pretrain_epochs = 0;
  int d_model = 64, heads = 4, d_ff = 256, layers = 2, prompt_len = 20;

  // eval / calibrate / gate
  std::string gold, pred, gate;
  std::string format = "json";
  double target_recall = 0.81;
  bool merge = false;
  std::string rejected;

  // analyze / report
  std::string analyze_task;
  std::string analysis, eval_report;
};

inline int cmd_gen_corpus(const Options& o, std::ostream& out) {
  synth::SynthConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw Error("cannot open synth config '" + o.config + "'");
    try {
      auto j = nlohmann::json::parse(in);
      if (!j.contains("seed")) j["seed"] = o.seed;
      cfg = synth::config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed synth config '" + o.config + "': " + e.what());
    }
  } else if (o.preset == "benchmark") {
    cfg = synth::benchmark_config(o.per_task, o.seed, o.noise, o.with_civil);
  } else {
    cfg = synth::analysis_config(o.n_drunk, o.n_fraud, o.seed);
    cfg.noise_rate = o.noise;
  }
  auto docs = synth::generate_synthetic(cfg);
  save_corpus(o.out, docs);
  out << nlohmann::json{{"documents", docs.size()}, {"seed", cfg.seed}}.dump() << '\n';
  return 0;
}

inline int cmd_split(const Options& o, std::ostream& out) {
  auto specs = specs_from(o.tasks_file);
  auto docs = load_corpus(o.corpus, specs);
  auto split = o.pooled ? split_dataset(docs, o.n_train, o.n_test, o.seed)
                        : split_per_task(docs, o.n_train, o.n_test, o.seed);
  std::filesystem::create_directories(o.out_dir);
  auto dir = std::filesystem::path(o.out_dir);
  save_corpus((dir / "train.jsonl").string(), split.train);
  save_corpus((dir / "valid.jsonl").string(), split.valid);
  save_corpus((dir / "test.jsonl").string(), split.test);
  out << nlohmann::json{{"train", split.train.size()}, {"valid", split.valid.size()}, {"test", split.test.size()}}.dump()
      << '\n';
  return 0;
}

inline void write_predictions(const std::string& path, const std::vector<Extraction>& preds, std::ostream& out) {
  if (path.empty() || path == "-") {
    for (const auto& e : preds) out << to_json(e).dump() << '\n';
  } else {
    save_extractions(path, preds);
  }
}

inline int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  auto specs = specs_from(o.tasks_file);
  auto docs = load_corpus(o.corpus, specs);
  auto only = parse_tasks(o.only_tasks);
  auto jobs = plan_jobs(docs, std::set<Task>(only.begin(), only.end()));
  std::vector<Extraction> preds;
  if (o.engine == "rule") {
    auto rules = o.rules.empty() ? rulex::default_ruleset() : rulex::load_ruleset(o.rules, specs);
    preds = rule_extract(specs, docs, rules, std::move(jobs), o.jobs, err);
  } else {
    if (o.ckpt.empty()) throw UsageError("--engine model requires --ckpt");
    auto model = genix::load_checkpoint<float>(o.ckpt);
    std::vector<genix::ModelJob> work;
    std::set<Task> unknown;
    for (const auto& j : jobs) {
      const TaskSpec* spec = nullptr;
      for (const auto& s : model.tasks)
        if (s.task == j.task) spec = &s;
      if (spec)
        work.push_back({j.doc, spec});
      else
        unknown.insert(j.task);
    }
    for (Task t : unknown) err << "warning: model has no prompt for task " << to_string(t) << "; skipped\n";
    preds = genix::extract_jobs(model, docs, work, o.jobs);
    for (const auto& p : preds)
      for (const auto& w : p.warnings) err << "warning: " << p.doc_id << ": " << w << '\n';
  }
  write_predictions(o.out, preds, out);
  return 0;
}

inline int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  auto specs = specs_from(o.tasks_file);
  DatasetSplit split;
  split.train = load_corpus(o.train_path, specs);
  if (split.train.empty()) throw Error("training corpus '" + o.train_path + "' is empty");
  genix::Model<float> model;
  if (!o.init_ckpt.empty()) {
    model = genix::load_checkpoint<float>(o.init_ckpt);
  } else {
    if (o.mode == "prompt") err << "warning: prompt-tuning without --init freezes a randomly initialised model\n";
    std::vector<std::string> texts;
    for (const auto& s : specs) texts.push_back(s.prompt_text);
    for (const auto& d : split.train) {
      texts.push_back(d.facts);
      texts.push_back(d.ruling);
    }
    genix::ModelConfig cfg;
    cfg.d_model = o.d_model;
    cfg.heads = o.heads;
    cfg.d_ff = o.d_ff;
    cfg.enc_layers = cfg.dec_layers = o.layers;
    cfg.prompt_len = o.prompt_len;
    model = genix::build_model<float>(genix::Vocab::build(texts), specs, o.seed, cfg);
  }
  nlohmann::json report;
  if (o.pretrain_epochs > 0) {
    std::vector<std::string> texts;
    for (const auto& d : split.train)
      for (const auto* s : {&d.facts, &d.ruling})
        if (!s->empty()) texts.push_back(*s);
    auto pre = genix::pretrain_span_corruption(model, texts, o.pretrain_epochs, o.seed);
    report["pretrain_loss"] = pre.loss_curve;
  }
  genix::TrainOptions opt;
  opt.mode = genix::parse_train_mode(o.mode);
  opt.epochs = o.epochs;
  opt.batch = o.batch;
  opt.lr = o.lr;
  opt.seed = o.seed;
  opt.on_epoch = [&](int epoch, double loss) {
    err << "epoch " << epoch << " loss " << loss << '\n';
    return true;
  };
  auto res = genix::train(model, split, opt);
  genix::save_checkpoint(o.out, model);
  report["mode"] = genix::to_string(opt.mode);
  report["epochs"] = res.epochs_run;
  report["loss"] = res.loss_curve;
  report["lr"] = opt.lr.value_or(genix::default_lr(opt.mode));
  out << report.dump() << '\n';
  return 0;
}

inline int cmd_eval(const Options& o, std::ostream& out) {
  auto specs = specs_from(o.tasks_file);
  auto gold = load_corpus(o.gold, specs);
  auto preds = load_extractions(o.pred, specs);
  auto report = evalkit::eval_dataset(specs, gold, preds);
  if (o.format == "table")
    out << evalkit::render_table(report);
  else
    out << evalkit::to_json(report).dump(2) << '\n';
  return 0;
}

inline int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  auto specs = specs_from(o.tasks_file);
  auto gold = load_corpus(o.gold, specs);
  auto preds = load_extractions(o.pred, specs);
  std::vector<Task> tasks = parse_tasks(o.only_tasks);
  if (tasks.empty()) {
    std::set<Task> seen;
    for (const auto& p : preds) seen.insert(p.task);
    tasks.assign(seen.begin(), seen.end());
  }
  if (tasks.empty()) throw Error("no predictions to calibrate on");
  confgate::GateConfig cfg;
  if (o.merge && !o.out.empty() && std::filesystem::exists(o.out)) cfg = confgate::load_gate(o.out);
  for (Task t : tasks) {
    auto g = confgate::calibrate_threshold(spec_for(specs, t), preds, gold, o.target_recall);
    if (!g.attainable)
      err << "warning: recall " << o.target_recall << " is not reachable for " << to_string(t) << " (best "
          << g.achieved.recall << "); threshold set to 0\n";
    cfg.tasks[t] = g;
  }
  auto text = confgate::to_json(cfg).dump(2) + "\n";
  if (o.out.empty() || o.out == "-")
    out << text;
  else
    write_text(o.out, text);
  return 0;
}

inline int cmd_gate(const Options& o, std::ostream& out) {
  auto preds = load_extractions(o.pred, specs_from(o.tasks_file));
  auto cfg = confgate::load_gate(o.gate);
  auto part = confgate::apply_gate(preds, cfg);
  write_predictions(o.out, part.retained, out);
  if (!o.rejected.empty()) save_extractions(o.rejected, part.rejected);
  if (!o.out.empty() && o.out != "-")
    out << nlohmann::json{{"retained", part.retained.size()}, {"rejected", part.rejected.size()}}.dump() << '\n';
  return 0;
}

inline int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  auto specs = specs_from(o.tasks_file);
  auto task = parse_task(o.analyze_task);
  if (!task || (*task != Task::drunk_driving && *task != Task::fraud))
    throw UsageError("--task must be drunk_driving or fraud");
  auto docs = load_corpus(o.corpus, specs);
  std::vector<Extraction> retained;
  if (!o.pred.empty()) {
    retained = load_extractions(o.pred, specs);
  } else {
    // rule engine with every extraction retained
    auto rules = o.rules.empty() ? rulex::default_ruleset() : rulex::load_ruleset(o.rules, specs);
    retained = rule_extract(specs, docs, rules, plan_jobs(docs, {*task, Task::ruling_criminal}), o.jobs, err);
  }
  auto res = stats::analyze(*task, docs, retained);
  stats::emit_report(res, o.out);
  write_text((std::filesystem::path(o.out) / "analysis.json").string(), stats::to_json(res).dump(2) + "\n");
  out << nlohmann::json{{"task", to_string(*task)}, {"records", res.records}, {"skipped", res.skipped.size()}}.dump()
      << '\n';
  return 0;
}

inline std::string render_analysis(const stats::AnalysisResult& r) {
  std::ostringstream os;
  os << "task " << to_string(r.task) << ", " << r.records << " records, " << r.skipped.size() << " skipped\n";
  auto means = [&](const std::vector<stats::MeanRow>& rows, const char* title) {
    if (rows.empty()) return;
    os << '\n' << title << '\n';
    os << std::left << std::setw(14) << "group" << std::setw(10) << "record" << std::setw(12) << "mean" << "n\n";
    for (const auto& m : rows) {
      std::ostringstream mean;
      if (m.mean_months) mean << std::fixed << std::setprecision(2) << *m.mean_months;
      os << std::setw(14) << m.group << std::setw(10) << (m.prior_record ? "w/" : "w/o") << std::setw(12)
         << mean.str() << m.n << '\n';
    }
  };
  means(r.yearly, "mean imprisonment (months) by year range");
  means(r.bac, "mean imprisonment (months) by BAC");
  if (!r.series.empty()) {
    os << "\nregressions on " << r.series.front().x_label << '\n';
    for (const auto& s : r.series) {
      os << "  " << s.name << ": ";
      if (s.fit)
        os << "slope " << stats::num(s.fit->slope) << ", intercept " << stats::num(s.fit->intercept) << ", r2 "
           << stats::num(s.fit->r_squared) << ", n " << s.fit->n << '\n';
      else
        os << "not enough points\n";
    }
  }
  if (!r.buckets.empty()) {
    os << "\nsentence type shares by loss bucket\n";
    for (const auto& b : r.buckets) {
      os << "  [" << stats::num(b.lo) << ", " << stats::num(b.hi) << ") n " << b.n;
      if (b.n)
        os << "  fine " << std::fixed << std::setprecision(3) << *b.fine << "  prison " << *b.prison
           << "  suspension " << *b.suspension << std::defaultfloat;
      os << '\n';
    }
  }
  return os.str();
}

inline int cmd_report(const Options& o, std::ostream& out) {
  if (o.analysis.empty() == o.eval_report.empty()) throw UsageError("give exactly one of --analysis or --eval");
  const auto& path = o.analysis.empty() ? o.eval_report : o.analysis;
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed report '" + path + "': " + e.what());
  }
  if (!o.analysis.empty())
    out << render_analysis(stats::analysis_from_json(j));
  else
    out << evalkit::render_table(evalkit::report_from_json(j));
  return 0;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Legal information extraction toolkit", "legalie"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  try {
    o.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  auto seeded = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed (default from " + std::string(seed_env) + " or 7)");
  };
  auto specs_opt = [&](CLI::App* c) {
    c->add_option("--tasks-file", o.tasks_file, "Task specs, one JSON object per line")->check(CLI::ExistingFile);
  };

  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic corpus with planted values");
  gen->add_option("--out", o.out, "Output corpus (JSONL)")->required();
  gen->add_option("--preset", o.preset, "benchmark or analysis")->check(CLI::IsMember({"benchmark", "analysis"}));
  gen->add_option("--per-task", o.per_task, "Documents per task (benchmark preset)");
  gen->add_option("--noise", o.noise, "Distractor rate")->check(CLI::Range(0.0, 1.0));
  gen->add_flag("--with-civil", o.with_civil, "Also generate civil rulings (benchmark preset)");
  gen->add_option("--drunk-driving", o.n_drunk, "Drunk-driving cases (analysis preset)");
  gen->add_option("--fraud", o.n_fraud, "Fraud cases (analysis preset)");
  gen->add_option("--config", o.config, "Synthesis config (JSON); overrides the preset")->check(CLI::ExistingFile);
  seeded(gen);

  auto* split = app.add_subcommand("split", "Split a corpus into train/valid/test");
  split->add_option("--corpus", o.corpus, "Input corpus")->required()->check(CLI::ExistingFile);
  split->add_option("--out-dir", o.out_dir, "Directory for train/valid/test.jsonl")->required();
  split->add_option("--train", o.n_train, "Training documents (20% become validation)");
  split->add_option("--test", o.n_test, "Test documents");
  split->add_flag("--pooled", o.pooled, "Split the corpus as a whole instead of per task");
  seeded(split);
  specs_opt(split);

  auto* ext = app.add_subcommand("extract", "Extract field values from a corpus");
  ext->add_option("--corpus", o.corpus, "Input corpus")->required()->check(CLI::ExistingFile);
  ext->add_option("--engine", o.engine, "rule or model")->check(CLI::IsMember({"rule", "model"}));
  ext->add_option("--rules", o.rules, "Ruleset file (rule engine)")->check(CLI::ExistingFile);
  ext->add_option("--ckpt", o.ckpt, "Model checkpoint (model engine)")->check(CLI::ExistingFile);
  ext->add_option("--out", o.out, "Predictions (JSONL); stdout when omitted");
  ext->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  ext->add_option("--task", o.only_tasks, "Restrict to these tasks");
  specs_opt(ext);

  auto* tr = app.add_subcommand("train", "Train the generative extractor");
  tr->add_option("--train", o.train_path, "Training corpus")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", o.out, "Output checkpoint")->required();
  tr->add_option("--mode", o.mode, "finetune or prompt")->check(CLI::IsMember({"finetune", "prompt"}));
  tr->add_option("--init", o.init_ckpt, "Start from this checkpoint")->check(CLI::ExistingFile);
  tr->add_option("--epochs", o.epochs, "Epochs")->check(CLI::NonNegativeNumber);
  tr->add_option("--batch", o.batch, "Batch size")->check(CLI::PositiveNumber);
  tr->add_option("--lr", o.lr, "Learning rate (default 1e-4 finetune, 1.0 prompt)")->check(CLI::PositiveNumber);
  tr->add_option("--pretrain-epochs", o.pretrain_epochs, "Span-corruption epochs on the training texts first")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--d-model", o.d_model, "Model width")->check(CLI::PositiveNumber);
  tr->add_option("--heads", o.heads, "Attention heads")->check(CLI::PositiveNumber);
  tr->add_option("--d-ff", o.d_ff, "Feed-forward width")->check(CLI::PositiveNumber);
  tr->add_option("--layers", o.layers, "Encoder and decoder layers")->check(CLI::NonNegativeNumber);
  tr->add_option("--prompt-len", o.prompt_len, "Soft prompt length")->check(CLI::NonNegativeNumber);
  seeded(tr);
  specs_opt(tr);

  auto* ev = app.add_subcommand("eval", "Score predictions against gold labels");
  ev->add_option("--gold", o.gold, "Gold corpus")->required()->check(CLI::ExistingFile);
  ev->add_option("--pred", o.pred, "Predictions (or a corpus)")->required()->check(CLI::ExistingFile);
  ev->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  specs_opt(ev);

  auto* cal = app.add_subcommand("calibrate", "Choose per-task confidence thresholds");
  cal->add_option("--gold", o.gold, "Validation corpus")->required()->check(CLI::ExistingFile);
  cal->add_option("--pred", o.pred, "Predictions on the validation corpus")->required()->check(CLI::ExistingFile);
  cal->add_option("--target-recall", o.target_recall, "Target recall in [0, 1]")->check(CLI::Range(0.0, 1.0));
  cal->add_option("--task", o.only_tasks, "Tasks to calibrate (default: all predicted)");
  cal->add_option("--out", o.out, "Gate config (JSON); stdout when omitted");
  cal->add_flag("--merge", o.merge, "Keep other tasks already in --out");
  specs_opt(cal);

  auto* gt = app.add_subcommand("gate", "Keep predictions at or above the task threshold");
  gt->add_option("--pred", o.pred, "Predictions")->required()->check(CLI::ExistingFile);
  gt->add_option("--gate", o.gate, "Gate config")->required()->check(CLI::ExistingFile);
  gt->add_option("--out", o.out, "Retained predictions; stdout when omitted");
  gt->add_option("--rejected", o.rejected, "Where to write rejected predictions");
  specs_opt(gt);

  auto* an = app.add_subcommand("analyze", "Aggregate sentencing statistics");
  an->add_option("--task", o.analyze_task, "drunk_driving or fraud")->required();
  an->add_option("--corpus", o.corpus, "Corpus (years come from its metadata)")->required()->check(CLI::ExistingFile);
  an->add_option("--pred", o.pred, "Retained extractions; the rule engine runs when omitted")
      ->check(CLI::ExistingFile);
  an->add_option("--rules", o.rules, "Ruleset for the built-in extraction")->check(CLI::ExistingFile);
  an->add_option("--out", o.out, "Output directory")->required();
  an->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  specs_opt(an);

  auto* rep = app.add_subcommand("report", "Render a saved analysis or evaluation as text");
  rep->add_option("--analysis", o.analysis, "analysis.json from analyze")->check(CLI::ExistingFile);
  rep->add_option("--eval", o.eval_report, "JSON report from eval")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_corpus(o, out);
    if (split->parsed()) return cmd_split(o, out);
    if (ext->parsed()) return cmd_extract(o, out, err);
    if (tr->parsed()) return cmd_train(o, out, err);
    if (ev->parsed()) return cmd_eval(o, out);
    if (cal->parsed()) return cmd_calibrate(o, out, err);
    if (gt->parsed()) return cmd_gate(o, out);
    if (an->parsed()) return cmd_analyze(o, out, err);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace legalie::cli
