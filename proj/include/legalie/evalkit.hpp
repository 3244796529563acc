#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/extraction.hpp"
#include "legalie/taskschema.hpp"
#include "legalie/text.hpp"

namespace legalie::evalkit {

struct Confusion {
  long long tp = 0, fp = 0, fn = 0, tn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

// 2tp / (2tp + fp + fn); undefined when tp + fp + fn = 0.
inline std::optional<double> f1(const Confusion& c) {
  long long denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return std::nullopt;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

struct MatchOptions {
  bool normalize = true;
};

inline std::vector<std::string> prepared(const FieldMap& m, const std::string& field, const MatchOptions& opt) {
  auto it = m.find(field);
  if (it == m.end()) return {};
  std::vector<std::string> out;
  for (const auto& v : it->second) out.push_back(opt.normalize ? text::normalize_value(v) : v);
  return out;
}

// Per-field confusion increments for one (gold, prediction) pair.
inline std::map<std::string, Confusion> match_fields(const TaskSpec& spec, const FieldMap& gt, const FieldMap& pr,
                                                     const MatchOptions& opt = {}) {
  for (const auto* m : {&gt, &pr})
    for (const auto& [name, values] : *m)
      if (!spec.find(name))
        throw Error("field '" + name + "' is not part of task " + std::string(to_string(spec.task)));

  std::map<std::string, Confusion> out;
  for (const auto& f : spec.fields) {
    auto g = prepared(gt, f.name, opt);
    auto p = prepared(pr, f.name, opt);
    Confusion c;
    if (g.empty() && p.empty()) {
      c.tn = 1;
    } else if (f.kind == FieldKind::scalar) {
      if (g.empty())
        c.fp = 1;
      else if (p.empty())
        c.fn = 1;
      else if (g == p)
        c.tp = 1;
      else
        c.fp = 1;
    } else {
      std::multiset<std::string> remaining(g.begin(), g.end());
      for (const auto& v : p) {
        auto it = remaining.find(v);
        if (it != remaining.end()) {
          ++c.tp;
          remaining.erase(it);
        } else {
          ++c.fp;
        }
      }
      c.fn = static_cast<long long>(remaining.size());
    }
    out[f.name] = c;
  }
  return out;
}

// Number of gold values (list fields count each value).
inline long long gold_value_count(const TaskSpec& spec, const FieldMap& gt) {
  long long n = 0;
  for (const auto& f : spec.fields) {
    auto it = gt.find(f.name);
    if (it == gt.end()) continue;
    n += f.kind == FieldKind::list ? static_cast<long long>(it->second.size()) : (it->second.empty() ? 0 : 1);
  }
  return n;
}

using FieldKey = std::pair<Task, std::string>;
using ConfusionTable = std::map<FieldKey, Confusion>;

struct FieldScore {
  Task task;
  std::string field;
  Confusion confusion;
  std::optional<double> f1;
};

struct EvalReport {
  std::vector<FieldScore> fields;                  // task order, then field order
  std::map<Task, std::optional<double>> task_f1;   // unweighted mean over defined fields
  std::optional<double> avg;                       // unweighted mean over all defined fields
  std::size_t pairs = 0;                           // evaluated (document, task) pairs

  const FieldScore* find(Task t, std::string_view field) const {
    for (const auto& f : fields)
      if (f.task == t && f.field == field) return &f;
    return nullptr;
  }
};

inline EvalReport compute_f1(const ConfusionTable& table, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  EvalReport r;
  double total = 0;
  int defined = 0;
  for (const auto& spec : specs) {
    double task_total = 0;
    int task_defined = 0;
    bool any = false;
    for (const auto& f : spec.fields) {
      auto it = table.find({spec.task, f.name});
      if (it == table.end()) continue;
      any = true;
      auto score = f1(it->second);
      r.fields.push_back({spec.task, f.name, it->second, score});
      if (score) {
        task_total += *score;
        ++task_defined;
        total += *score;
        ++defined;
      }
    }
    if (any) r.task_f1[spec.task] = task_defined ? std::optional<double>(task_total / task_defined) : std::nullopt;
  }
  if (defined) r.avg = total / defined;
  return r;
}

// Evaluates every gold document on its own category task, plus any other
// task a prediction exists for. A gold document without a prediction counts
// its present fields as false negatives.
inline ConfusionTable accumulate(const std::vector<TaskSpec>& specs, const std::vector<Document>& gold,
                                 const std::vector<Extraction>& preds, const MatchOptions& opt = {},
                                 std::size_t* pairs = nullptr) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : gold) by_id[d.id] = &d;
  std::map<std::pair<std::string, Task>, const Extraction*> pred_index;
  for (const auto& p : preds) {
    if (!by_id.count(p.doc_id)) throw Error("prediction for unknown document id '" + p.doc_id + "'");
    if (!pred_index.emplace(std::make_pair(p.doc_id, p.task), &p).second)
      throw Error("duplicate prediction for document '" + p.doc_id + "' task " + std::string(to_string(p.task)));
  }

  ConfusionTable table;
  std::size_t n = 0;
  for (const auto& d : gold) {
    std::set<Task> tasks{d.category};
    for (Task t : all_tasks)
      if (pred_index.count({d.id, t})) tasks.insert(t);
    for (Task t : tasks) {
      const auto& spec = spec_for(specs, t);
      auto gt = labels_for(d, spec);
      auto it = pred_index.find({d.id, t});
      FieldMap pr = it == pred_index.end() ? FieldMap{} : it->second->fields;
      for (const auto& [field, c] : match_fields(spec, gt, pr, opt)) table[{t, field}] += c;
      ++n;
    }
  }
  if (pairs) *pairs = n;
  return table;
}

inline EvalReport eval_dataset(const std::vector<TaskSpec>& specs, const std::vector<Document>& gold,
                               const std::vector<Extraction>& preds, const MatchOptions& opt = {}) {
  std::size_t pairs = 0;
  auto table = accumulate(specs, gold, preds, opt, &pairs);
  auto report = compute_f1(table, specs);
  report.pairs = pairs;
  return report;
}

// --- output ---

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : r.fields)
    fields.push_back({{"task", to_string(f.task)},
                      {"field", f.field},
                      {"tp", f.confusion.tp},
                      {"fp", f.confusion.fp},
                      {"fn", f.confusion.fn},
                      {"tn", f.confusion.tn},
                      {"f1", opt_json(f.f1)}});
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [t, v] : r.task_f1) tasks[std::string(to_string(t))] = opt_json(v);
  return {{"fields", fields}, {"tasks", tasks}, {"avg", opt_json(r.avg)}, {"pairs", r.pairs}};
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  for (const auto& f : j.at("fields")) {
    FieldScore s{task_from_string(f.at("task").get<std::string>()), f.at("field").get<std::string>(),
                 {f.at("tp").get<long long>(), f.at("fp").get<long long>(), f.at("fn").get<long long>(),
                  f.at("tn").get<long long>()},
                 std::nullopt};
    if (!f.at("f1").is_null()) s.f1 = f.at("f1").get<double>();
    r.fields.push_back(std::move(s));
  }
  for (const auto& [k, v] : j.at("tasks").items())
    r.task_f1[task_from_string(k)] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  if (!j.at("avg").is_null()) r.avg = j.at("avg").get<double>();
  r.pairs = j.value("pairs", std::size_t{0});
  return r;
}

inline std::string pct(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * *v;
  return os.str();
}

// One wide row of F1 x 100 (AVG, then every field grouped by task),
// followed by the per-field confusion counts.
inline std::string render_table(const EvalReport& r, const std::string& row_name = "model") {
  std::vector<std::string> header{"Name", "AVG"};
  std::vector<std::string> row{row_name, pct(r.avg)};
  for (const auto& f : r.fields) {
    header.push_back(std::string(to_string(f.task)).substr(0, 5) + ":" + f.field);
    row.push_back(pct(f.f1));
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto w = std::max(header[i].size(), row[i].size());
    os << (i ? "  " : "") << std::setw(static_cast<int>(w)) << header[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto w = std::max(header[i].size(), row[i].size());
    os << (i ? "  " : "") << std::setw(static_cast<int>(w)) << row[i];
  }
  os << "\n\n";
  os << std::left << std::setw(17) << "task" << std::setw(19) << "field" << std::right << std::setw(7) << "tp"
     << std::setw(7) << "fp" << std::setw(7) << "fn" << std::setw(7) << "tn" << std::setw(8) << "F1" << '\n';
  for (const auto& f : r.fields)
    os << std::left << std::setw(17) << to_string(f.task) << std::setw(19) << f.field << std::right << std::setw(7)
       << f.confusion.tp << std::setw(7) << f.confusion.fp << std::setw(7) << f.confusion.fn << std::setw(7)
       << f.confusion.tn << std::setw(8) << pct(f.f1) << '\n';
  for (const auto& [t, v] : r.task_f1)
    os << std::left << std::setw(17) << to_string(t) << std::setw(19) << "(mean)" << std::right << std::setw(36)
       << pct(v) << '\n';
  os << std::left << std::setw(36) << "AVG" << std::right << std::setw(36) << pct(r.avg) << '\n';
  return os.str();
}

}  // namespace legalie::evalkit
