#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/evalkit.hpp"
#include "legalie/extraction.hpp"

namespace legalie::confgate {

struct Achieved {
  double coverage = 0;   // retained documents / all documents
  double precision = 0;  // field-level, over retained documents
  double recall = 0;     // retained TP / all gold values
  std::size_t retained = 0;
  std::size_t total = 0;
  // document level: a prediction counts only when every field is right
  double doc_precision = 0;
  double doc_recall = 0;
};

struct TaskGate {
  double threshold = 0.0;
  double target_recall = 0.0;
  Achieved achieved;
  bool attainable = true;
};

struct GateConfig {
  std::map<Task, TaskGate> tasks;
};

struct Scored {
  double confidence;
  long long tp;
  long long fp;
  bool exact;
};

struct ScoredSet {
  std::vector<Scored> items;
  long long gold_values = 0;  // recall denominator, field level
  long long gold_docs = 0;    // recall denominator, document level
};

// Per-prediction TP/FP counts against gold plus the recall denominators.
inline ScoredSet score_predictions(const TaskSpec& spec, const std::vector<Extraction>& preds,
                                   const std::vector<Document>& gold, const evalkit::MatchOptions& opt = {}) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : gold) by_id[d.id] = &d;
  ScoredSet out;
  std::set<std::string> seen;
  for (const auto& p : preds) {
    if (p.task != spec.task) continue;
    auto it = by_id.find(p.doc_id);
    if (it == by_id.end()) throw Error("prediction for unknown document id '" + p.doc_id + "'");
    if (!(p.confidence > 0.0 && p.confidence <= 1.0))
      throw Error("confidence of '" + p.doc_id + "' outside (0, 1]");
    seen.insert(p.doc_id);
    auto gt = labels_for(*it->second, spec);
    out.gold_values += evalkit::gold_value_count(spec, gt);
    ++out.gold_docs;
    Scored s{p.confidence, 0, 0, true};
    for (const auto& [f, c] : evalkit::match_fields(spec, gt, p.fields, opt)) {
      s.tp += c.tp;
      s.fp += c.fp;
      if (c.fp || c.fn) s.exact = false;
    }
    out.items.push_back(s);
  }
  // gold documents of this task that have no prediction still count towards recall
  for (const auto& d : gold)
    if (d.category == spec.task && !seen.count(d.id)) {
      out.gold_values += evalkit::gold_value_count(spec, labels_for(d, spec));
      ++out.gold_docs;
    }
  return out;
}

inline Achieved achieved_at(const ScoredSet& scored, double threshold) {
  Achieved a;
  a.total = scored.items.size();
  long long tp = 0, fp = 0, exact = 0;
  for (const auto& s : scored.items)
    if (s.confidence >= threshold) {
      ++a.retained;
      tp += s.tp;
      fp += s.fp;
      exact += s.exact;
    }
  auto ratio = [](long long n, long long d, double empty) {
    return d ? static_cast<double>(n) / static_cast<double>(d) : empty;
  };
  a.coverage = ratio(static_cast<long long>(a.retained), static_cast<long long>(a.total), 0.0);
  a.precision = ratio(tp, tp + fp, 1.0);
  a.recall = ratio(tp, scored.gold_values, 1.0);
  a.doc_precision = ratio(exact, static_cast<long long>(a.retained), 1.0);
  a.doc_recall = ratio(exact, scored.gold_docs, 1.0);
  return a;
}

// Largest threshold among {observed confidences} U {0} whose recall reaches
// the target. recall(theta) is a step function, so the finite candidate set
// is exhaustive.
inline TaskGate calibrate_threshold(const TaskSpec& spec, const std::vector<Extraction>& preds,
                                    const std::vector<Document>& gold, double target_recall,
                                    const evalkit::MatchOptions& opt = {}) {
  if (target_recall < 0.0 || target_recall > 1.0) throw Error("target recall must lie in [0, 1]");
  auto scored = score_predictions(spec, preds, gold, opt);
  if (scored.items.empty())
    throw Error("no predictions for task " + std::string(to_string(spec.task)) + " to calibrate on");

  std::vector<double> candidates{0.0};
  for (const auto& s : scored.items) candidates.push_back(s.confidence);
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  TaskGate gate;
  gate.target_recall = target_recall;
  for (double theta : candidates) {
    auto a = achieved_at(scored, theta);
    if (a.recall >= target_recall) {
      gate.threshold = theta;
      gate.achieved = a;
      return gate;
    }
  }
  gate.threshold = 0.0;
  gate.achieved = achieved_at(scored, 0.0);
  gate.attainable = false;
  return gate;
}

struct Partition {
  std::vector<Extraction> retained;
  std::vector<Extraction> rejected;
};

inline Partition apply_gate(const std::vector<Extraction>& preds, const GateConfig& cfg) {
  Partition out;
  for (const auto& p : preds) {
    auto it = cfg.tasks.find(p.task);
    if (it == cfg.tasks.end()) throw Error("gate has no threshold for task " + std::string(to_string(p.task)));
    (p.confidence >= it->second.threshold ? out.retained : out.rejected).push_back(p);
  }
  return out;
}

// --- JSON ---

inline nlohmann::json to_json(const GateConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [t, g] : cfg.tasks)
    j[std::string(to_string(t))] = {{"threshold", g.threshold},
                                    {"target_recall", g.target_recall},
                                    {"attainable", g.attainable},
                                    {"achieved",
                                     {{"coverage", g.achieved.coverage},
                                      {"precision", g.achieved.precision},
                                      {"recall", g.achieved.recall},
                                      {"doc_precision", g.achieved.doc_precision},
                                      {"doc_recall", g.achieved.doc_recall},
                                      {"retained", g.achieved.retained},
                                      {"total", g.achieved.total}}}};
  return {{"gates", j}};
}

inline GateConfig gate_from_json(const nlohmann::json& j) {
  GateConfig cfg;
  for (const auto& [k, v] : j.at("gates").items()) {
    TaskGate g;
    g.threshold = v.at("threshold").get<double>();
    if (g.threshold < 0.0 || g.threshold > 1.0)
      throw Error("threshold for " + k + " outside the probability range [0, 1]");
    g.target_recall = v.value("target_recall", 0.0);
    g.attainable = v.value("attainable", true);
    if (v.contains("achieved")) {
      const auto& a = v.at("achieved");
      g.achieved = {a.value("coverage", 0.0), a.value("precision", 0.0), a.value("recall", 0.0),
                    a.value("retained", std::size_t{0}), a.value("total", std::size_t{0}),
                    a.value("doc_precision", 0.0),       a.value("doc_recall", 0.0)};
    }
    cfg.tasks[task_from_string(k)] = g;
  }
  return cfg;
}

inline GateConfig load_gate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gate config '" + path + "'");
  try {
    return gate_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed gate config '" + path + "': " + e.what());
  }
}

}  // namespace legalie::confgate
