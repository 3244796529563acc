#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/corpus.hpp"
#include "legalie/taskschema.hpp"

namespace legalie {

enum class Provenance { rule, model, gold };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::rule: return "rule";
    case Provenance::model: return "model";
    case Provenance::gold: return "gold";
  }
  return "?";
}

struct Extraction {
  std::string doc_id;
  Task task = Task::drunk_driving;
  FieldMap fields;
  double confidence = 1.0;
  Provenance provenance = Provenance::rule;
  bool malformed = false;
  std::vector<std::string> warnings;

  bool operator==(const Extraction&) const = default;
};

inline nlohmann::json to_json(const Extraction& e) {
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [k, v] : e.fields)
    if (!v.empty()) fields[k] = v;
  nlohmann::json j{{"id", e.doc_id},
                   {"task", to_string(e.task)},
                   {"fields", fields},
                   {"confidence", e.confidence},
                   {"provenance", to_string(e.provenance)}};
  if (e.malformed) j["malformed"] = true;
  if (!e.warnings.empty()) j["warnings"] = e.warnings;
  return j;
}

inline Extraction extraction_from_json(const nlohmann::json& j) {
  Extraction e;
  e.doc_id = j.at("id").get<std::string>();
  e.task = task_from_string(j.at("task").get<std::string>());
  for (const auto& [k, v] : j.at("fields").items()) {
    auto values = v.get<std::vector<std::string>>();
    if (!values.empty()) e.fields[k] = std::move(values);
  }
  e.confidence = j.value("confidence", 1.0);
  auto prov = j.value("provenance", "rule");
  e.provenance = prov == "model" ? Provenance::model : prov == "gold" ? Provenance::gold : Provenance::rule;
  e.malformed = j.value("malformed", false);
  if (j.contains("warnings")) e.warnings = j.at("warnings").get<std::vector<std::string>>();
  return e;
}

// Gold labels viewed as (perfect) predictions, one per labelled task.
inline std::vector<Extraction> gold_as_extractions(const std::vector<Document>& docs,
                                                   const std::vector<TaskSpec>& specs = builtin_tasks()) {
  std::vector<Extraction> out;
  for (const auto& d : docs)
    for (Task t : label_tasks(d)) {
      const auto& spec = spec_for(specs, t);
      auto fields = labels_for(d, spec);
      if (t != d.category && fields.empty()) continue;
      out.push_back({d.id, t, std::move(fields), 1.0, Provenance::gold, false, {}});
    }
  return out;
}

// Accepts either extraction lines or corpus lines (the latter are read as
// gold-provenance extractions).
inline std::vector<Extraction> load_extractions(const std::string& path,
                                                const std::vector<TaskSpec>& specs = builtin_tasks()) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions '" + path + "'");
  std::vector<Extraction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.contains("labels") && j.contains("category")) {
        auto doc = document_from_json(j);
        auto gold = gold_as_extractions({doc}, specs);
        out.insert(out.end(), gold.begin(), gold.end());
      } else {
        out.push_back(extraction_from_json(j));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed prediction: ") + e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

inline void save_extractions(const std::string& path, const std::vector<Extraction>& preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write predictions '" + path + "'");
  for (const auto& e : preds) out << to_json(e).dump() << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace legalie
