#pragma once

#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/error.hpp"
#include "legalie/rng.hpp"
#include "legalie/taskschema.hpp"

namespace legalie {

// One precedent. `category` names the facts task (or a ruling task for
// ruling-only documents). Criminal facts documents may also carry
// ruling_criminal labels when their ruling text is annotated.
struct Document {
  std::string id;
  Task category = Task::drunk_driving;
  std::string facts;
  std::string ruling;
  int year = 2020;
  FieldMap labels;

  bool operator==(const Document&) const = default;

  const std::string& source(SourceSection s) const { return s == SourceSection::facts ? facts : ruling; }
};

// Tasks whose gold labels a document can carry.
inline std::vector<Task> label_tasks(const Document& doc) {
  std::vector<Task> out{doc.category};
  if (source_of(doc.category) == SourceSection::facts && !doc.ruling.empty())
    out.push_back(Task::ruling_criminal);
  return out;
}

// Labels restricted to the fields of `spec`.
inline FieldMap labels_for(const Document& doc, const TaskSpec& spec) {
  FieldMap out;
  for (const auto& f : spec.fields) {
    auto it = doc.labels.find(f.name);
    if (it != doc.labels.end() && !it->second.empty()) out[f.name] = it->second;
  }
  return out;
}

inline void validate_document(const Document& doc, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  if (doc.id.empty()) throw Error("document id must be non-empty");
  if (doc.year < 1990 || doc.year > 2100)
    throw Error("document " + doc.id + ": year " + std::to_string(doc.year) + " outside [1990, 2100]");
  auto tasks = label_tasks(doc);
  for (const auto& [name, values] : doc.labels) {
    bool known = false;
    for (Task t : tasks)
      if (spec_for(specs, t).find(name)) known = true;
    if (!known)
      throw Error("document " + doc.id + ": label '" + name + "' not permitted for category " +
                  std::string(to_string(doc.category)));
  }
}

inline nlohmann::json to_json(const Document& doc) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [k, v] : doc.labels)
    if (!v.empty()) labels[k] = v;
  return {{"id", doc.id},
          {"category", to_string(doc.category)},
          {"facts", doc.facts},
          {"ruling", doc.ruling},
          {"year", doc.year},
          {"labels", labels}};
}

inline Document document_from_json(const nlohmann::json& j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  doc.category = task_from_string(j.at("category").get<std::string>());
  doc.facts = j.value("facts", "");
  doc.ruling = j.value("ruling", "");
  doc.year = j.at("year").get<int>();
  if (j.contains("labels"))
    for (const auto& [k, v] : j.at("labels").items()) {
      auto values = v.get<std::vector<std::string>>();
      if (!values.empty()) doc.labels[k] = std::move(values);
    }
  return doc;
}

inline std::vector<Document> parse_corpus(std::istream& in, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    Document doc;
    try {
      doc = document_from_json(nlohmann::json::parse(line));
      validate_document(doc, specs);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!seen.insert(doc.id).second) throw ParseError("duplicate document id '" + doc.id + "'", lineno);
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<Document> load_corpus(const std::string& path, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus '" + path + "'");
  return parse_corpus(in, specs);
}

inline void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

inline void save_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus '" + path + "'");
  write_corpus(out, docs);
  if (!out) throw Error("write failed for '" + path + "'");
}

struct DatasetSplit {
  std::vector<Document> train;
  std::vector<Document> valid;
  std::vector<Document> test;
};

// round(n / 5) in integer arithmetic
inline std::size_t validation_size(std::size_t n_train) { return (2 * n_train + 5) / 10; }

inline DatasetSplit split_dataset(const std::vector<Document>& docs, std::size_t n_train, std::size_t n_test,
                                  std::uint64_t seed) {
  if (n_train + n_test > docs.size())
    throw Error("split needs " + std::to_string(n_train + n_test) + " documents but only " +
                std::to_string(docs.size()) + " are available");
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  DatasetSplit split;
  std::size_t n_valid = validation_size(n_train);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n_test; ++i) split.test.push_back(docs[order[pos++]]);
  for (std::size_t i = 0; i < n_train - n_valid; ++i) split.train.push_back(docs[order[pos++]]);
  for (std::size_t i = 0; i < n_valid; ++i) split.valid.push_back(docs[order[pos++]]);
  return split;
}

// Applies split_dataset per category so every task gets n_train/n_test
// documents; categories absent from `docs` are skipped.
inline DatasetSplit split_per_task(const std::vector<Document>& docs, std::size_t n_train, std::size_t n_test,
                                   std::uint64_t seed) {
  DatasetSplit out;
  for (Task t : all_tasks) {
    std::vector<Document> subset;
    for (const auto& d : docs)
      if (d.category == t) subset.push_back(d);
    if (subset.empty()) continue;
    auto s = split_dataset(subset, n_train, n_test, seed + static_cast<std::uint64_t>(t));
    for (auto* part : {&s.train, &s.valid, &s.test}) {
      auto& dst = part == &s.train ? out.train : part == &s.valid ? out.valid : out.test;
      dst.insert(dst.end(), part->begin(), part->end());
    }
  }
  return out;
}

}  // namespace legalie
