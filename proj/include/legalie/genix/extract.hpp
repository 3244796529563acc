#pragma once

#include <atomic>
#include <algorithm>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "legalie/corpus.hpp"
#include "legalie/extraction.hpp"
#include "legalie/genix/model.hpp"
#include "legalie/parallel.hpp"
#include "legalie/text.hpp"

namespace legalie::genix {

template <typename T>
Extraction extract_with_model(const Model<T>& m, const TaskSpec& spec, const Document& doc) {
  const auto& src = doc.source(source_of(spec.task));
  Extraction e;
  e.doc_id = doc.id;
  e.task = spec.task;
  e.provenance = Provenance::model;
  if (src.empty()) {
    // nothing to read: predict every field absent
    e.confidence = 1.0;
    e.warnings.push_back("empty source text");
    return e;
  }
  auto g = generate_with_confidence(m, spec, src);
  auto parsed = delinearize(spec, g.text);
  e.fields = std::move(parsed.fields);
  e.malformed = parsed.malformed;
  e.confidence = g.confidence;
  if (g.truncated) e.warnings.push_back("source truncated to " + std::to_string(m.cfg.max_src) + " characters");
  if (g.tokens.empty() || g.tokens.back() != Vocab::eos) e.warnings.push_back("no end of sequence before length limit");
  return e;
}

struct ModelJob {
  std::size_t doc;
  const TaskSpec* spec;
};

// The model is read-only during decoding, so jobs can share it.
template <typename T>
std::vector<Extraction> extract_jobs(const Model<T>& m, const std::vector<Document>& docs,
                                     const std::vector<ModelJob>& work, int jobs = 1) {
  return parallel_map<Extraction>(work.size(), jobs,
                                  [&](std::size_t i) { return extract_with_model(m, *work[i].spec, docs[work[i].doc]); });
}

struct ExactMatch {
  long long matched = 0;
  long long total = 0;
  double rate() const { return total ? static_cast<double>(matched) / static_cast<double>(total) : 1.0; }
};

// A field matches when the normalized value multisets agree (absent == absent).
inline void add_exact_match(ExactMatch& em, const TaskSpec& spec, const FieldMap& gold, const FieldMap& pred) {
  auto norm = [](const FieldMap& m, const std::string& f) {
    std::vector<std::string> v;
    if (auto it = m.find(f); it != m.end())
      for (const auto& s : it->second) v.push_back(text::normalize_value(s));
    std::sort(v.begin(), v.end());
    return v;
  };
  for (const auto& f : spec.fields) {
    ++em.total;
    if (norm(gold, f.name) == norm(pred, f.name)) ++em.matched;
  }
}

}  // namespace legalie::genix
