// Independent reference implementations used to check the library. They are
// written the slow, obvious way and share no code with the code under test.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legalie/corpus.hpp"
#include "legalie/extraction.hpp"
#include "legalie/rng.hpp"
#include "legalie/taskschema.hpp"

namespace oracle {

using legalie::Document;
using legalie::Extraction;
using legalie::FieldKind;
using legalie::FieldMap;
using legalie::Task;
using legalie::TaskSpec;

inline std::string norm(const std::string& v) {
  std::string out;
  bool pending_space = false;
  for (char c : v) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

struct Counts {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
};

// Enumerates every (gold value, predicted value) pair and greedily pairs
// equal ones, one at a time.
inline Counts pairwise(FieldKind kind, std::vector<std::string> g, std::vector<std::string> p) {
  for (auto& v : g) v = norm(v);
  for (auto& v : p) v = norm(v);
  Counts c;
  if (g.empty() && p.empty()) {
    c.tn = 1;
    return c;
  }
  if (kind == FieldKind::scalar) {
    if (g.empty()) c.fp = 1;
    else if (p.empty()) c.fn = 1;
    else if (g[0] == p[0]) c.tp = 1;
    else c.fp = 1;
    return c;
  }
  std::vector<bool> gold_used(g.size(), false), pred_used(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!pred_used[i] && !gold_used[j] && p[i] == g[j]) {
        pred_used[i] = gold_used[j] = true;
        ++c.tp;
      }
  c.fp = static_cast<long long>(std::count(pred_used.begin(), pred_used.end(), false));
  c.fn = static_cast<long long>(std::count(gold_used.begin(), gold_used.end(), false));
  return c;
}

inline std::vector<std::string> values(const FieldMap& m, const std::string& f) {
  auto it = m.find(f);
  return it == m.end() ? std::vector<std::string>{} : it->second;
}

struct FieldResult {
  Counts counts;
  std::optional<double> f1;
};

// (task, field) -> counts over gold documents paired with predictions by id.
inline std::map<std::pair<Task, std::string>, FieldResult> brute_force(const std::vector<TaskSpec>& specs,
                                                                        const std::vector<Document>& gold,
                                                                        const std::vector<Extraction>& preds) {
  std::map<std::pair<Task, std::string>, FieldResult> out;
  for (const auto& d : gold) {
    for (const auto& spec : specs) {
      const Extraction* pred = nullptr;
      for (const auto& p : preds)
        if (p.doc_id == d.id && p.task == spec.task) pred = &p;
      if (spec.task != d.category && !pred) continue;
      for (const auto& f : spec.fields) {
        auto g = values(d.labels, f.name);
        auto p = pred ? values(pred->fields, f.name) : std::vector<std::string>{};
        auto c = pairwise(f.kind, g, p);
        auto& r = out[{spec.task, f.name}].counts;
        r.tp += c.tp;
        r.fp += c.fp;
        r.fn += c.fn;
        r.tn += c.tn;
      }
    }
  }
  for (auto& [k, r] : out) {
    long long den = 2 * r.counts.tp + r.counts.fp + r.counts.fn;
    if (den) r.f1 = 2.0 * static_cast<double>(r.counts.tp) / static_cast<double>(den);
  }
  return out;
}

// Random fixture: up to 3 fields per task, up to 4 list values, values drawn
// from a small pool with case/whitespace/period variants so normalization
// and duplicates matter.
struct Fixture {
  std::vector<TaskSpec> specs;
  std::vector<Document> gold;
  std::vector<Extraction> preds;
};

inline Fixture random_fixture(legalie::Rng& rng) {
  static const std::vector<std::string> pool{"a", "A", " a ", "b", "b.", "c", "20m", "20 m", "x y", "x  y"};
  Fixture fx;
  std::vector<Task> tasks{Task::drunk_driving, Task::fraud};
  for (Task t : tasks) {
    TaskSpec s;
    s.task = t;
    s.prompt_text = "t";
    auto nf = rng.range(1, 3);
    for (long long i = 0; i < nf; ++i) {
      legalie::FieldSchema f;
      f.name = std::string(legalie::to_string(t)) + "_f" + std::to_string(i);
      f.kind = rng.bernoulli(0.5) ? FieldKind::list : FieldKind::scalar;
      f.value_class = legalie::ValueClass::vehicle;
      f.phrase = "p" + std::to_string(i);
      s.fields.push_back(f);
    }
    fx.specs.push_back(s);
  }
  auto draw = [&](const legalie::FieldSchema& f) {
    std::vector<std::string> v;
    long long n = f.kind == FieldKind::list ? rng.range(0, 4) : rng.range(0, 1);
    for (long long i = 0; i < n; ++i) v.push_back(rng.pick(pool));
    return v;
  };
  auto ndocs = rng.range(1, 6);
  for (long long i = 0; i < ndocs; ++i) {
    Document d;
    d.id = "d" + std::to_string(i);
    d.category = tasks[rng.below(tasks.size())];
    for (const auto& f : fx.specs[d.category == Task::fraud ? 1 : 0].fields)
      if (auto v = draw(f); !v.empty()) d.labels[f.name] = v;
    fx.gold.push_back(d);
    for (const auto& spec : fx.specs) {
      // a prediction for the own task most of the time, occasionally a stray one
      double p = spec.task == d.category ? 0.8 : 0.1;
      if (!rng.bernoulli(p)) continue;
      Extraction e;
      e.doc_id = d.id;
      e.task = spec.task;
      for (const auto& f : spec.fields) {
        std::vector<std::string> v;
        if (rng.bernoulli(0.5)) v = values(d.labels, f.name);
        else v = draw(f);
        if (!v.empty()) e.fields[f.name] = v;
      }
      fx.preds.push_back(e);
    }
  }
  return fx;
}

// Exhaustive recall scan over 0 and every observed confidence.
struct ScanItem {
  double confidence;
  long long tp;
};

inline double recall_at(const std::vector<ScanItem>& items, long long gold_values, double theta) {
  long long tp = 0;
  for (const auto& it : items)
    if (it.confidence >= theta) tp += it.tp;
  return gold_values ? static_cast<double>(tp) / static_cast<double>(gold_values) : 1.0;
}

inline double largest_threshold(const std::vector<ScanItem>& items, long long gold_values, double target) {
  std::vector<double> grid{0.0};
  for (const auto& it : items) grid.push_back(it.confidence);
  double best = -1;
  for (double t : grid)
    if (recall_at(items, gold_values, t) >= target) best = std::max(best, t);
  return best < 0 ? 0.0 : best;
}

// Plain normal-equation least squares.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

// Months in a rendered duration such as "1 year and 6 months" or "8 months".
inline std::optional<double> months_of(const std::string& s) {
  double total = 0;
  bool any = false;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    double n = std::stod(s.substr(i, j - i));
    std::string rest = s.substr(j);
    auto pos = rest.find_first_not_of(' ');
    if (pos == std::string::npos) return std::nullopt;
    if (rest.compare(pos, 4, "year") == 0) total += 12 * n;
    else if (rest.compare(pos, 5, "month") == 0) total += n;
    else return std::nullopt;
    any = true;
    i = j;
  }
  return any ? std::optional<double>(total) : std::nullopt;
}

inline long long won_of(const std::string& s) {
  long long v = 0;
  for (char c : s)
    if (std::isdigit(static_cast<unsigned char>(c))) v = v * 10 + (c - '0');
  return v;
}

}  // namespace oracle
