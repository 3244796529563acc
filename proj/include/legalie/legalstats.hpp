#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/extraction.hpp"
#include "legalie/rulex.hpp"

namespace legalie::stats {

enum class SentenceType { fine, prison, suspension_of_execution };

inline std::string_view to_string(SentenceType s) {
  switch (s) {
    case SentenceType::fine: return "fine";
    case SentenceType::prison: return "prison";
    case SentenceType::suspension_of_execution: return "suspension_of_execution";
  }
  return "?";
}

struct CaseRecord {
  std::string id;
  int year = 0;
  SentenceType sentence_type = SentenceType::fine;
  std::optional<double> imprisonment_months;
  std::optional<long long> fine_amount;
  std::optional<long long> loss_total;
  std::optional<bool> prior_record;
  std::optional<double> bac;
};

// suspension > prison > fine
inline SentenceType sentence_type(bool fine, bool imprisonment, bool suspension) {
  if (!fine && !imprisonment) throw Error("ruling has neither fine nor imprisonment; record not analyzable");
  if (suspension) return SentenceType::suspension_of_execution;
  if (imprisonment) return SentenceType::prison;
  return SentenceType::fine;
}

struct Normalized {
  std::optional<CaseRecord> record;
  std::string skip_reason;
};

namespace detail {

inline const std::string* scalar(const Extraction& e, const std::string& field) {
  auto it = e.fields.find(field);
  return it == e.fields.end() || it->second.empty() ? nullptr : &it->second.front();
}

inline Normalized skip(std::string reason) { return {std::nullopt, std::move(reason)}; }

}  // namespace detail

// Facts extraction (drunk_driving / embezzlement / fraud) plus the
// ruling_criminal extraction of the same document. Never throws on bad
// values: the record is skipped with a reason instead.
inline Normalized normalize_record(const Extraction& facts, const Extraction& ruling, int year) {
  CaseRecord rec;
  rec.id = facts.doc_id;
  rec.year = year;

  if (facts.task == Task::drunk_driving) {
    if (const auto* v = detail::scalar(facts, "bac")) {
      auto f = rulex::percentage_fraction(*v);
      if (!f) return detail::skip("unparseable bac '" + *v + "'");
      rec.bac = *f;
    }
    // no record clause in the facts means no prior record
    rec.prior_record = false;
    if (const auto* v = detail::scalar(facts, "prior_record")) {
      try {
        std::size_t used = 0;
        int n = std::stoi(*v, &used);
        if (used != text::trim(*v).size() || n < 0) throw std::invalid_argument("count");
        rec.prior_record = n > 0;
      } catch (const std::exception&) {
        return detail::skip("unparseable prior_record '" + *v + "'");
      }
    }
  } else {
    long long total = 0;
    bool any = false;
    for (const auto& [field, values] : facts.fields)
      for (const auto& v : values) {
        auto amount = rulex::money_amount(v);
        if (!amount) return detail::skip("unparseable " + field + " value '" + v + "'");
        total += *amount;
        any = true;
      }
    if (any) rec.loss_total = total;
  }

  bool has_fine = false, has_prison = false, has_susp = false;
  if (const auto* v = detail::scalar(ruling, "fine")) {
    auto amount = rulex::money_amount(*v);
    if (!amount) return detail::skip("unparseable fine '" + *v + "'");
    rec.fine_amount = *amount;
    has_fine = true;
  }
  if (const auto* v = detail::scalar(ruling, "imprisonment")) {
    auto d = rulex::parse_duration(*v);
    if (d.size() != 1 || !d.front().months || d.front().raw != text::trim(*v))
      return detail::skip("unparseable imprisonment '" + *v + "'");
    rec.imprisonment_months = *d.front().months;
    has_prison = true;
  }
  if (detail::scalar(ruling, "suspension")) has_susp = true;
  if (!has_fine && !has_prison) return detail::skip("ruling has neither fine nor imprisonment");
  rec.sentence_type = sentence_type(has_fine, has_prison, has_susp);
  return {rec, {}};
}

// ----------------------------------------------------------------------------

struct YearRange {
  int from;
  int to;
};

struct MeanRow {
  std::string group;  // "2017-2018" or "0.05%-0.08%"
  bool prior_record = false;
  std::optional<double> mean_months;
  std::size_t n = 0;
};

inline std::string year_label(const YearRange& r) { return std::to_string(r.from) + "-" + std::to_string(r.to); }

// Unweighted mean imprisonment months per (year range, prior record).
inline std::vector<MeanRow> yearly_means(const std::vector<CaseRecord>& records, const std::vector<YearRange>& ranges) {
  std::vector<MeanRow> out;
  for (const auto& r : ranges)
    for (bool rec : {false, true}) {
      MeanRow row{year_label(r), rec, std::nullopt, 0};
      double sum = 0;
      for (const auto& c : records)
        if (c.imprisonment_months && c.prior_record && *c.prior_record == rec && c.year >= r.from && c.year <= r.to) {
          sum += *c.imprisonment_months;
          ++row.n;
        }
      if (row.n) row.mean_months = sum / static_cast<double>(row.n);
      out.push_back(row);
    }
  return out;
}

// Mean imprisonment by BAC bin; `edges` are fractions (0.0005 = 0.05%).
inline std::vector<MeanRow> bac_means(const std::vector<CaseRecord>& records, const std::vector<double>& edges) {
  std::vector<MeanRow> out;
  auto pct = [](double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * f);
    return std::string(buf);
  };
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    for (bool rec : {false, true}) {
      MeanRow row{pct(edges[i]) + "-" + pct(edges[i + 1]), rec, std::nullopt, 0};
      double sum = 0;
      for (const auto& c : records)
        if (c.imprisonment_months && c.bac && c.prior_record && *c.prior_record == rec && *c.bac >= edges[i] &&
            *c.bac < edges[i + 1]) {
          sum += *c.imprisonment_months;
          ++row.n;
        }
      if (row.n) row.mean_months = sum / static_cast<double>(row.n);
      out.push_back(row);
    }
  return out;
}

inline std::vector<double> default_bac_edges() {
  std::vector<double> e;
  for (int i = 0; i <= 7; ++i) e.push_back(0.0005 + 0.0003 * i);
  return e;
}

struct RegressionFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::size_t n = 0;
};

inline RegressionFit ols_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("regression needs equally many x and y values");
  const std::size_t n = x.size();
  if (n < 2) throw Error("regression needs at least 2 points, got " + std::to_string(n));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("regression x values have zero variance");
  RegressionFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

enum class LossScale { log10, linear };

struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<RegressionFit> fit;
};

inline Series loss_series(const std::vector<CaseRecord>& records, bool fine_amounts, LossScale scale) {
  Series s;
  s.name = fine_amounts ? "fine_vs_loss" : "months_vs_loss";
  s.x_label = scale == LossScale::log10 ? "log10(loss)" : "loss";
  s.y_label = fine_amounts ? "fine" : "imprisonment_months";
  for (const auto& r : records) {
    if (!r.loss_total || *r.loss_total <= 0) continue;
    std::optional<double> y;
    if (fine_amounts && r.sentence_type == SentenceType::fine && r.fine_amount)
      y = static_cast<double>(*r.fine_amount);
    if (!fine_amounts && r.imprisonment_months) y = *r.imprisonment_months;
    if (!y) continue;
    double loss = static_cast<double>(*r.loss_total);
    s.x.push_back(scale == LossScale::log10 ? std::log10(loss) : loss);
    s.y.push_back(*y);
  }
  if (s.x.size() >= 2) {
    try {
      s.fit = ols_regression(s.x, s.y);
    } catch (const Error&) {
    }
  }
  return s;
}

struct BucketRow {
  double lo = 0;
  double hi = 0;
  std::size_t n = 0;
  std::optional<double> fine, prison, suspension;
};

// Buckets are [edge_i, edge_{i+1}), the last one closed on the right.
inline std::vector<BucketRow> bucket_ratios(const std::vector<CaseRecord>& records, const std::vector<double>& edges) {
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw Error("bucket edges must be strictly increasing");
  std::vector<BucketRow> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    BucketRow b{edges[i], edges[i + 1], 0, {}, {}, {}};
    std::size_t counts[3] = {0, 0, 0};
    bool last = i + 2 == edges.size();
    for (const auto& r : records) {
      if (!r.loss_total) continue;
      double v = static_cast<double>(*r.loss_total);
      if (v < b.lo || v > b.hi || (!last && v == b.hi)) continue;
      ++counts[static_cast<int>(r.sentence_type)];
      ++b.n;
    }
    if (b.n) {
      double n = static_cast<double>(b.n);
      b.fine = counts[0] / n;
      b.prison = counts[1] / n;
      b.suspension = counts[2] / n;
    }
    out.push_back(b);
  }
  return out;
}

inline std::vector<double> log_edges(double lo_exp, double hi_exp, double step = 1.0) {
  std::vector<double> e;
  for (double x = lo_exp; x <= hi_exp + 1e-9; x += step) e.push_back(std::pow(10.0, x));
  return e;
}

// ----------------------------------------------------------------------------

struct AnalysisResult {
  Task task = Task::drunk_driving;
  std::size_t records = 0;
  std::vector<std::pair<std::string, std::string>> skipped;  // id, reason
  std::vector<MeanRow> yearly;
  std::vector<MeanRow> bac;
  std::vector<Series> series;
  std::vector<BucketRow> buckets;
};

struct AnalysisOptions {
  std::vector<YearRange> year_ranges{{2017, 2018}, {2019, 2022}};
  std::vector<double> bac_edges = default_bac_edges();
  std::vector<double> loss_edges = log_edges(5, 9);
  LossScale scale = LossScale::log10;
};

inline std::vector<CaseRecord> build_records(Task task, const std::vector<Document>& docs,
                                             const std::vector<Extraction>& retained,
                                             std::vector<std::pair<std::string, std::string>>* skipped = nullptr) {
  std::map<std::pair<std::string, Task>, const Extraction*> idx;
  for (const auto& e : retained) idx[{e.doc_id, e.task}] = &e;
  std::vector<CaseRecord> out;
  for (const auto& d : docs) {
    if (d.category != task) continue;
    auto f = idx.find({d.id, task});
    auto r = idx.find({d.id, Task::ruling_criminal});
    if (f == idx.end() || r == idx.end()) {
      if (skipped) skipped->emplace_back(d.id, "facts or ruling extraction not retained");
      continue;
    }
    auto n = normalize_record(*f->second, *r->second, d.year);
    if (n.record)
      out.push_back(std::move(*n.record));
    else if (skipped)
      skipped->emplace_back(d.id, n.skip_reason);
  }
  return out;
}

inline AnalysisResult analyze(Task task, const std::vector<Document>& docs, const std::vector<Extraction>& retained,
                              const AnalysisOptions& opt = {}) {
  if (task != Task::drunk_driving && task != Task::fraud && task != Task::embezzlement)
    throw Error("analysis is defined for facts tasks only");
  AnalysisResult res;
  res.task = task;
  auto records = build_records(task, docs, retained, &res.skipped);
  res.records = records.size();
  if (task == Task::drunk_driving) {
    res.yearly = yearly_means(records, opt.year_ranges);
    res.bac = bac_means(records, opt.bac_edges);
  } else {
    res.series.push_back(loss_series(records, false, opt.scale));
    res.series.push_back(loss_series(records, true, opt.scale));
    res.buckets = bucket_ratios(records, opt.loss_edges);
  }
  return res;
}

// ----------------------------------------------------------------------------
// Output

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline std::string means_csv(const std::vector<MeanRow>& rows, const std::string& group_header) {
  std::ostringstream os;
  os << group_header << ",prior_record,mean_months,n\n";
  for (const auto& r : rows)
    os << r.group << ',' << (r.prior_record ? "true" : "false") << ',' << num(r.mean_months) << ',' << r.n << '\n';
  return os.str();
}

inline std::string buckets_csv(const std::vector<BucketRow>& rows) {
  std::ostringstream os;
  os << "loss_from,loss_to,n,fine_share,prison_share,suspension_share\n";
  for (const auto& b : rows)
    os << num(b.lo) << ',' << num(b.hi) << ',' << b.n << ',' << num(b.fine) << ',' << num(b.prison) << ','
       << num(b.suspension) << '\n';
  return os.str();
}

inline std::string fits_csv(const std::vector<Series>& series) {
  std::ostringstream os;
  os << "series,slope,intercept,r_squared,n\n";
  for (const auto& s : series)
    if (s.fit)
      os << s.name << ',' << num(s.fit->slope) << ',' << num(s.fit->intercept) << ',' << num(s.fit->r_squared) << ','
         << s.fit->n << '\n';
  return os.str();
}

inline std::string points_csv(const Series& s) {
  std::ostringstream os;
  os << s.x_label << ',' << s.y_label << '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) os << num(s.x[i]) << ',' << num(s.y[i]) << '\n';
  return os.str();
}

// Scatter of the series plus one <line> for the fitted regression.
inline std::string render_svg(const Series& s) {
  const double w = 640, h = 420, pad = 50;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!s.x.empty()) {
    x0 = *std::min_element(s.x.begin(), s.x.end());
    x1 = *std::max_element(s.x.begin(), s.x.end());
    y0 = *std::min_element(s.y.begin(), s.y.end());
    y1 = *std::max_element(s.y.begin(), s.y.end());
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); };
  auto py = [&](double y) { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<title>" << s.name << "</title>\n"
     << "<path d=\"M" << pad << ' ' << pad << " V" << h - pad << " H" << w - pad
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << s.x_label << "</text>\n"
     << "<text x=\"14\" y=\"" << h / 2 << "\" transform=\"rotate(-90 14 " << h / 2 << ")\" text-anchor=\"middle\">"
     << s.y_label << "</text>\n"
     << "<g fill=\"black\" fill-opacity=\"0.25\">\n";
  for (std::size_t i = 0; i < s.x.size(); ++i)
    os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"2\"/>\n";
  os << "</g>\n";
  if (s.fit)
    os << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(s.fit->slope * x0 + s.fit->intercept)) << "\" x2=\""
       << fmt(px(x1)) << "\" y2=\"" << fmt(py(s.fit->slope * x1 + s.fit->intercept))
       << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

// Writes CSV tables and one SVG per regression series; returns the files written.
inline std::vector<std::filesystem::path> emit_report(const AnalysisResult& res, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> files;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    files.push_back(dir / name);
  };
  if (res.task == Task::drunk_driving) {
    put("yearly_means.csv", means_csv(res.yearly, "year_range"));
    put("bac_means.csv", means_csv(res.bac, "bac_range"));
  } else {
    put("bucket_ratios.csv", buckets_csv(res.buckets));
    put("regressions.csv", fits_csv(res.series));
    for (const auto& s : res.series) {
      put(s.name + ".csv", points_csv(s));
      put(s.name + ".svg", render_svg(s));
    }
  }
  std::ostringstream skipped;
  skipped << "id,reason\n";
  for (const auto& [id, reason] : res.skipped) skipped << id << ",\"" << reason << "\"\n";
  put("skipped.csv", skipped.str());
  return files;
}

// --- JSON (lets `report` re-render without re-running the pipeline) ---

inline nlohmann::json to_json(const AnalysisResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  auto means = [&](const std::vector<MeanRow>& rows) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : rows)
      a.push_back({{"group", m.group}, {"prior_record", m.prior_record}, {"mean_months", opt(m.mean_months)}, {"n", m.n}});
    return a;
  };
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : r.series) {
    nlohmann::json js{{"name", s.name}, {"x_label", s.x_label}, {"y_label", s.y_label}, {"x", s.x}, {"y", s.y}};
    if (s.fit)
      js["fit"] = {{"slope", s.fit->slope},
                   {"intercept", s.fit->intercept},
                   {"r_squared", s.fit->r_squared},
                   {"n", s.fit->n}};
    series.push_back(js);
  }
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.buckets)
    buckets.push_back({{"lo", b.lo},
                       {"hi", b.hi},
                       {"n", b.n},
                       {"fine", opt(b.fine)},
                       {"prison", opt(b.prison)},
                       {"suspension", opt(b.suspension)}});
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& [id, reason] : r.skipped) skipped.push_back({{"id", id}, {"reason", reason}});
  return {{"task", legalie::to_string(r.task)},
          {"records", r.records},
          {"yearly", means(r.yearly)},
          {"bac", means(r.bac)},
          {"series", series},
          {"buckets", buckets},
          {"skipped", skipped}};
}

inline AnalysisResult analysis_from_json(const nlohmann::json& j) {
  auto opt = [](const nlohmann::json& v) { return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
  AnalysisResult r;
  r.task = task_from_string(j.at("task").get<std::string>());
  r.records = j.at("records").get<std::size_t>();
  auto means = [&](const nlohmann::json& a) {
    std::vector<MeanRow> rows;
    for (const auto& m : a)
      rows.push_back({m.at("group").get<std::string>(), m.at("prior_record").get<bool>(), opt(m.at("mean_months")),
                      m.at("n").get<std::size_t>()});
    return rows;
  };
  r.yearly = means(j.at("yearly"));
  r.bac = means(j.at("bac"));
  for (const auto& js : j.at("series")) {
    Series s{js.at("name").get<std::string>(), js.at("x_label").get<std::string>(), js.at("y_label").get<std::string>(),
             js.at("x").get<std::vector<double>>(), js.at("y").get<std::vector<double>>(), std::nullopt};
    if (js.contains("fit"))
      s.fit = RegressionFit{js["fit"].at("slope").get<double>(), js["fit"].at("intercept").get<double>(),
                            js["fit"].at("r_squared").get<double>(), js["fit"].at("n").get<std::size_t>()};
    r.series.push_back(std::move(s));
  }
  for (const auto& b : j.at("buckets"))
    r.buckets.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("n").get<std::size_t>(),
                         opt(b.at("fine")), opt(b.at("prison")), opt(b.at("suspension"))});
  for (const auto& s : j.at("skipped")) r.skipped.emplace_back(s.at("id").get<std::string>(), s.at("reason").get<std::string>());
  return r;
}

}  // namespace legalie::stats
