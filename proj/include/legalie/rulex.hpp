#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/extraction.hpp"
#include "legalie/taskschema.hpp"
#include "legalie/text.hpp"

namespace legalie::rulex {

inline constexpr std::string_view money_pattern = R"(((?:\d{1,3}(?:,\d{3})+|\d+) ?won)\b)";
inline constexpr std::string_view duration_pattern =
    R"((\d+ years?(?:,? and \d+ months?)?|\d+ months?)\b)";
inline constexpr std::string_view hours_pattern = R"((\d+ hours?)\b)";

struct MoneyValue {
  long long amount = 0;
  std::string raw;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Duration {
  std::optional<double> months;
  std::optional<long long> hours;
  std::string raw;
  std::size_t begin = 0;
  std::size_t end = 0;
};

namespace detail {

inline const std::regex& money_regex() {
  static const std::regex re(std::string(money_pattern), std::regex::ECMAScript | std::regex::icase);
  return re;
}

inline const std::regex& duration_token_regex() {
  static const std::regex re(R"((\d+(?:\.\d+)?) ?(years?|months?|hours?)\b)",
                             std::regex::ECMAScript | std::regex::icase);
  return re;
}

inline const std::regex& conjunction_regex() {
  static const std::regex re(R"(^,? (?:and )?$)", std::regex::ECMAScript | std::regex::icase);
  return re;
}

inline std::optional<long long> parse_digits(std::string_view digits) {
  std::string clean;
  for (char c : digits)
    if (c != ',') clean += c;
  long long v = 0;
  auto [p, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), v);
  if (ec != std::errc() || p != clean.data() + clean.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline std::optional<long long> money_amount(std::string_view raw) {
  std::cmatch m;
  static const std::regex re(R"(^\s*((?:\d{1,3}(?:,\d{3})+|\d+)) ?won\s*\.?$)", std::regex::icase);
  if (!std::regex_match(raw.begin(), raw.end(), m, re)) return std::nullopt;
  return detail::parse_digits(m.str(1));
}

inline std::vector<MoneyValue> parse_money(std::string_view text) {
  std::vector<MoneyValue> out;
  for (std::cregex_iterator it(text.begin(), text.end(), detail::money_regex()), end; it != end; ++it) {
    const auto& m = *it;
    // "1,000" inside "21,000" would be a partial match; require a boundary.
    auto begin = static_cast<std::size_t>(m.position(1));
    if (begin > 0 && (std::isdigit(static_cast<unsigned char>(text[begin - 1])) || text[begin - 1] == ','))
      continue;
    std::string raw = m.str(1);
    auto amount = detail::parse_digits(raw.substr(0, raw.find_first_not_of("0123456789,")));
    if (!amount) continue;
    out.push_back({*amount, raw, begin, begin + raw.size()});
  }
  return out;
}

// Every year/month/hour span in order. "<n> year(s) [and] <m> month(s)"
// composes into a single duration when the two tokens are adjacent.
inline std::vector<Duration> parse_duration(std::string_view text) {
  struct Token {
    double n;
    char unit;
    std::size_t begin, end;
  };
  std::vector<Token> tokens;
  for (std::cregex_iterator it(text.begin(), text.end(), detail::duration_token_regex()), end; it != end; ++it) {
    const auto& m = *it;
    auto begin = static_cast<std::size_t>(m.position(0));
    if (begin > 0 && (std::isdigit(static_cast<unsigned char>(text[begin - 1])) || text[begin - 1] == '.'))
      continue;
    char unit = static_cast<char>(std::tolower(static_cast<unsigned char>(m.str(2)[0])));
    tokens.push_back({std::stod(m.str(1)), unit, begin, begin + static_cast<std::size_t>(m.length(0))});
  }
  std::vector<Duration> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    Duration d;
    d.begin = t.begin;
    d.end = t.end;
    if (t.unit == 'h') {
      d.hours = static_cast<long long>(t.n);
    } else if (t.unit == 'y') {
      double months = 12.0 * t.n;
      if (i + 1 < tokens.size() && tokens[i + 1].unit == 'm') {
        auto gap = text.substr(t.end, tokens[i + 1].begin - t.end);
        if (std::regex_match(gap.begin(), gap.end(), detail::conjunction_regex())) {
          months += tokens[i + 1].n;
          d.end = tokens[i + 1].end;
          ++i;
        }
      }
      d.months = months;
    } else {
      d.months = t.n;
    }
    d.raw = std::string(text.substr(d.begin, d.end - d.begin));
    out.push_back(std::move(d));
  }
  return out;
}

// Percentage string ("0.208%") as a fraction (0.00208).
inline std::optional<double> percentage_fraction(std::string_view raw) {
  std::string s = text::trim(raw);
  if (s.empty() || s.back() != '%') return std::nullopt;
  s.pop_back();
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v / 100.0;
}

// ----------------------------------------------------------------------------
// Rule sets

enum class Strategy { first_match, last_money, total_else_last, aiding_split, indicator_sentence };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::first_match: return "first_match";
    case Strategy::last_money: return "last_money";
    case Strategy::total_else_last: return "total_else_last";
    case Strategy::aiding_split: return "aiding_split";
    case Strategy::indicator_sentence: return "indicator_sentence";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto v : {Strategy::first_match, Strategy::last_money, Strategy::total_else_last, Strategy::aiding_split,
                 Strategy::indicator_sentence})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

struct Pattern {
  std::string source;
  std::shared_ptr<const std::regex> re;

  bool empty() const { return source.empty(); }
};

inline Pattern compile(const std::string& field, const std::string& source) {
  if (source.empty()) return {};
  try {
    return {source, std::make_shared<const std::regex>(source, std::regex::ECMAScript | std::regex::icase)};
  } catch (const std::regex_error& e) {
    throw Error("rule for field '" + field + "': pattern \"" + source + "\" does not compile: " + e.what());
  }
}

// trigger/capture/strategy per field, plus optional strategy parameters:
//   value    - value regex searched inside indicator sentences
//   marker   - "total" marker (total_else_last) or aid marker (aiding_split)
//   constant - emitted instead of the captured text (first_match)
//   partner  - field whose selected value aiding_split may re-route
struct FieldRule {
  std::string field;
  Pattern trigger;
  int capture = 0;
  Strategy strategy = Strategy::first_match;
  Pattern value;
  Pattern marker;
  std::string constant;
  std::string partner;
};

struct RuleSet {
  std::map<Task, std::vector<FieldRule>> rules;

  bool covers(Task t) const { return rules.count(t) > 0; }

  std::vector<const FieldRule*> rules_for(Task t, std::string_view field) const {
    std::vector<const FieldRule*> out;
    auto it = rules.find(t);
    if (it == rules.end()) return out;
    for (const auto& r : it->second)
      if (r.field == field) out.push_back(&r);
    return out;
  }
};

inline FieldRule make_rule(std::string field, std::string trigger, int capture, Strategy strategy,
                           std::string value = {}, std::string marker = {}, std::string constant = {},
                           std::string partner = {}) {
  FieldRule r;
  r.trigger = compile(field, trigger);
  r.value = compile(field, value);
  r.marker = compile(field, marker);
  r.field = std::move(field);
  r.capture = capture;
  r.strategy = strategy;
  r.constant = std::move(constant);
  r.partner = std::move(partner);
  return r;
}

inline void validate(const RuleSet& rs, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  for (const auto& [task, rules] : rs.rules) {
    const auto& spec = spec_for(specs, task);
    for (const auto& r : rules) {
      if (!spec.find(r.field))
        throw Error("rule field '" + r.field + "' is not a field of task " + std::string(to_string(task)));
      if (r.trigger.empty()) throw Error("rule for field '" + r.field + "' has no trigger pattern");
      if (r.capture < 0 || static_cast<std::size_t>(r.capture) > r.trigger.re->mark_count())
        if (r.strategy != Strategy::indicator_sentence)
          throw Error("rule for field '" + r.field + "': capture group " + std::to_string(r.capture) +
                      " does not exist in \"" + r.trigger.source + "\"");
      if (r.strategy == Strategy::indicator_sentence && r.value.empty())
        throw Error("indicator_sentence rule for field '" + r.field + "' needs a value pattern");
      if (r.strategy == Strategy::aiding_split && !r.partner.empty() && !spec.find(r.partner))
        throw Error("aiding_split rule for field '" + r.field + "' names unknown partner '" + r.partner + "'");
    }
    for (const auto& f : spec.fields)
      if (rs.rules_for(task, f.name).empty())
        throw Error("ruleset has no rule for field '" + f.name + "' of task " + std::string(to_string(task)));
  }
}

inline RuleSet default_ruleset() {
  using S = Strategy;
  const std::string money(money_pattern);
  const std::string duration(duration_pattern);
  const std::string hours(hours_pattern);
  RuleSet rs;
  rs.rules[Task::drunk_driving] = {
      make_rule("bac", R"((\d+\.\d+%))", 1, S::first_match),
      make_rule("distance", R"((\d+(?:\.\d+)?(?:km|m))\b)", 1, S::first_match),
      make_rule("vehicle", R"(\bdrove (?:a|an|the) ([a-z][a-z -]*?) (?:for |over )?(?:approximately|about)\b)", 1,
                S::first_match),
      make_rule("prior_record", R"(\b(\d+) prior (?:drunk driving )?convictions\b)", 1, S::first_match),
      make_rule("prior_record", R"(\b(?:two or more times|more than twice)\b)", 0, S::first_match, {}, {}, "1"),
  };
  rs.rules[Task::embezzlement] = {
      make_rule("embezzled_money", money, 1, S::total_else_last, {}, R"(\btotal\b)"),
  };
  rs.rules[Task::fraud] = {
      make_rule("loss", money, 1, S::total_else_last, {}, R"(\btotal\b)"),
      make_rule("loss_aiding", money, 1, S::aiding_split, {}, R"(\baid)", {}, "loss"),
  };
  rs.rules[Task::ruling_criminal] = {
      make_rule("fine", R"(\bfines?\b)", 1, S::indicator_sentence, money),
      make_rule("imprisonment", R"(\bimprisonment\b)", 1, S::indicator_sentence, duration),
      make_rule("suspension", R"(\bsuspen(?:ded|sion)\b)", 1, S::indicator_sentence, duration),
      make_rule("education", R"(\beducation\b)", 1, S::indicator_sentence, hours),
      make_rule("community_service", R"(\bservice\b)", 1, S::indicator_sentence, hours),
  };
  return rs;
}

// ----------------------------------------------------------------------------
// Ruleset file: a small TOML subset.
//
//   [task.field]        replaces the default rules of that field
//   [[task.field]]      appends another rule for the field
//   key = 'literal' | "basic\tstring" | 123
//
// Keys: trigger, capture, strategy, value, marker, constant, partner.

namespace detail {

inline std::string parse_toml_value(std::string_view v, std::size_t lineno) {
  std::string s = text::trim(v);
  if (s.empty()) throw ParseError("missing value", lineno);
  if (s.front() == '\'') {
    auto close = s.find('\'', 1);
    if (close == std::string::npos) throw ParseError("unterminated literal string", lineno);
    return s.substr(1, close - 1);
  }
  if (s.front() == '"') {
    std::string out;
    for (std::size_t i = 1; i < s.size(); ++i) {
      char c = s[i];
      if (c == '"') return out;
      if (c == '\\' && i + 1 < s.size()) {
        char n = s[++i];
        switch (n) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw ParseError(std::string("unsupported escape \\") + n, lineno);
        }
        continue;
      }
      out += c;
    }
    throw ParseError("unterminated string", lineno);
  }
  auto hash = s.find('#');
  if (hash != std::string::npos) s = text::trim(s.substr(0, hash));
  return s;
}

struct RawRule {
  Task task;
  std::string field;
  std::map<std::string, std::string> kv;
  std::size_t line;
};

}  // namespace detail

inline RuleSet parse_ruleset(std::istream& in, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  std::vector<detail::RawRule> raw;
  bool inherit = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      bool append = s.rfind("[[", 0) == 0;
      auto close = s.find(append ? "]]" : "]");
      if (close == std::string::npos) throw ParseError("unterminated table header", lineno);
      std::string name = text::trim(s.substr(append ? 2 : 1, close - (append ? 2 : 1)));
      auto dot = name.find('.');
      if (dot == std::string::npos) throw ParseError("table header must be [task.field]", lineno);
      auto task = parse_task(name.substr(0, dot));
      if (!task) throw ParseError("unknown task '" + name.substr(0, dot) + "'", lineno);
      std::string field = name.substr(dot + 1);
      if (!spec_for(specs, *task).find(field))
        throw ParseError("unknown field '" + field + "' for task " + std::string(to_string(*task)), lineno);
      raw.push_back({*task, field, {}, lineno});
      if (!append) raw.back().kv["__replace"] = "1";
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = text::trim(s.substr(0, eq));
    std::string value = detail::parse_toml_value(s.substr(eq + 1), lineno);
    if (raw.empty()) {
      if (key != "inherit") throw ParseError("unknown top-level key '" + key + "'", lineno);
      inherit = value == "true";
      continue;
    }
    static const std::set<std::string> keys{"trigger", "capture", "strategy", "value", "marker", "constant", "partner"};
    if (!keys.count(key)) throw ParseError("unknown rule key '" + key + "'", lineno);
    raw.back().kv[key] = value;
  }

  RuleSet rs = inherit ? default_ruleset() : RuleSet{};
  std::set<std::pair<Task, std::string>> replaced;
  for (const auto& r : raw) {
    auto key = std::make_pair(r.task, r.field);
    if (!replaced.count(key)) {
      auto& list = rs.rules[r.task];
      std::erase_if(list, [&](const FieldRule& fr) { return fr.field == r.field; });
      replaced.insert(key);
    }
    auto get = [&](const std::string& k, std::string def = {}) {
      auto it = r.kv.find(k);
      return it == r.kv.end() ? def : it->second;
    };
    auto strategy = parse_strategy(get("strategy", "first_match"));
    if (!strategy) throw ParseError("unknown strategy '" + get("strategy") + "'", r.line);
    int capture = 0;
    try {
      capture = std::stoi(get("capture", "0"));
    } catch (const std::exception&) {
      throw ParseError("capture must be an integer", r.line);
    }
    std::string trigger = get("trigger");
    if (trigger.empty()) throw ParseError("rule for field '" + r.field + "' has no trigger", r.line);
    rs.rules[r.task].push_back(make_rule(r.field, trigger, capture, *strategy, get("value"), get("marker"),
                                         get("constant"), get("partner")));
  }
  std::erase_if(rs.rules, [](const auto& kv) { return kv.second.empty(); });
  validate(rs, specs);
  return rs;
}

inline constexpr std::string_view default_ruleset_sentinel = "default";

// `path` equal to "default" (or empty) yields the builtin ruleset.
inline RuleSet load_ruleset(const std::string& path, const std::vector<TaskSpec>& specs = builtin_tasks()) {
  if (path.empty() || path == default_ruleset_sentinel) return default_ruleset();
  std::ifstream in(path);
  if (!in) throw Error("cannot open ruleset '" + path + "'");
  return parse_ruleset(in, specs);
}

// ----------------------------------------------------------------------------
// Extraction

struct Match {
  std::string value;
  std::size_t begin = 0;
  std::size_t end = 0;
};

namespace detail {

inline std::vector<Match> all_matches(const Pattern& p, int capture, std::string_view text) {
  std::vector<Match> out;
  for (std::cregex_iterator it(text.begin(), text.end(), *p.re), end; it != end; ++it) {
    const auto& m = *it;
    int g = static_cast<std::size_t>(capture) < m.size() && m[capture].matched ? capture : 0;
    auto begin = static_cast<std::size_t>(m.position(g));
    if (begin > 0 && (std::isdigit(static_cast<unsigned char>(text[begin - 1])) || text[begin - 1] == ',') &&
        std::isdigit(static_cast<unsigned char>(text[begin])))
      continue;
    out.push_back({m.str(g), begin, begin + static_cast<std::size_t>(m.length(g))});
  }
  return out;
}

inline bool marker_in(const Pattern& marker, std::string_view text) {
  return std::regex_search(text.begin(), text.end(), *marker.re);
}

inline std::optional<Match> first_match(const FieldRule& r, std::string_view text) {
  std::cmatch m;
  if (!std::regex_search(text.begin(), text.end(), m, *r.trigger.re)) return std::nullopt;
  auto g = static_cast<std::size_t>(r.capture);
  if (g >= m.size() || !m[g].matched) g = 0;
  std::string v = r.constant.empty() ? text::trim(m.str(g)) : r.constant;
  return Match{v, static_cast<std::size_t>(m.position(g)),
               static_cast<std::size_t>(m.position(g) + m.length(g))};
}

// Index of the selected value among `values` (total-marked, else last).
inline std::optional<std::size_t> select_total_else_last(const FieldRule& r, std::string_view text,
                                                         const std::vector<Match>& values,
                                                         const std::vector<text::Span>& sentences) {
  if (values.empty()) return std::nullopt;
  std::optional<std::size_t> chosen;
  if (!r.marker.empty()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto sentence = sentences[text::sentence_index(sentences, values[i].begin)];
      std::size_t window_begin = sentence.begin;
      if (i > 0 && values[i - 1].end > window_begin) window_begin = values[i - 1].end;
      if (marker_in(r.marker, text.substr(window_begin, values[i].begin - window_begin))) chosen = i;
    }
  }
  return chosen ? chosen : values.size() - 1;
}

inline std::optional<Match> indicator_sentence(const FieldRule& r, std::string_view text,
                                               const std::vector<text::Span>& sentences) {
  for (const auto& s : sentences) {
    auto sentence = text.substr(s.begin, s.end - s.begin);
    auto indicators = all_matches(r.trigger, 0, sentence);
    if (indicators.empty()) continue;
    auto values = all_matches(r.value, r.capture, sentence);
    if (values.empty()) continue;
    // nearest value to any indicator occurrence; ties go to the following value
    std::optional<Match> best;
    std::size_t best_dist = 0;
    bool best_follows = false;
    for (const auto& ind : indicators)
      for (const auto& v : values) {
        bool follows = v.begin >= ind.end;
        std::size_t dist = follows ? v.begin - ind.end : (ind.begin >= v.end ? ind.begin - v.end : 0);
        if (!best || dist < best_dist || (dist == best_dist && follows && !best_follows)) {
          best = v;
          best_dist = dist;
          best_follows = follows;
        }
      }
    best->begin += s.begin;
    best->end += s.begin;
    best->value = text::trim(best->value);
    return best;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool task_accepts(Task task, const Document& doc) {
  if (source_of(task) == SourceSection::facts) return doc.category == task;
  if (task == Task::ruling_civil) return doc.category == Task::ruling_civil;
  return is_criminal(doc.category);
}

inline Extraction extract(const TaskSpec& spec, const Document& doc, const RuleSet& rules) {
  if (!task_accepts(spec.task, doc))
    throw Error("document " + doc.id + " (category " + std::string(to_string(doc.category)) +
                ") cannot be processed by task " + std::string(to_string(spec.task)));
  if (!rules.covers(spec.task)) throw Error("ruleset has no rules for task " + std::string(to_string(spec.task)));

  Extraction out;
  out.doc_id = doc.id;
  out.task = spec.task;
  out.confidence = 1.0;
  out.provenance = Provenance::rule;

  std::string_view text = doc.source(source_of(spec.task));
  auto sentences = text::sentence_spans(text);
  std::map<std::string, Match> where;

  std::vector<const FieldRule*> aiding;

  for (const auto& f : spec.fields) {
    for (const FieldRule* r : rules.rules_for(spec.task, f.name)) {
      std::optional<Match> found;
      switch (r->strategy) {
        case Strategy::first_match:
          found = detail::first_match(*r, text);
          break;
        case Strategy::last_money: {
          auto values = detail::all_matches(r->trigger, r->capture, text);
          if (!values.empty()) found = values.back();
          break;
        }
        case Strategy::total_else_last: {
          auto values = detail::all_matches(r->trigger, r->capture, text);
          if (auto i = detail::select_total_else_last(*r, text, values, sentences)) found = values[*i];
          break;
        }
        case Strategy::aiding_split:
          aiding.push_back(r);
          break;
        case Strategy::indicator_sentence:
          found = detail::indicator_sentence(*r, text, sentences);
          break;
      }
      if (found) {
        out.fields[f.name] = {found->value};
        where[f.name] = *found;
        break;
      }
    }
  }

  // aiding_split: if the sentence holding the last value mentions the aid
  // marker, the partner's selected value belongs to this field instead.
  for (const FieldRule* a : aiding) {
    const FieldRule& r = *a;
    std::string partner = r.partner;
    if (partner.empty())
      for (const auto& f : spec.fields)
        if (f.name != r.field) {
          partner = f.name;
          break;
        }
    auto values = detail::all_matches(r.trigger, r.capture, text);
    if (values.empty()) continue;
    auto sentence = sentences[text::sentence_index(sentences, values.back().begin)];
    bool aided = r.marker.empty() ||
                 detail::marker_in(r.marker, text.substr(sentence.begin, sentence.end - sentence.begin));
    if (!aided) continue;
    auto it = out.fields.find(partner);
    std::vector<std::string> moved = it != out.fields.end() ? it->second : std::vector<std::string>{values.back().value};
    if (it != out.fields.end()) out.fields.erase(it);
    out.fields[r.field] = std::move(moved);
  }

  // ambiguity: the sentence supplying a ruling value also carries another field's indicator
  auto indicator_of = [&](const std::string& field) -> const FieldRule* {
    auto rs = rules.rules_for(spec.task, field);
    return !rs.empty() && rs.front()->strategy == Strategy::indicator_sentence ? rs.front() : nullptr;
  };
  for (const auto& f : spec.fields) {
    auto it = where.find(f.name);
    if (it == where.end() || !indicator_of(f.name)) continue;
    auto s = sentences[text::sentence_index(sentences, it->second.begin)];
    auto sentence = text.substr(s.begin, s.end - s.begin);
    for (const auto& g : spec.fields) {
      const FieldRule* other = g.name == f.name ? nullptr : indicator_of(g.name);
      if (other && detail::marker_in(other->trigger, sentence))
        out.warnings.push_back("'" + f.name + "' taken from a sentence that also mentions '" + g.name + "'");
    }
  }
  return out;
}

}  // namespace legalie::rulex
