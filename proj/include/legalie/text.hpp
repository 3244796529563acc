#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace legalie::text {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

inline bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

// Splits on every occurrence of `delim` (non-empty); keeps empty pieces.
inline std::vector<std::string> split(std::string_view s, std::string_view delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + delim.size();
  }
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Value normalization used for field comparison: trim, collapse internal
// whitespace, case-fold, drop one trailing period. Idempotent.
inline std::string normalize_value(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  while (!out.empty() && out.back() == '.') {
    out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
  }
  return out;
}

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Sentences are maximal spans ending at '.', '!' or '?' followed by
// whitespace or end of text. A period between two digits ("0.208%") or
// before a non-space character never terminates a sentence.
inline std::vector<Span> sentence_spans(std::string_view s) {
  std::vector<Span> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c != '.' && c != '!' && c != '?') continue;
    bool at_end = i + 1 == s.size();
    if (!at_end && !std::isspace(static_cast<unsigned char>(s[i + 1]))) continue;
    out.push_back({start, i + 1});
    start = i + 1;
  }
  if (start < s.size()) {
    bool blank = std::all_of(s.begin() + static_cast<std::ptrdiff_t>(start), s.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) out.push_back({start, s.size()});
  }
  return out;
}

inline std::size_t sentence_index(const std::vector<Span>& spans, std::size_t pos) {
  for (std::size_t i = 0; i < spans.size(); ++i)
    if (pos >= spans[i].begin && pos < spans[i].end) return i;
  return spans.empty() ? 0 : spans.size() - 1;
}

}  // namespace legalie::text
