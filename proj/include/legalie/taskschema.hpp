#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/error.hpp"
#include "legalie/text.hpp"

namespace legalie {

enum class Task { drunk_driving, embezzlement, fraud, ruling_criminal, ruling_civil };

inline constexpr std::array<Task, 5> all_tasks{Task::drunk_driving, Task::embezzlement, Task::fraud,
                                               Task::ruling_criminal, Task::ruling_civil};

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::drunk_driving: return "drunk_driving";
    case Task::embezzlement: return "embezzlement";
    case Task::fraud: return "fraud";
    case Task::ruling_criminal: return "ruling_criminal";
    case Task::ruling_civil: return "ruling_civil";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  for (Task t : all_tasks)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline Task task_from_string(std::string_view s) {
  if (auto t = parse_task(s)) return *t;
  throw Error("unknown task '" + std::string(s) + "'");
}

enum class SourceSection { facts, ruling };

inline SourceSection source_of(Task t) {
  return (t == Task::ruling_criminal || t == Task::ruling_civil) ? SourceSection::ruling : SourceSection::facts;
}

inline bool is_criminal(Task t) { return t != Task::ruling_civil; }

// field name -> values. Scalar fields hold exactly one value; an absent
// field has no key (an empty vector is treated as absent everywhere).
using FieldMap = std::map<std::string, std::vector<std::string>>;

inline void drop_empty(FieldMap& m) {
  std::erase_if(m, [](const auto& kv) { return kv.second.empty(); });
}

enum class FieldKind { scalar, list };
enum class ValueClass { percentage, distance, vehicle, count, money, duration, hours };

struct FieldSchema {
  std::string name;
  FieldKind kind = FieldKind::scalar;
  ValueClass value_class = ValueClass::money;
  std::string phrase;  // rendered before the value in a linearized segment
};

struct TaskSpec {
  Task task = Task::drunk_driving;
  std::vector<FieldSchema> fields;
  std::string prompt_text;
  std::string absent_token = "none";

  const FieldSchema* find(std::string_view name) const {
    for (const auto& f : fields)
      if (f.name == name) return &f;
    return nullptr;
  }
};

inline const std::vector<TaskSpec>& builtin_tasks() {
  using K = FieldKind;
  using V = ValueClass;
  static const std::vector<TaskSpec> specs{
      {Task::drunk_driving,
       {{"bac", K::scalar, V::percentage, "blood alcohol content"},
        {"distance", K::scalar, V::distance, "distance"},
        {"vehicle", K::scalar, V::vehicle, "vehicle"},
        {"prior_record", K::scalar, V::count, "prior record"}},
       "Extract blood alcohol content, distance, vehicle, and prior record.",
       "none"},
      {Task::embezzlement,
       {{"embezzled_money", K::list, V::money, "embezzled money"}},
       "Extract embezzled money.",
       "none"},
      {Task::fraud,
       {{"loss", K::list, V::money, "loss"}, {"loss_aiding", K::list, V::money, "loss from aiding"}},
       "Extract loss from fraud and loss from aiding fraud.",
       "none"},
      {Task::ruling_criminal,
       {{"fine", K::scalar, V::money, "fine"},
        {"imprisonment", K::scalar, V::duration, "imprisonment"},
        {"suspension", K::scalar, V::duration, "suspension of execution"},
        {"education", K::scalar, V::hours, "education"},
        {"community_service", K::scalar, V::hours, "community service"}},
       "Write fine, imprisonment, suspension of execution, education, and community service in sequence.",
       "none"},
      {Task::ruling_civil,
       {{"approved_money", K::scalar, V::money, "approved money"},
        {"cost_ratio", K::scalar, V::percentage, "litigation cost ratio"},
        {"claimed_money", K::scalar, V::money, "claimed money"}},
       "Extract approved money, litigation cost ratio, and claimed money.",
       "none"},
  };
  return specs;
}

inline const TaskSpec& builtin_spec(Task t) {
  for (const auto& s : builtin_tasks())
    if (s.task == t) return s;
  throw Error("no builtin spec for task");
}

inline constexpr std::string_view segment_delimiter = ". ";
inline constexpr std::string_view list_separator = ", ";

inline std::string linearize(const TaskSpec& spec, const FieldMap& labels) {
  for (const auto& [name, values] : labels)
    if (!spec.find(name))
      throw Error("field '" + name + "' is not part of task " + std::string(to_string(spec.task)));
  std::vector<std::string> segments;
  segments.reserve(spec.fields.size());
  for (const auto& f : spec.fields) {
    auto it = labels.find(f.name);
    if (it == labels.end() || it->second.empty()) {
      segments.push_back(spec.absent_token);
      continue;
    }
    segments.push_back(f.phrase + " " + text::join(it->second, list_separator));
  }
  return text::join(segments, segment_delimiter) + ".";
}

struct Delinearized {
  FieldMap fields;
  bool malformed = false;
};

// Tolerant inverse of linearize: never throws on bad model output.
inline Delinearized delinearize(const TaskSpec& spec, std::string_view output) {
  Delinearized out;
  std::string body = text::trim(output);
  if (!body.empty() && body.back() == '.') body.pop_back();
  auto segments = text::split(body, segment_delimiter);
  if (segments.size() != spec.fields.size()) out.malformed = true;
  std::size_t n = std::min(segments.size(), spec.fields.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = spec.fields[i];
    std::string seg = text::trim(segments[i]);
    if (text::iequals(seg, spec.absent_token)) continue;
    std::string prefix = f.phrase + " ";
    if (text::istarts_with(seg, prefix))
      seg = text::trim(std::string_view(seg).substr(prefix.size()));
    else if (text::iequals(seg, f.phrase))
      seg.clear();
    if (seg.empty()) {
      out.malformed = true;
      continue;
    }
    std::vector<std::string> values;
    if (f.kind == FieldKind::list) {
      for (auto& v : text::split(seg, list_separator)) {
        auto t = text::trim(v);
        if (t.empty())
          out.malformed = true;
        else
          values.push_back(std::move(t));
      }
    } else {
      values.push_back(seg);
    }
    if (!values.empty()) out.fields[f.name] = std::move(values);
  }
  return out;
}

// A value that linearize/delinearize can carry without loss.
inline bool is_linearizable_value(const TaskSpec& spec, const FieldSchema& f, std::string_view v) {
  if (v.empty() || text::trim(v) != v) return false;
  if (v.find(segment_delimiter) != std::string_view::npos) return false;
  if (v.find('\n') != std::string_view::npos) return false;
  if (f.kind == FieldKind::list && v.find(list_separator) != std::string_view::npos) return false;
  if (text::iequals(v, spec.absent_token)) return false;
  return true;
}

// --- JSON (one TaskSpec per line for user-defined specs) ---

inline std::string_view to_string(FieldKind k) { return k == FieldKind::list ? "list" : "scalar"; }

inline std::string_view to_string(ValueClass v) {
  switch (v) {
    case ValueClass::percentage: return "percentage";
    case ValueClass::distance: return "distance";
    case ValueClass::vehicle: return "vehicle";
    case ValueClass::count: return "count";
    case ValueClass::money: return "money";
    case ValueClass::duration: return "duration";
    case ValueClass::hours: return "hours";
  }
  return "?";
}

inline ValueClass value_class_from_string(std::string_view s) {
  for (auto v : {ValueClass::percentage, ValueClass::distance, ValueClass::vehicle, ValueClass::count,
                 ValueClass::money, ValueClass::duration, ValueClass::hours})
    if (to_string(v) == s) return v;
  throw Error("unknown value class '" + std::string(s) + "'");
}

inline nlohmann::json to_json(const TaskSpec& spec) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : spec.fields)
    fields.push_back({{"name", f.name},
                      {"kind", to_string(f.kind)},
                      {"value_class", to_string(f.value_class)},
                      {"phrase", f.phrase}});
  return {{"task", to_string(spec.task)},
          {"fields", fields},
          {"prompt_text", spec.prompt_text},
          {"absent_token", spec.absent_token}};
}

inline TaskSpec task_spec_from_json(const nlohmann::json& j) {
  TaskSpec spec;
  spec.task = task_from_string(j.at("task").get<std::string>());
  spec.prompt_text = j.value("prompt_text", "");
  spec.absent_token = j.value("absent_token", "none");
  for (const auto& jf : j.at("fields")) {
    FieldSchema f;
    f.name = jf.at("name").get<std::string>();
    if (spec.find(f.name)) throw Error("duplicate field '" + f.name + "' in task spec");
    f.kind = jf.value("kind", "scalar") == "list" ? FieldKind::list : FieldKind::scalar;
    f.value_class = value_class_from_string(jf.value("value_class", "money"));
    f.phrase = jf.value("phrase", f.name);
    spec.fields.push_back(std::move(f));
  }
  return spec;
}

// Reads one TaskSpec per line; specs override the builtin spec of the same task.
inline std::vector<TaskSpec> load_task_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open task spec file '" + path + "'");
  std::vector<TaskSpec> specs = builtin_tasks();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    TaskSpec spec;
    try {
      spec = task_spec_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
    for (auto& s : specs)
      if (s.task == spec.task) s = spec;
  }
  return specs;
}

inline const TaskSpec& spec_for(const std::vector<TaskSpec>& specs, Task t) {
  for (const auto& s : specs)
    if (s.task == t) return s;
  throw Error("no task spec for " + std::string(to_string(t)));
}

}  // namespace legalie
