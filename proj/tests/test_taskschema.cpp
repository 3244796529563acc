#include <gtest/gtest.h>

#include <set>

#include "legalie/rng.hpp"
#include "legalie/taskschema.hpp"

using namespace legalie;

namespace {

std::vector<std::string> names(const TaskSpec& s) {
  std::vector<std::string> out;
  for (const auto& f : s.fields) out.push_back(f.name);
  return out;
}

}  // namespace

TEST(TaskSchema, BuiltinTasks) {
  const auto& specs = builtin_tasks();
  ASSERT_EQ(specs.size(), 5u);
  EXPECT_EQ(names(builtin_spec(Task::fraud)), (std::vector<std::string>{"loss", "loss_aiding"}));
  EXPECT_EQ(names(builtin_spec(Task::ruling_criminal)),
            (std::vector<std::string>{"fine", "imprisonment", "suspension", "education", "community_service"}));
  const auto* prior = builtin_spec(Task::drunk_driving).find("prior_record");
  ASSERT_NE(prior, nullptr);
  EXPECT_EQ(prior->kind, FieldKind::scalar);
  EXPECT_EQ(prior->value_class, ValueClass::count);
  EXPECT_EQ(builtin_spec(Task::drunk_driving).fields.size(), 4u);
  for (const auto& f : builtin_spec(Task::drunk_driving).fields) EXPECT_EQ(f.kind, FieldKind::scalar);
  ASSERT_EQ(builtin_spec(Task::embezzlement).fields.size(), 1u);
  EXPECT_EQ(builtin_spec(Task::embezzlement).fields[0].kind, FieldKind::list);
  for (const auto& f : builtin_spec(Task::fraud).fields) EXPECT_EQ(f.kind, FieldKind::list);
  EXPECT_EQ(builtin_spec(Task::ruling_civil).fields.size(), 3u);
  for (const auto& s : specs) EXPECT_FALSE(s.prompt_text.empty());
}

TEST(TaskSchema, FieldNamesUniqueAcrossSpecs) {
  std::set<std::string> seen;
  for (const auto& s : builtin_tasks())
    for (const auto& f : s.fields) EXPECT_TRUE(seen.insert(f.name).second) << f.name;
}

TEST(TaskSchema, LinearizeRuling) {
  const auto& spec = builtin_spec(Task::ruling_criminal);
  FieldMap m{{"fine", {"1,000,000 won"}}, {"imprisonment", {"1 year"}}, {"suspension", {"2 years"}}};
  EXPECT_EQ(linearize(spec, m), "fine 1,000,000 won. imprisonment 1 year. suspension of execution 2 years. none. none.");
  EXPECT_EQ(linearize(spec, {}), "none. none. none. none. none.");
}

TEST(TaskSchema, LinearizeListField) {
  const auto& spec = builtin_spec(Task::fraud);
  FieldMap m{{"loss", {"420,000 won", "1,926,934 won"}}};
  EXPECT_EQ(linearize(spec, m), "loss 420,000 won, 1,926,934 won. none.");
}

TEST(TaskSchema, LinearizeRejectsUnknownField) {
  EXPECT_THROW(linearize(builtin_spec(Task::fraud), {{"fine", {"1 won"}}}), Error);
}

TEST(TaskSchema, DelinearizeExamples) {
  const auto& spec = builtin_spec(Task::ruling_criminal);
  FieldMap m{{"fine", {"1,000,000 won"}}, {"imprisonment", {"1 year"}}, {"suspension", {"2 years"}}};
  auto back = delinearize(spec, linearize(spec, m));
  EXPECT_EQ(back.fields, m);
  EXPECT_FALSE(back.malformed);

  auto garbage = delinearize(spec, "garbage");
  EXPECT_TRUE(garbage.malformed);
  EXPECT_EQ(garbage.fields, (FieldMap{{"fine", {"garbage"}}}));

  auto none = delinearize(spec, "none. none. none. none. none.");
  EXPECT_FALSE(none.malformed);
  EXPECT_TRUE(none.fields.empty());
}

TEST(TaskSchema, DelinearizeToleratesExtraSegmentsAndCase) {
  const auto& spec = builtin_spec(Task::fraud);
  auto d = delinearize(spec, "LOSS 5 won. none. trailing junk.");
  EXPECT_TRUE(d.malformed);
  EXPECT_EQ(d.fields, (FieldMap{{"loss", {"5 won"}}}));
  EXPECT_TRUE(delinearize(spec, "").malformed);
}

// Independent notion of a well-formed value: non-empty, no edge whitespace,
// never contains the segment delimiter, never equals the absent token, and
// list values never contain the list separator.
namespace {

bool well_formed(const std::string& v, bool list) {
  if (v.empty() || v.front() == ' ' || v.back() == ' ') return false;
  if (v.find(". ") != std::string::npos) return false;
  if (list && v.find(", ") != std::string::npos) return false;
  std::string lower;
  for (char c : v) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower != "none";
}

std::string random_value(Rng& rng, bool list) {
  static const std::string alphabet = "abcNONE019 .,%";
  while (true) {
    std::string v;
    for (auto n = 1 + rng.below(10); n > 0; --n) v += alphabet[rng.below(alphabet.size())];
    if (well_formed(v, list)) return v;
  }
}

FieldMap random_fields(const TaskSpec& spec, Rng& rng) {
  FieldMap m;
  for (const auto& f : spec.fields) {
    if (rng.bernoulli(0.3)) continue;
    bool list = f.kind == FieldKind::list;
    auto n = list ? 1 + rng.below(4) : 1;
    for (std::size_t i = 0; i < n; ++i) m[f.name].push_back(random_value(rng, list));
  }
  return m;
}

}  // namespace

TEST(TaskSchema, RoundTripProperty) {
  Rng rng(11);
  for (const auto& spec : builtin_tasks())
    for (int i = 0; i < 300; ++i) {
      auto m = random_fields(spec, rng);
      auto d = delinearize(spec, linearize(spec, m));
      ASSERT_EQ(d.fields, m) << linearize(spec, m);
      ASSERT_FALSE(d.malformed);
    }
}

TEST(TaskSchema, LinearizeInjective) {
  Rng rng(12);
  for (const auto& spec : builtin_tasks()) {
    std::map<std::string, FieldMap> seen;
    for (int i = 0; i < 300; ++i) {
      auto m = random_fields(spec, rng);
      auto [it, fresh] = seen.emplace(linearize(spec, m), m);
      if (!fresh) ASSERT_EQ(it->second, m);
    }
  }
}

TEST(TaskSchema, JsonRoundTrip) {
  for (const auto& spec : builtin_tasks()) {
    auto back = task_spec_from_json(to_json(spec));
    EXPECT_EQ(back.task, spec.task);
    EXPECT_EQ(names(back), names(spec));
    EXPECT_EQ(back.prompt_text, spec.prompt_text);
    for (std::size_t i = 0; i < spec.fields.size(); ++i) {
      EXPECT_EQ(back.fields[i].kind, spec.fields[i].kind);
      EXPECT_EQ(back.fields[i].phrase, spec.fields[i].phrase);
      EXPECT_EQ(back.fields[i].value_class, spec.fields[i].value_class);
    }
  }
}
