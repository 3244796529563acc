#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "legalie/corpus.hpp"
#include "legalie/synth.hpp"

using namespace legalie;

namespace {

Document dd_doc(const std::string& id) {
  Document d;
  d.id = id;
  d.category = Task::drunk_driving;
  d.facts = "The defendant drove a sedan for about 20m with a blood alcohol content of 0.208%.";
  d.year = 2019;
  d.labels = {{"bac", {"0.208%"}}, {"distance", {"20m"}}, {"vehicle", {"sedan"}}, {"prior_record", {"1"}}};
  return d;
}

std::vector<Document> numbered(std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back(dd_doc("c-" + std::to_string(i)));
  return docs;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("legalie_corpus_" + name);
}

}  // namespace

TEST(Corpus, EmptyFileGivesEmptyList) {
  std::istringstream in("");
  EXPECT_TRUE(parse_corpus(in).empty());
}

TEST(Corpus, SaveLoadSingleRecord) {
  auto path = temp_file("one.jsonl");
  save_corpus(path.string(), {dd_doc("c-1")});
  auto docs = load_corpus(path.string());
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0], dd_doc("c-1"));
  EXPECT_EQ(docs[0].labels.size(), 4u);
  std::filesystem::remove(path);
}

TEST(Corpus, DuplicateIdNamesTheId) {
  std::ostringstream out;
  write_corpus(out, {dd_doc("c-1"), dd_doc("c-1")});
  std::istringstream in(out.str());
  try {
    parse_corpus(in);
    FAIL() << "expected duplicate id error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("c-1"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Corpus, MalformedLineNamesLineNumber) {
  std::ostringstream out;
  write_corpus(out, {dd_doc("c-1")});
  std::istringstream in(out.str() + "{not json\n");
  try {
    parse_corpus(in);
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Corpus, RejectsForeignLabelsAndBadYears) {
  auto d = dd_doc("c-1");
  d.labels["loss"] = {"5 won"};
  EXPECT_THROW(validate_document(d), Error);
  auto y = dd_doc("c-2");
  y.year = 1989;
  EXPECT_THROW(validate_document(y), Error);
  y.year = 2100;
  EXPECT_NO_THROW(validate_document(y));
}

TEST(Corpus, MissingSectionsAreEmpty) {
  std::istringstream in(R"({"id":"r1","category":"ruling_criminal","year":2020,"labels":{}})");
  auto docs = parse_corpus(in);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].facts, "");
  EXPECT_EQ(docs[0].ruling, "");
}

TEST(Corpus, SaveLoadIdentityOnSyntheticCorpus) {
  auto cfg = synth::analysis_config(30, 30, 5);
  cfg.noise_rate = 0.3;
  auto docs = synth::generate_synthetic(cfg);
  auto more = synth::generate_synthetic(synth::benchmark_config(20, 6, 0.2, true));
  for (auto& d : more) d.id = "b-" + d.id;
  docs.insert(docs.end(), more.begin(), more.end());
  auto path = temp_file("synthetic.jsonl");
  save_corpus(path.string(), docs);
  EXPECT_EQ(load_corpus(path.string()), docs);
  std::filesystem::remove(path);
}

TEST(Split, SizesFollowTwentyPercentRule) {
  auto s = split_dataset(numbered(150), 50, 100, 1);
  EXPECT_EQ(s.train.size(), 40u);
  EXPECT_EQ(s.valid.size(), 10u);
  EXPECT_EQ(s.test.size(), 100u);

  auto t = split_dataset(numbered(10), 10, 0, 1);
  EXPECT_EQ(t.train.size(), 8u);
  EXPECT_EQ(t.valid.size(), 2u);
  EXPECT_EQ(t.test.size(), 0u);
}

TEST(Split, Deterministic) {
  auto docs = numbered(60);
  auto a = split_dataset(docs, 30, 20, 9);
  auto b = split_dataset(docs, 30, 20, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.valid, b.valid);
  EXPECT_EQ(a.test, b.test);
}

TEST(Split, InsufficientDocumentsStatesCounts) {
  try {
    split_dataset(numbered(5), 4, 3, 1);
    FAIL() << "expected error";
  } catch (const Error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos);
    EXPECT_NE(msg.find('5'), std::string::npos);
  }
}

TEST(Split, PartitionProperty) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto n = 1 + rng.below(80);
    auto n_train = rng.below(n + 1);
    auto n_test = rng.below(n - n_train + 1);
    auto s = split_dataset(numbered(n), n_train, n_test, trial);
    EXPECT_EQ(s.train.size() + s.valid.size(), n_train);
    EXPECT_EQ(s.valid.size(), static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n_train) + 1e-9)));
    EXPECT_EQ(s.test.size(), n_test);
    std::set<std::string> ids;
    for (const auto* part : {&s.train, &s.valid, &s.test})
      for (const auto& d : *part) EXPECT_TRUE(ids.insert(d.id).second) << d.id;
    EXPECT_EQ(ids.size(), n_train + n_test);
  }
}

TEST(Split, PerTaskSplitsEachCategory) {
  auto docs = synth::generate_synthetic(synth::benchmark_config(30, 2));
  auto s = split_per_task(docs, 10, 15, 3);
  std::map<Task, std::size_t> train, test;
  for (const auto& d : s.train) ++train[d.category];
  for (const auto& d : s.valid) ++train[d.category];
  for (const auto& d : s.test) ++test[d.category];
  EXPECT_EQ(train.size(), 4u);
  for (auto [t, n] : train) EXPECT_EQ(n, 10u);
  for (auto [t, n] : test) EXPECT_EQ(n, 15u);
}
