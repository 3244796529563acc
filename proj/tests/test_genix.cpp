#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "legalie/genix/checkpoint.hpp"
#include "legalie/genix/extract.hpp"
#include "legalie/genix/gradcheck.hpp"
#include "legalie/genix/train.hpp"
#include "legalie/synth.hpp"

using namespace legalie;
using namespace legalie::genix;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.d_model = 16;
  c.heads = 2;
  c.d_ff = 32;
  c.enc_layers = 1;
  c.dec_layers = 1;
  c.prompt_len = 4;
  c.max_src = 160;
  c.max_tgt = 64;
  return c;
}

template <typename T>
Model<T> tiny_model(std::uint64_t seed = 1, ModelConfig cfg = tiny()) {
  return build_model<T>(Vocab::build(), builtin_tasks(), seed, cfg);
}

std::vector<Document> short_docs() {
  std::vector<Document> docs;
  const char* facts[] = {"drove a van about 20m at 0.1%.", "drove a car about 5km at 0.2%.",
                         "drove a bus about 90m at 0.15%."};
  const char* bac[] = {"0.1%", "0.2%", "0.15%"};
  for (int i = 0; i < 3; ++i) {
    Document d;
    d.id = "s" + std::to_string(i);
    d.category = Task::drunk_driving;
    d.facts = facts[i];
    d.labels = {{"bac", {bac[i]}}};
    docs.push_back(d);
  }
  return docs;
}

}  // namespace

TEST(Vocab, SpecialsAndRoundTrip) {
  auto v = Vocab::build();
  EXPECT_EQ(Vocab::pad, 0);
  EXPECT_EQ(Vocab::sentinel(0), Vocab::sentinel0);
  EXPECT_THROW(Vocab::sentinel(10), Error);
  for (int c = 32; c < 127; ++c) EXPECT_GE(v.id(static_cast<unsigned char>(c)), Vocab::num_specials);
  EXPECT_EQ(v.decode(v.encode("fine 1,000 won.")), "fine 1,000 won.");
  EXPECT_EQ(v.id(0x80), Vocab::unk);
}

TEST(BuildModel, DeterministicPerSeed) {
  auto a = tiny_model<float>(1), b = tiny_model<float>(1), c = tiny_model<float>(2);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_NE(base_bytes(a), base_bytes(c));
}

TEST(BuildModel, PromptShapesAndInit) {
  auto m = tiny_model<double>();
  ASSERT_EQ(m.w.prompts.size(), builtin_tasks().size());
  for (const auto& p : m.w.prompts) {
    EXPECT_EQ(p.rows(), m.cfg.prompt_len);
    EXPECT_EQ(p.cols(), m.cfg.d_model);
  }
  int r = m.task_index(Task::ruling_criminal);
  const auto& text = builtin_spec(Task::ruling_criminal).prompt_text;
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(Mat<double>(m.w.prompts[r].row(0)), Mat<double>(m.w.base.embed.row(m.vocab.id(text[0]))));
  // rows cycle through the text
  EXPECT_EQ(Mat<double>(m.w.prompts[r].row(1)), Mat<double>(m.w.base.embed.row(m.vocab.id(text[1 % text.size()]))));
}

TEST(BuildModel, Errors) {
  EXPECT_THROW(build_model<float>(Vocab::build(), {}, 1), Error);
  ModelConfig bad = tiny();
  bad.heads = 3;
  EXPECT_THROW(build_model<float>(Vocab::build(), builtin_tasks(), 1, bad), Error);
  auto m = build_model<float>(Vocab::build(), {builtin_spec(Task::fraud)}, 1, tiny());
  EXPECT_THROW(m.task_index(Task::drunk_driving), Error);
}

TEST(GradCheck, TinyDoubleModelIncludingPrompts) {
  ModelConfig c = tiny();
  c.d_model = 8;
  c.d_ff = 16;
  auto m = tiny_model<double>(3, c);
  Example ex{m.task_index(Task::fraud), m.vocab.encode("sent 5 won"), encode_target(m, "loss 5 won. none.")};
  auto r = grad_check(m, ex, 1e-5, 200);
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GE(r.coords, 200u);
  EXPECT_TRUE(r.tensors.count("prompt" + std::to_string(ex.task)));
  std::size_t n_tensors = 0;
  for_each_tensor(m.w, [&](const std::string&, const Mat<double>&) { ++n_tensors; });
  EXPECT_EQ(r.tensors.size(), n_tensors);
}

TEST(Train, PromptTuneFreezesBase) {
  auto m = tiny_model<float>();
  auto before = base_bytes(m);
  auto prompts = m.w.prompts;
  DatasetSplit split;
  split.train = short_docs();
  TrainOptions opt;
  opt.mode = TrainMode::prompt_tune;
  opt.epochs = 1;
  train(m, split, opt);
  EXPECT_EQ(base_bytes(m), before);
  int dd = m.task_index(Task::drunk_driving);
  EXPECT_NE(m.w.prompts[dd], prompts[dd]);
  // prompts of tasks without examples see no gradient
  int fr = m.task_index(Task::fraud);
  EXPECT_EQ(m.w.prompts[fr], prompts[fr]);
}

TEST(Train, LossDecreasesAtDefaultFinetuneRate) {
  auto m = tiny_model<float>();
  DatasetSplit split;
  split.train = short_docs();
  TrainOptions opt;
  opt.epochs = 10;
  auto r = train(m, split, opt);
  ASSERT_EQ(r.loss_curve.size(), 10u);
  EXPECT_LT(r.loss_curve[9], r.loss_curve[0]);
}

TEST(Train, DeterministicGivenSeed) {
  DatasetSplit split;
  split.train = short_docs();
  TrainOptions opt;
  opt.epochs = 2;
  opt.lr = 1e-3;
  auto a = tiny_model<float>(), b = tiny_model<float>();
  auto ra = train(a, split, opt), rb = train(b, split, opt);
  EXPECT_EQ(ra.loss_curve, rb.loss_curve);
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(Train, Errors) {
  auto m = build_model<float>(Vocab::build(), {builtin_spec(Task::fraud)}, 1, tiny());
  DatasetSplit split;
  TrainOptions opt;
  EXPECT_THROW(train(m, split, opt), Error);
  split.train = short_docs();
  EXPECT_THROW(train(m, split, opt), Error);
  EXPECT_EQ(parse_train_mode("prompt"), TrainMode::prompt_tune);
  EXPECT_THROW(parse_train_mode("lora"), Error);
  EXPECT_DOUBLE_EQ(default_lr(TrainMode::finetune), 1e-4);
  EXPECT_DOUBLE_EQ(default_lr(TrainMode::prompt_tune), 1.0);
}

TEST(Train, OverfitsSingleExample) {
  auto m = tiny_model<float>(5);
  Document d = short_docs()[0];
  DatasetSplit split;
  split.train = {d};
  TrainOptions opt;
  opt.epochs = 400;
  opt.batch = 1;
  opt.lr = 3e-3;
  const auto& spec = builtin_spec(Task::drunk_driving);
  const std::string want = linearize(spec, d.labels);
  opt.on_epoch = [&](int epoch, double) { return epoch % 20 != 0 || generate_with_confidence(m, spec, d.facts).text != want; };
  train(m, split, opt);
  auto g = generate_with_confidence(m, spec, d.facts);
  EXPECT_EQ(g.text, want);
  EXPECT_GT(g.confidence, 0.5);
}

TEST(Sampler, EqualTaskShares) {
  // heavily unbalanced pool: 5 tasks with 1, 10, 50, 100, 500 examples
  std::vector<int> tasks;
  int sizes[] = {1, 10, 50, 100, 500};
  for (int t = 0; t < 5; ++t)
    for (int i = 0; i < sizes[t]; ++i) tasks.push_back(t);
  TaskSampler s(tasks);
  Rng rng(1);
  std::map<int, int> count;
  for (int i = 0; i < 10000; ++i) ++count[tasks[s.next(rng)]];
  for (int t = 0; t < 5; ++t) EXPECT_NEAR(count[t] / 10000.0, 0.2, 0.05);
}

TEST(Sampler, CyclesThroughEveryExample) {
  std::vector<int> tasks{0, 0, 0, 0};
  TaskSampler s(tasks);
  Rng rng(2);
  std::set<std::size_t> seen;
  for (int i = 0; i < 4; ++i) seen.insert(s.next(rng));
  EXPECT_EQ(seen.size(), 4u);
}

TEST(SpanCorruption, HandExample) {
  auto v = Vocab::build();
  auto c = corrupt_words(v, {"a", "b", "c", "d", "e"}, {{1, 2}});
  std::vector<int> src = v.encode("a ");
  src.push_back(Vocab::sentinel(0));
  for (int id : v.encode(" d e")) src.push_back(id);
  std::vector<int> tgt{Vocab::sentinel(0)};
  for (int id : v.encode(" b c ")) tgt.push_back(id);
  tgt.push_back(Vocab::sentinel(1));
  EXPECT_EQ(c.src, src);
  EXPECT_EQ(c.tgt, tgt);
  EXPECT_EQ(v.decode(c.src), "a <S0> d e");
  EXPECT_EQ(v.decode(c.tgt), "<S0> b c <S1>");
}

TEST(SpanCorruption, SampledSpansAreValid) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    auto n = static_cast<std::size_t>(rng.range(2, 200));
    auto spans = sample_spans(n, rng);
    ASSERT_FALSE(spans.empty());
    std::size_t masked = 0, prev_end = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      EXPECT_GE(spans[i].len, 1u);
      if (i) EXPECT_GT(spans[i].start, prev_end);  // separated by a kept word
      prev_end = spans[i].start + spans[i].len;
      masked += spans[i].len;
    }
    EXPECT_LE(prev_end, n);
    EXPECT_LT(masked, n);
    if (n >= 40) {
      EXPECT_NEAR(static_cast<double>(masked) / static_cast<double>(n), 0.15, 0.02);
    }
  }
  EXPECT_TRUE(sample_spans(1, rng).empty());
}

TEST(Pretrain, ZeroEpochsUnchangedAndOneEpochTouchesBaseOnly) {
  auto m = tiny_model<float>();
  auto before = to_json(m);
  std::vector<std::string> texts{"the defendant drove a car", "a total of 5 won was taken by fraud"};
  pretrain_span_corruption(m, texts, 0, 1);
  EXPECT_EQ(to_json(m), before);
  auto prompts = m.w.prompts;
  auto bytes = base_bytes(m);
  auto r = pretrain_span_corruption(m, texts, 1, 1);
  EXPECT_EQ(r.epochs_run, 1);
  EXPECT_NE(base_bytes(m), bytes);
  EXPECT_EQ(m.w.prompts, prompts);
  EXPECT_THROW(pretrain_span_corruption(m, {}, 1, 1), Error);
}

TEST(Generate, ConfidenceAndStepSums) {
  auto m = tiny_model<float>(7);
  const auto& spec = builtin_spec(Task::fraud);
  for (const char* src : {"x", "The defendant received a total of 1,000 won."}) {
    auto g = generate_with_confidence(m, spec, src);
    ASSERT_FALSE(g.token_probs.empty());
    EXPECT_GT(g.confidence, 0.0);
    EXPECT_LE(g.confidence, 1.0);
    double mean = 0;
    for (double p : g.token_probs) mean += p;
    EXPECT_NEAR(g.confidence, mean / static_cast<double>(g.token_probs.size()), 1e-12);
    EXPECT_EQ(g.token_probs.size(), g.tokens.size());
    for (double s : g.step_sums) EXPECT_NEAR(s, 1.0, 1e-6);
    auto again = generate_with_confidence(m, spec, src);
    EXPECT_EQ(again.tokens, g.tokens);
    EXPECT_EQ(again.token_probs, g.token_probs);
  }
  EXPECT_THROW(generate_with_confidence(m, spec, ""), Error);
}

TEST(Generate, TruncationIsReported) {
  auto m = tiny_model<float>();
  Document d;
  d.id = "long";
  d.category = Task::fraud;
  d.facts = std::string(400, 'a');
  auto e = extract_with_model(m, builtin_spec(Task::fraud), d);
  EXPECT_TRUE(e.provenance == Provenance::model);
  bool warned = false;
  for (const auto& w : e.warnings) warned |= w.find("truncated") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Checkpoint, RoundTrip) {
  auto m = tiny_model<float>(9);
  auto path = (std::filesystem::temp_directory_path() / "legalie_ckpt.json").string();
  save_checkpoint(path, m);
  auto back = load_checkpoint<float>(path);
  EXPECT_EQ(base_bytes(back), base_bytes(m));
  EXPECT_EQ(back.w.prompts, m.w.prompts);
  EXPECT_EQ(back.cfg, m.cfg);
  EXPECT_TRUE(back.vocab == m.vocab);
  const auto& spec = builtin_spec(Task::drunk_driving);
  EXPECT_EQ(generate_with_confidence(back, spec, "drove a van").tokens,
            generate_with_confidence(m, spec, "drove a van").tokens);
  EXPECT_THROW(load_checkpoint<float>("/nonexistent/ckpt.json"), Error);
}

TEST(ExactMatchCount, AbsentEqualsAbsent) {
  ExactMatch em;
  const auto& spec = builtin_spec(Task::fraud);
  add_exact_match(em, spec, {{"loss", {"1 won", "2 won"}}}, {{"loss", {"2 won", "1 won"}}});
  EXPECT_EQ(em.matched, 2);
  add_exact_match(em, spec, {{"loss", {"1 won"}}}, {});
  EXPECT_EQ(em.matched, 3);
  EXPECT_EQ(em.total, 4);
}
