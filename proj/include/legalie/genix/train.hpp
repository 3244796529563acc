#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/genix/model.hpp"
#include "legalie/rng.hpp"
#include "legalie/taskschema.hpp"

namespace legalie::genix {

enum class TrainMode { finetune, prompt_tune };

inline std::string_view to_string(TrainMode m) { return m == TrainMode::finetune ? "finetune" : "prompt"; }

inline TrainMode parse_train_mode(std::string_view s) {
  if (s == "finetune") return TrainMode::finetune;
  if (s == "prompt" || s == "prompt_tune" || s == "prompt-tune") return TrainMode::prompt_tune;
  throw Error("unknown training mode '" + std::string(s) + "'");
}

inline double default_lr(TrainMode m) { return m == TrainMode::finetune ? 1e-4 : 1.0; }

// Adam with bias correction, betas fixed at (0.9, 0.999).
template <typename T>
class Adam {
 public:
  explicit Adam(const Weights<T>& like) : m_(zeros_like(like)), v_(zeros_like(like)) {}

  void step(Weights<T>& w, const Weights<T>& g, double lr, bool update_base, bool update_prompts) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1, t_), c2 = 1.0 - std::pow(b2, t_);
    auto upd = [&](Mat<T>& p, const Mat<T>& gr, Mat<T>& m, Mat<T>& v) {
      m = T(b1) * m + T(1 - b1) * gr;
      v = T(b2) * v + T(1 - b2) * gr.cwiseProduct(gr);
      p.array() -= T(lr) * (m.array() / T(c1)) / ((v.array() / T(c2)).sqrt() + T(eps));
    };
    if (update_base) {
      std::vector<Mat<T>*> ps, ms, vs;
      std::vector<const Mat<T>*> gs;
      for_each_base_tensor(w.base, [&](const std::string&, Mat<T>& t) { ps.push_back(&t); });
      for_each_base_tensor(g.base, [&](const std::string&, const Mat<T>& t) { gs.push_back(&t); });
      for_each_base_tensor(m_.base, [&](const std::string&, Mat<T>& t) { ms.push_back(&t); });
      for_each_base_tensor(v_.base, [&](const std::string&, Mat<T>& t) { vs.push_back(&t); });
      for (std::size_t i = 0; i < ps.size(); ++i) upd(*ps[i], *gs[i], *ms[i], *vs[i]);
    }
    if (update_prompts)
      for (std::size_t i = 0; i < w.prompts.size(); ++i) upd(w.prompts[i], g.prompts[i], m_.prompts[i], v_.prompts[i]);
  }

  static constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;

 private:
  Weights<T> m_, v_;
  int t_ = 0;
};

// Picks a task uniformly, then the next example from that task's shuffled
// queue; queues reshuffle when exhausted.
class TaskSampler {
 public:
  explicit TaskSampler(const std::vector<int>& task_of_example) {
    std::map<int, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < task_of_example.size(); ++i) by_task[task_of_example[i]].push_back(i);
    for (auto& [t, idx] : by_task) {
      tasks_.push_back(t);
      queues_.push_back({std::move(idx), 0});
    }
    if (tasks_.empty()) throw Error("no training examples");
  }

  std::size_t next(Rng& rng) {
    auto& q = queues_[rng.below(queues_.size())];
    if (q.pos == 0) rng.shuffle(q.items);
    std::size_t ex = q.items[q.pos];
    q.pos = (q.pos + 1) % q.items.size();
    return ex;
  }

  const std::vector<int>& tasks() const { return tasks_; }

 private:
  struct Queue {
    std::vector<std::size_t> items;
    std::size_t pos;
  };
  std::vector<int> tasks_;
  std::vector<Queue> queues_;
};

template <typename T>
T global_norm(const Weights<T>& g, bool base, bool prompts) {
  T s = 0;
  if (base) for_each_base_tensor(g.base, [&](const std::string&, const Mat<T>& t) { s += t.squaredNorm(); });
  if (prompts)
    for (const auto& p : g.prompts) s += p.squaredNorm();
  return std::sqrt(s);
}

template <typename T>
void scale_grads(Weights<T>& g, T f) {
  for_each_tensor(g, [f](const std::string&, Mat<T>& t) { t *= f; });
}

struct TrainOptions {
  TrainMode mode = TrainMode::finetune;
  int epochs = 10;
  int batch = 8;
  std::optional<double> lr;  // defaults per mode
  std::uint64_t seed = 1;
  double clip = 1.0;  // global gradient norm; <= 0 disables
  // Examples drawn per epoch; 0 means one pass worth (the number of examples).
  std::size_t steps_per_epoch = 0;
  // Called after every epoch with (epoch, mean loss); returning false stops training.
  std::function<bool(int, double)> on_epoch;
};

struct TrainResult {
  std::vector<double> loss_curve;
  int epochs_run = 0;
};

// Generic loop over prebuilt examples. Prompt gradients only flow for
// examples with a task; pre-training examples carry task -1.
template <typename T>
TrainResult train_examples(Model<T>& model, const std::vector<Example>& examples, const TrainOptions& opt,
                           bool update_base, bool update_prompts) {
  if (examples.empty()) throw Error("training set is empty");
  if (opt.batch <= 0) throw Error("batch size must be positive");
  if (opt.epochs < 0) throw Error("epochs must be non-negative");
  const double lr = opt.lr.value_or(default_lr(opt.mode));
  std::vector<int> tasks;
  for (const auto& e : examples) tasks.push_back(e.task);
  TaskSampler sampler(tasks);
  Rng rng(opt.seed);
  Adam<T> adam(model.w);
  Weights<T> grad = zeros_like(model.w);
  const std::size_t per_epoch = opt.steps_per_epoch ? opt.steps_per_epoch : examples.size();

  TrainResult res;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    double total = 0;
    std::size_t done = 0;
    while (done < per_epoch) {
      const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(opt.batch), per_epoch - done);
      for_each_tensor(grad, [](const std::string&, Mat<T>& t) { t.setZero(); });
      for (std::size_t i = 0; i < n; ++i)
        total += static_cast<double>(loss_and_grad(model, examples[sampler.next(rng)], &grad, T(1) / T(n)));
      done += n;
      if (opt.clip > 0) {
        T norm = global_norm(grad, update_base, update_prompts);
        if (norm > T(opt.clip)) scale_grads(grad, T(opt.clip) / norm);
      }
      adam.step(model.w, grad, lr, update_base, update_prompts);
    }
    res.loss_curve.push_back(total / static_cast<double>(per_epoch));
    res.epochs_run = epoch;
    if (opt.on_epoch && !opt.on_epoch(epoch, res.loss_curve.back())) break;
  }
  return res;
}

// One example per (document, task) pair the model knows; the document's own
// category must be among the model's tasks.
template <typename T>
std::vector<Example> build_examples(const Model<T>& m, const std::vector<Document>& docs) {
  std::vector<Example> out;
  for (const auto& d : docs) {
    for (Task t : label_tasks(d)) {
      int idx = -1;
      for (std::size_t i = 0; i < m.tasks.size(); ++i)
        if (m.tasks[i].task == t) idx = static_cast<int>(i);
      if (idx < 0) {
        if (t == d.category) throw Error("document '" + d.id + "' has task " + std::string(to_string(t)) +
                                         " which the model does not know");
        continue;
      }
      const auto& spec = m.tasks[static_cast<std::size_t>(idx)];
      const auto& src = d.source(source_of(t));
      if (src.empty()) continue;
      out.push_back({idx, encode_source(m, src).ids, encode_target(m, linearize(spec, labels_for(d, spec)))});
    }
  }
  return out;
}

template <typename T>
TrainResult train(Model<T>& model, const DatasetSplit& split, const TrainOptions& opt) {
  if (split.train.empty()) throw Error("training split is empty");
  auto examples = build_examples(model, split.train);
  const bool ft = opt.mode == TrainMode::finetune;
  return train_examples(model, examples, opt, ft, true);
}

// ---- span corruption ----

struct MaskSpan {
  std::size_t start = 0;  // word index
  std::size_t len = 0;
};

struct Corrupted {
  std::vector<int> src;
  std::vector<int> tgt;  // without EOS
};

// Replaces each span with sentinel S_i in the source; the target lists
// "S_i <span words>" for each span and closes with the next sentinel.
inline Corrupted corrupt_words(const Vocab& vocab, const std::vector<std::string>& words,
                               const std::vector<MaskSpan>& spans) {
  if (spans.size() + 1 > static_cast<std::size_t>(Vocab::num_sentinels)) throw Error("too many masked spans");
  Corrupted c;
  auto add_text = [&](std::vector<int>& out, std::string_view s) {
    auto ids = vocab.encode(s);
    out.insert(out.end(), ids.begin(), ids.end());
  };
  std::size_t w = 0, s = 0;
  bool first = true;
  auto sep = [&](std::vector<int>& out, bool& f) {
    if (!f) add_text(out, " ");
    f = false;
  };
  while (w < words.size()) {
    if (s < spans.size() && spans[s].start == w) {
      sep(c.src, first);
      int sentinel = vocab.sentinel(static_cast<int>(s));
      c.src.push_back(sentinel);
      if (!c.tgt.empty()) add_text(c.tgt, " ");
      c.tgt.push_back(sentinel);
      for (std::size_t k = 0; k < spans[s].len; ++k) {
        add_text(c.tgt, " ");
        add_text(c.tgt, words[w + k]);
      }
      w += spans[s].len;
      ++s;
    } else {
      sep(c.src, first);
      add_text(c.src, words[w]);
      ++w;
    }
  }
  if (!c.tgt.empty()) add_text(c.tgt, " ");
  c.tgt.push_back(vocab.sentinel(static_cast<int>(spans.size())));
  return c;
}

// Random composition of m into k positive parts.
inline std::vector<std::size_t> random_composition(std::size_t m, std::size_t k, Rng& rng) {
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < m; ++i) cuts.push_back(i);
  rng.shuffle(cuts);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> parts;
  std::size_t prev = 0;
  for (auto c : cuts) {
    parts.push_back(c - prev);
    prev = c;
  }
  parts.push_back(m - prev);
  return parts;
}

// 15% of words masked in spans of mean length 3. Texts under 2 words get no
// spans.
inline std::vector<MaskSpan> sample_spans(std::size_t n_words, Rng& rng, double rate = 0.15, double mean_len = 3.0) {
  if (n_words < 2) return {};
  std::size_t n_mask = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(rate * static_cast<double>(n_words))),
                                               1, n_words - 1);
  std::size_t n_spans = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(n_mask) / mean_len)));
  n_spans = std::min({n_spans, n_mask, n_words - n_mask, static_cast<std::size_t>(Vocab::num_sentinels - 1)});
  auto masked = random_composition(n_mask, n_spans, rng);
  // unmasked runs: the leading and trailing ones may be empty, inner ones may not
  auto kept = random_composition(n_words - n_mask + 2, n_spans + 1, rng);
  kept.front() -= 1;
  kept.back() -= 1;
  std::vector<MaskSpan> spans;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n_spans; ++i) {
    pos += kept[i];
    spans.push_back({pos, masked[i]});
    pos += masked[i];
  }
  return spans;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

// Updates base parameters only; soft prompts are not used.
template <typename T>
TrainResult pretrain_span_corruption(Model<T>& model, const std::vector<std::string>& texts, int epochs,
                                     std::uint64_t seed, double lr = 1e-3, int batch = 8) {
  if (texts.empty()) throw Error("no pre-training texts");
  TrainResult res;
  if (epochs <= 0) return res;
  Rng mask_rng(seed ^ 0x5eedULL);
  std::vector<std::vector<std::string>> words;
  for (const auto& t : texts) {
    auto w = split_words(t);
    if (w.size() >= 2) words.push_back(std::move(w));
  }
  if (words.empty()) throw Error("pre-training texts need at least two words");
  Adam<T> adam(model.w);
  Weights<T> grad = zeros_like(model.w);
  Rng order(seed);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    // fresh masks each epoch
    std::vector<Example> ex;
    for (const auto& w : words) {
      auto c = corrupt_words(model.vocab, w, sample_spans(w.size(), mask_rng));
      if (static_cast<int>(c.src.size()) > model.cfg.max_src) c.src.resize(static_cast<std::size_t>(model.cfg.max_src));
      if (static_cast<int>(c.tgt.size()) > model.cfg.max_tgt - 1) c.tgt.resize(static_cast<std::size_t>(model.cfg.max_tgt - 1));
      c.tgt.push_back(Vocab::eos);
      ex.push_back({-1, std::move(c.src), std::move(c.tgt)});
    }
    std::vector<std::size_t> idx(ex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    order.shuffle(idx);
    double total = 0;
    for (std::size_t b = 0; b < idx.size(); b += static_cast<std::size_t>(batch)) {
      const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(batch), idx.size() - b);
      for_each_tensor(grad, [](const std::string&, Mat<T>& t) { t.setZero(); });
      for (std::size_t i = 0; i < n; ++i)
        total += static_cast<double>(loss_and_grad(model, ex[idx[b + i]], &grad, T(1) / T(n)));
      T norm = global_norm(grad, true, false);
      if (norm > T(1)) scale_grads(grad, T(1) / norm);
      adam.step(model.w, grad, lr, true, false);
    }
    res.loss_curve.push_back(total / static_cast<double>(ex.size()));
    res.epochs_run = epoch;
  }
  return res;
}

}  // namespace legalie::genix
