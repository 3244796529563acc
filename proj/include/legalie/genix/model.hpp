#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "legalie/error.hpp"
#include "legalie/genix/layers.hpp"
#include "legalie/genix/vocab.hpp"
#include "legalie/rng.hpp"
#include "legalie/taskschema.hpp"

namespace legalie::genix {

struct ModelConfig {
  int d_model = 64;
  int heads = 4;
  int d_ff = 256;
  int enc_layers = 2;
  int dec_layers = 2;
  int prompt_len = 20;
  int max_src = 512;  // source tokens, excluding the soft prompt
  int max_tgt = 128;  // generated tokens, including EOS

  bool operator==(const ModelConfig&) const = default;
};

inline void validate(const ModelConfig& c) {
  if (c.d_model <= 0 || c.heads <= 0 || c.d_model % c.heads != 0)
    throw Error("d_model must be a positive multiple of heads");
  if (c.d_ff <= 0 || c.enc_layers < 0 || c.dec_layers < 0 || c.prompt_len < 0 || c.max_src <= 0 || c.max_tgt <= 0)
    throw Error("invalid model dimensions");
}

template <typename T>
struct EncoderBlock {
  Norm<T> ln1;
  Attention<T> attn;
  Norm<T> ln2;
  Linear<T> ff1, ff2;
};

template <typename T>
struct DecoderBlock {
  Norm<T> ln1;
  Attention<T> self;
  Norm<T> ln2;
  Attention<T> cross;
  Norm<T> ln3;
  Linear<T> ff1, ff2;
};

template <typename T>
struct BaseParams {
  Mat<T> embed;  // vocab x d
  std::vector<EncoderBlock<T>> enc;
  Norm<T> enc_norm;
  std::vector<DecoderBlock<T>> dec;
  Norm<T> dec_norm;
  Linear<T> out;  // d x vocab
};

// Base (shared) parameters plus one soft-prompt matrix per task.
template <typename T>
struct Weights {
  BaseParams<T> base;
  std::vector<Mat<T>> prompts;  // prompt_len x d each
};

// Visits every base tensor with a stable dotted name, in a fixed order.
template <typename B, typename F>
void for_each_base_tensor(B& base, F&& f) {
  auto lin = [&](const std::string& n, auto& l) {
    f(n + ".w", l.w);
    f(n + ".b", l.b);
  };
  auto norm = [&](const std::string& n, auto& l) {
    f(n + ".g", l.g);
    f(n + ".b", l.b);
  };
  auto attn = [&](const std::string& n, auto& a) {
    lin(n + ".q", a.q);
    lin(n + ".k", a.k);
    lin(n + ".v", a.v);
    lin(n + ".o", a.o);
  };
  f(std::string("embed"), base.embed);
  for (std::size_t i = 0; i < base.enc.size(); ++i) {
    auto p = "enc" + std::to_string(i);
    auto& b = base.enc[i];
    norm(p + ".ln1", b.ln1);
    attn(p + ".attn", b.attn);
    norm(p + ".ln2", b.ln2);
    lin(p + ".ff1", b.ff1);
    lin(p + ".ff2", b.ff2);
  }
  norm("enc_norm", base.enc_norm);
  for (std::size_t i = 0; i < base.dec.size(); ++i) {
    auto p = "dec" + std::to_string(i);
    auto& b = base.dec[i];
    norm(p + ".ln1", b.ln1);
    attn(p + ".self", b.self);
    norm(p + ".ln2", b.ln2);
    attn(p + ".cross", b.cross);
    norm(p + ".ln3", b.ln3);
    lin(p + ".ff1", b.ff1);
    lin(p + ".ff2", b.ff2);
  }
  norm("dec_norm", base.dec_norm);
  lin("out", base.out);
}

template <typename W, typename F>
void for_each_tensor(W& w, F&& f) {
  for_each_base_tensor(w.base, f);
  for (std::size_t i = 0; i < w.prompts.size(); ++i) f("prompt" + std::to_string(i), w.prompts[i]);
}

template <typename T>
Weights<T> zeros_like(const Weights<T>& w) {
  Weights<T> z = w;
  for_each_tensor(z, [](const std::string&, Mat<T>& m) { m.setZero(); });
  return z;
}

template <typename T>
struct Model {
  ModelConfig cfg;
  Vocab vocab;
  std::vector<TaskSpec> tasks;
  Weights<T> w;
  Mat<T> pe;  // derived, not serialized

  int task_index(Task t) const {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].task == t) return static_cast<int>(i);
    throw Error("model has no soft prompt for task " + std::string(to_string(t)));
  }

  void refresh_derived() {
    pe = positional_table<T>(std::max(cfg.prompt_len + cfg.max_src, cfg.max_tgt + 1), cfg.d_model);
  }
};

template <typename T>
Model<T> build_model(const Vocab& vocab, const std::vector<TaskSpec>& tasks, std::uint64_t seed,
                     const ModelConfig& cfg = {}) {
  validate(cfg);
  if (tasks.empty()) throw Error("model needs at least one task");
  Model<T> m;
  m.cfg = cfg;
  m.vocab = vocab;
  m.tasks = tasks;
  const auto d = cfg.d_model, ff = cfg.d_ff, v = vocab.size();

  auto& b = m.w.base;
  auto lin = [](Linear<T>& l, int in, int out) {
    l.w.resize(in, out);
    l.b = Mat<T>::Zero(1, out);
  };
  auto norm = [d](Norm<T>& n) {
    n.g = Mat<T>::Ones(1, d);
    n.b = Mat<T>::Zero(1, d);
  };
  auto attn = [&](Attention<T>& a) {
    lin(a.q, d, d);
    lin(a.k, d, d);
    lin(a.v, d, d);
    lin(a.o, d, d);
  };
  b.embed.resize(v, d);
  b.enc.resize(static_cast<std::size_t>(cfg.enc_layers));
  for (auto& e : b.enc) {
    norm(e.ln1);
    attn(e.attn);
    norm(e.ln2);
    lin(e.ff1, d, ff);
    lin(e.ff2, ff, d);
  }
  norm(b.enc_norm);
  b.dec.resize(static_cast<std::size_t>(cfg.dec_layers));
  for (auto& e : b.dec) {
    norm(e.ln1);
    attn(e.self);
    norm(e.ln2);
    attn(e.cross);
    norm(e.ln3);
    lin(e.ff1, d, ff);
    lin(e.ff2, ff, d);
  }
  norm(b.dec_norm);
  lin(b.out, d, v);

  // uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for projections, uniform(-0.5, 0.5)
  // for embeddings; gains and biases keep their constant init.
  Rng rng(seed);
  for_each_base_tensor(b, [&](const std::string& name, Mat<T>& t) {
    bool is_weight = name.size() > 2 && name.compare(name.size() - 2, 2, ".w") == 0;
    if (name == "embed") {
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<T>(rng.uniform(-0.5, 0.5));
    } else if (is_weight) {
      double a = 1.0 / std::sqrt(static_cast<double>(t.rows()));
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<T>(rng.uniform(-a, a));
    }
  });

  // soft prompts start as the embeddings of the prompt text, cycled to length
  for (const auto& spec : tasks) {
    Mat<T> p(cfg.prompt_len, d);
    auto ids = vocab.encode(spec.prompt_text);
    if (ids.empty()) ids.push_back(Vocab::unk);
    for (int r = 0; r < cfg.prompt_len; ++r) p.row(r) = b.embed.row(ids[static_cast<std::size_t>(r) % ids.size()]);
    m.w.prompts.push_back(std::move(p));
  }
  m.refresh_derived();
  return m;
}

// ----------------------------------------------------------------------------

struct Example {
  int task = -1;            // prompt index; -1 = no soft prompt (pre-training)
  std::vector<int> src;     // source ids
  std::vector<int> tgt;     // target ids ending in EOS
};

struct EncodedSource {
  std::vector<int> ids;
  bool truncated = false;
};

template <typename T>
EncodedSource encode_source(const Model<T>& m, std::string_view text) {
  EncodedSource s{m.vocab.encode(text), false};
  if (static_cast<int>(s.ids.size()) > m.cfg.max_src) {
    s.ids.resize(static_cast<std::size_t>(m.cfg.max_src));
    s.truncated = true;
  }
  return s;
}

template <typename T>
std::vector<int> encode_target(const Model<T>& m, std::string_view text) {
  auto ids = m.vocab.encode(text);
  if (static_cast<int>(ids.size()) > m.cfg.max_tgt - 1) ids.resize(static_cast<std::size_t>(m.cfg.max_tgt - 1));
  ids.push_back(Vocab::eos);
  return ids;
}

template <typename T>
Mat<T> encoder_input(const Model<T>& m, int task, const std::vector<int>& src) {
  const int p = task >= 0 ? m.cfg.prompt_len : 0;
  const auto n = p + static_cast<Eigen::Index>(src.size());
  Mat<T> x(n, m.cfg.d_model);
  if (p) x.topRows(p) = m.w.prompts[static_cast<std::size_t>(task)];
  for (std::size_t i = 0; i < src.size(); ++i) x.row(p + static_cast<Eigen::Index>(i)) = m.w.base.embed.row(src[i]);
  x += m.pe.topRows(n);
  return x;
}

namespace detail {

template <typename T>
struct FeedForwardCache {
  Mat<T> in, pre, act;
};

template <typename T>
Mat<T> ff_fwd(const Linear<T>& ff1, const Linear<T>& ff2, const Mat<T>& x, FeedForwardCache<T>* c) {
  Mat<T> pre = linear_fwd(ff1, x);
  Mat<T> act = gelu_fwd(pre);
  Mat<T> y = linear_fwd(ff2, act);
  if (c) {
    c->in = x;
    c->pre = std::move(pre);
    c->act = std::move(act);
  }
  return y;
}

template <typename T>
Mat<T> ff_bwd(const Linear<T>& ff1, const Linear<T>& ff2, Linear<T>& g1, Linear<T>& g2, const FeedForwardCache<T>& c,
              const Mat<T>& dy) {
  Mat<T> dact = linear_bwd(ff2, g2, c.act, dy);
  return linear_bwd(ff1, g1, c.in, gelu_bwd(c.pre, dact));
}

template <typename T>
struct EncCache {
  NormCache<T> ln1, ln2;
  AttnCache<T> attn;
  FeedForwardCache<T> ff;
};

template <typename T>
struct DecCache {
  NormCache<T> ln1, ln2, ln3;
  AttnCache<T> self, cross;
  FeedForwardCache<T> ff;
};

}  // namespace detail

template <typename T>
Mat<T> encode(const Model<T>& m, int task, const std::vector<int>& src) {
  Mat<T> x = encoder_input(m, task, src);
  for (const auto& b : m.w.base.enc) {
    Mat<T> a = norm_fwd<T>(b.ln1, x, nullptr);
    x += attn_fwd<T>(b.attn, a, a, m.cfg.heads, false, nullptr);
    x += detail::ff_fwd<T>(b.ff1, b.ff2, norm_fwd<T>(b.ln2, x, nullptr), nullptr);
  }
  return norm_fwd<T>(m.w.base.enc_norm, x, nullptr);
}

// Mean token cross-entropy of the target under teacher forcing. When `grad`
// is non-null the gradient is accumulated into it, multiplied by `scale`.
template <typename T>
T loss_and_grad(const Model<T>& m, const Example& ex, Weights<T>* grad, T scale = T(1)) {
  const auto& base = m.w.base;
  const int heads = m.cfg.heads;
  const int p = ex.task >= 0 ? m.cfg.prompt_len : 0;
  const bool train = grad != nullptr;
  if (ex.tgt.empty()) throw Error("example has an empty target");

  // encoder
  std::vector<detail::EncCache<T>> ec(base.enc.size());
  Mat<T> x = encoder_input(m, ex.task, ex.src);
  for (std::size_t l = 0; l < base.enc.size(); ++l) {
    const auto& b = base.enc[l];
    auto& c = ec[l];
    Mat<T> a = norm_fwd(b.ln1, x, train ? &c.ln1 : nullptr);
    x += attn_fwd(b.attn, a, a, heads, false, train ? &c.attn : nullptr);
    Mat<T> h = norm_fwd(b.ln2, x, train ? &c.ln2 : nullptr);
    x += detail::ff_fwd(b.ff1, b.ff2, h, train ? &c.ff : nullptr);
  }
  NormCache<T> enc_norm_cache;
  Mat<T> enc_out = norm_fwd(base.enc_norm, x, train ? &enc_norm_cache : nullptr);

  // decoder, teacher forced: input = BOS + target[:-1]
  const auto t_len = static_cast<Eigen::Index>(ex.tgt.size());
  std::vector<int> dec_in(ex.tgt.size());
  dec_in[0] = Vocab::bos;
  for (std::size_t i = 1; i < ex.tgt.size(); ++i) dec_in[i] = ex.tgt[i - 1];
  Mat<T> y(t_len, m.cfg.d_model);
  for (Eigen::Index i = 0; i < t_len; ++i) y.row(i) = base.embed.row(dec_in[static_cast<std::size_t>(i)]);
  y += m.pe.topRows(t_len);

  std::vector<detail::DecCache<T>> dc(base.dec.size());
  for (std::size_t l = 0; l < base.dec.size(); ++l) {
    const auto& b = base.dec[l];
    auto& c = dc[l];
    Mat<T> a = norm_fwd(b.ln1, y, train ? &c.ln1 : nullptr);
    y += attn_fwd(b.self, a, a, heads, true, train ? &c.self : nullptr);
    Mat<T> q = norm_fwd(b.ln2, y, train ? &c.ln2 : nullptr);
    y += attn_fwd(b.cross, q, enc_out, heads, false, train ? &c.cross : nullptr);
    Mat<T> h = norm_fwd(b.ln3, y, train ? &c.ln3 : nullptr);
    y += detail::ff_fwd(b.ff1, b.ff2, h, train ? &c.ff : nullptr);
  }
  NormCache<T> dec_norm_cache;
  Mat<T> yf = norm_fwd(base.dec_norm, y, train ? &dec_norm_cache : nullptr);
  Mat<T> probs = linear_fwd(base.out, yf);
  softmax_rows(probs);

  T loss = 0;
  for (Eigen::Index i = 0; i < t_len; ++i)
    loss -= std::log(std::max(probs(i, ex.tgt[static_cast<std::size_t>(i)]), std::numeric_limits<T>::min()));
  loss /= static_cast<T>(t_len);
  if (!train) return loss;

  // backward
  auto& g = *grad;
  Mat<T> dlogits = probs;
  for (Eigen::Index i = 0; i < t_len; ++i) dlogits(i, ex.tgt[static_cast<std::size_t>(i)]) -= T(1);
  dlogits *= scale / static_cast<T>(t_len);

  Mat<T> dy = norm_bwd(base.dec_norm, g.base.dec_norm, dec_norm_cache, linear_bwd(base.out, g.base.out, yf, dlogits));
  Mat<T> d_enc_out = Mat<T>::Zero(enc_out.rows(), enc_out.cols());
  for (std::size_t l = base.dec.size(); l-- > 0;) {
    const auto& b = base.dec[l];
    auto& gb = g.base.dec[l];
    const auto& c = dc[l];
    dy += norm_bwd(b.ln3, gb.ln3, c.ln3, detail::ff_bwd(b.ff1, b.ff2, gb.ff1, gb.ff2, c.ff, dy));
    auto cross = attn_bwd(b.cross, gb.cross, c.cross, heads, dy);
    d_enc_out += cross.dxkv;
    dy += norm_bwd(b.ln2, gb.ln2, c.ln2, cross.dxq);
    auto self = attn_bwd(b.self, gb.self, c.self, heads, dy);
    self.dxq += self.dxkv;
    dy += norm_bwd(b.ln1, gb.ln1, c.ln1, self.dxq);
  }
  for (Eigen::Index i = 0; i < t_len; ++i) g.base.embed.row(dec_in[static_cast<std::size_t>(i)]) += dy.row(i);

  Mat<T> dx = norm_bwd(base.enc_norm, g.base.enc_norm, enc_norm_cache, d_enc_out);
  for (std::size_t l = base.enc.size(); l-- > 0;) {
    const auto& b = base.enc[l];
    auto& gb = g.base.enc[l];
    const auto& c = ec[l];
    dx += norm_bwd(b.ln2, gb.ln2, c.ln2, detail::ff_bwd(b.ff1, b.ff2, gb.ff1, gb.ff2, c.ff, dx));
    auto at = attn_bwd(b.attn, gb.attn, c.attn, heads, dx);
    at.dxq += at.dxkv;
    dx += norm_bwd(b.ln1, gb.ln1, c.ln1, at.dxq);
  }
  if (p) g.prompts[static_cast<std::size_t>(ex.task)] += dx.topRows(p);
  for (std::size_t i = 0; i < ex.src.size(); ++i) g.base.embed.row(ex.src[i]) += dx.row(p + static_cast<Eigen::Index>(i));
  return loss;
}

// ----------------------------------------------------------------------------
// Greedy decoding with per-layer key/value caches.

struct GenOutput {
  std::string text;
  std::vector<int> tokens;          // generated ids, including EOS when produced
  std::vector<double> token_probs;  // probability of each generated token
  std::vector<double> step_sums;    // sum of each step's probability vector
  double confidence = 0.0;          // arithmetic mean of token_probs
  bool truncated = false;           // source was cut at max_src
};

template <typename T>
GenOutput generate_ids(const Model<T>& m, int task, const std::vector<int>& src, bool truncated = false) {
  const auto& base = m.w.base;
  const int heads = m.cfg.heads;
  const auto d = m.cfg.d_model;
  Mat<T> enc_out = encode(m, task, src);

  const std::size_t layers = base.dec.size();
  std::vector<Mat<T>> ck(layers), cv(layers), sk(layers), sv(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    ck[l] = linear_fwd(base.dec[l].cross.k, enc_out);
    cv[l] = linear_fwd(base.dec[l].cross.v, enc_out);
    sk[l].resize(0, d);
    sv[l].resize(0, d);
  }

  GenOutput out;
  out.truncated = truncated;
  int token = Vocab::bos;
  for (int t = 0; t < m.cfg.max_tgt; ++t) {
    Mat<T> x = base.embed.row(token) + m.pe.row(t);
    for (std::size_t l = 0; l < layers; ++l) {
      const auto& b = base.dec[l];
      Mat<T> a = norm_fwd<T>(b.ln1, x, nullptr);
      Mat<T> k = linear_fwd(b.self.k, a), v = linear_fwd(b.self.v, a);
      sk[l].conservativeResize(t + 1, d);
      sv[l].conservativeResize(t + 1, d);
      sk[l].row(t) = k;
      sv[l].row(t) = v;
      x += linear_fwd<T>(b.self.o, attend_cached<T>(linear_fwd(b.self.q, a), sk[l], sv[l], heads));
      Mat<T> q = norm_fwd<T>(b.ln2, x, nullptr);
      x += linear_fwd<T>(b.cross.o, attend_cached<T>(linear_fwd(b.cross.q, q), ck[l], cv[l], heads));
      x += detail::ff_fwd<T>(b.ff1, b.ff2, norm_fwd<T>(b.ln3, x, nullptr), nullptr);
    }
    Mat<T> probs = linear_fwd<T>(base.out, norm_fwd<T>(base.dec_norm, x, nullptr));
    softmax_rows(probs);
    Eigen::Index best = 0;
    probs.row(0).maxCoeff(&best);
    token = static_cast<int>(best);
    out.tokens.push_back(token);
    out.token_probs.push_back(static_cast<double>(probs(0, best)));
    out.step_sums.push_back(static_cast<double>(probs.row(0).sum()));
    if (token == Vocab::eos) break;
  }
  std::vector<int> body = out.tokens;
  if (!body.empty() && body.back() == Vocab::eos) body.pop_back();
  out.text = m.vocab.decode(body);
  double sum = 0;
  for (double p : out.token_probs) sum += p;
  out.confidence = out.token_probs.empty() ? 0.0 : sum / static_cast<double>(out.token_probs.size());
  return out;
}

template <typename T>
GenOutput generate_with_confidence(const Model<T>& m, const TaskSpec& task, std::string_view source) {
  if (source.empty()) throw Error("cannot generate from an empty source text");
  auto src = encode_source(m, source);
  return generate_ids(m, m.task_index(task.task), src.ids, src.truncated);
}

}  // namespace legalie::genix
