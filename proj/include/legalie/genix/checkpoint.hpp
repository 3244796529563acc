#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/error.hpp"
#include "legalie/genix/model.hpp"

namespace legalie::genix {

inline constexpr std::string_view checkpoint_format = "legalie-genix";
inline constexpr int checkpoint_version = 1;

inline nlohmann::json to_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},       {"heads", c.heads},           {"d_ff", c.d_ff},
          {"enc_layers", c.enc_layers}, {"dec_layers", c.dec_layers}, {"prompt_len", c.prompt_len},
          {"max_src", c.max_src},       {"max_tgt", c.max_tgt}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.heads = j.at("heads").get<int>();
  c.d_ff = j.at("d_ff").get<int>();
  c.enc_layers = j.at("enc_layers").get<int>();
  c.dec_layers = j.at("dec_layers").get<int>();
  c.prompt_len = j.at("prompt_len").get<int>();
  c.max_src = j.at("max_src").get<int>();
  c.max_tgt = j.at("max_tgt").get<int>();
  validate(c);
  return c;
}

template <typename T>
nlohmann::json to_json(const Model<T>& m) {
  nlohmann::json tensors = nlohmann::json::object();
  for_each_tensor(m.w, [&](const std::string& name, const Mat<T>& t) {
    std::vector<double> data(t.data(), t.data() + t.size());
    tensors[name] = {{"rows", t.rows()}, {"cols", t.cols()}, {"data", data}};
  });
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& s : m.tasks) tasks.push_back(legalie::to_json(s));
  std::string chars(m.vocab.chars().begin(), m.vocab.chars().end());
  std::vector<int> char_codes;
  for (unsigned char c : chars) char_codes.push_back(c);
  return {{"format", checkpoint_format}, {"version", checkpoint_version}, {"config", to_json(m.cfg)},
          {"vocab", char_codes},         {"tasks", tasks},               {"tensors", tensors}};
}

template <typename T>
Model<T> model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != checkpoint_format) throw Error("not a model checkpoint");
  if (j.value("version", 0) != checkpoint_version)
    throw Error("unsupported checkpoint version " + std::to_string(j.value("version", 0)));
  std::vector<TaskSpec> tasks;
  for (const auto& t : j.at("tasks")) tasks.push_back(task_spec_from_json(t));
  std::string chars;
  for (int c : j.at("vocab").get<std::vector<int>>()) chars.push_back(static_cast<char>(c));
  auto cfg = model_config_from_json(j.at("config"));
  // build for shapes, then overwrite every tensor
  Model<T> m = build_model<T>(Vocab::from_chars(chars), tasks, 0, cfg);
  const auto& tensors = j.at("tensors");
  for_each_tensor(m.w, [&](const std::string& name, Mat<T>& t) {
    if (!tensors.contains(name)) throw Error("checkpoint is missing tensor '" + name + "'");
    const auto& jt = tensors.at(name);
    if (jt.at("rows").get<Eigen::Index>() != t.rows() || jt.at("cols").get<Eigen::Index>() != t.cols())
      throw Error("tensor '" + name + "' has the wrong shape");
    auto data = jt.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != t.size()) throw Error("tensor '" + name + "' has the wrong size");
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<T>(data[static_cast<std::size_t>(i)]);
  });
  return m;
}

template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << to_json(m).dump() << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

template <typename T>
Model<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  try {
    return model_from_json<T>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed checkpoint '" + path + "': " + e.what());
  }
}

// Raw bytes of all base tensors, in visiting order.
template <typename T>
std::string base_bytes(const Model<T>& m) {
  std::string out;
  for_each_base_tensor(m.w.base, [&](const std::string&, const Mat<T>& t) {
    out.append(reinterpret_cast<const char*>(t.data()), static_cast<std::size_t>(t.size()) * sizeof(T));
  });
  return out;
}

}  // namespace legalie::genix
