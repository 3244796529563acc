#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "legalie/error.hpp"

namespace legalie::genix {

// Byte-level character vocabulary. Ids 0..13 are specials; characters
// follow densely.
class Vocab {
 public:
  static constexpr int pad = 0;
  static constexpr int bos = 1;
  static constexpr int eos = 2;
  static constexpr int unk = 3;
  static constexpr int sentinel0 = 4;
  static constexpr int num_sentinels = 10;
  static constexpr int num_specials = sentinel0 + num_sentinels;

  Vocab() { id_of_.fill(unk); }

  // Printable ASCII plus every byte occurring in `texts`.
  static Vocab build(const std::vector<std::string>& texts = {}) {
    Vocab v;
    for (int c = 32; c < 127; ++c) v.add(static_cast<unsigned char>(c));
    for (const auto& t : texts)
      for (char c : t) v.add(static_cast<unsigned char>(c));
    return v;
  }

  static Vocab from_chars(const std::string& chars) {
    Vocab v;
    for (char c : chars) v.add(static_cast<unsigned char>(c));
    return v;
  }

  int size() const { return num_specials + static_cast<int>(chars_.size()); }
  const std::string& chars() const { return chars_; }

  static int sentinel(int i) {
    if (i < 0 || i >= num_sentinels) throw Error("sentinel index out of range");
    return sentinel0 + i;
  }
  static bool is_special(int id) { return id < num_specials; }

  int id(unsigned char c) const { return id_of_[c]; }

  std::vector<int> encode(std::string_view s) const {
    std::vector<int> out;
    out.reserve(s.size());
    for (char c : s) out.push_back(id(static_cast<unsigned char>(c)));
    return out;
  }

  // Specials other than sentinels are dropped; sentinels render as <S0>..<S9>.
  std::string decode(const std::vector<int>& ids) const {
    std::string out;
    for (int t : ids) {
      if (t >= sentinel0 && t < num_specials)
        out += "<S" + std::to_string(t - sentinel0) + ">";
      else if (t >= num_specials && t < size())
        out += chars_[static_cast<std::size_t>(t - num_specials)];
    }
    return out;
  }

  bool operator==(const Vocab& o) const { return chars_ == o.chars_; }

 private:
  void add(unsigned char c) {
    if (id_of_[c] != unk) return;
    id_of_[c] = num_specials + static_cast<int>(chars_.size());
    chars_ += static_cast<char>(c);
  }

  std::array<int, 256> id_of_{};
  std::string chars_;
};

}  // namespace legalie::genix
