#include "polya/stemmer.hpp"

#include <array>
#include <cstddef>

namespace polya {
namespace {

// Working buffer for one word. Follows the structure of the 1980 paper:
// a word is [C](VC)^m[V], conditions are evaluated on the stem left after
// removing a candidate suffix.
class Stem {
 public:
  explicit Stem(std::string_view word) : w_(word) {}

  std::string take() && { return std::move(w_); }

  void step1a() {
    if (ends("sses")) {
      chop(2);
    } else if (ends("ies")) {
      chop(2);
    } else if (ends("ss")) {
      // keep
    } else if (ends("s")) {
      chop(1);
    }
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(w_.size() - 3) > 0) chop(1);
    } else if (ends("ed") && has_vowel(w_.size() - 2)) {
      chop(2);
      post_strip();
    } else if (ends("ing") && has_vowel(w_.size() - 3)) {
      chop(3);
      post_strip();
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(w_.size() - 1)) w_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<Rule, 20> rules{{
        {"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"tional", "tion"},
        {"biliti", "ble"},  {"ation", "ate"},   {"alism", "al"},
        {"aliti", "al"},    {"iviti", "ive"},   {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"ousli", "ous"},
        {"ator", "ate"},    {"eli", "e"},
    }};
    apply_table(rules, 0);
  }

  void step3() {
    static constexpr std::array<Rule, 7> rules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    apply_table(rules, 0);
  }

  void step4() {
    static constexpr std::array<Rule, 19> rules{{
        {"ement", ""}, {"ance", ""}, {"ence", ""}, {"able", ""},
        {"ible", ""},  {"ment", ""}, {"ant", ""},  {"ent", ""},
        {"ion", ""},   {"ism", ""},  {"ate", ""},  {"iti", ""},
        {"ous", ""},   {"ive", ""},  {"ize", ""},  {"ou", ""},
        {"al", ""},    {"er", ""},   {"ic", ""},
    }};
    for (const auto& r : rules) {
      std::string_view suffix{r.suffix};
      if (!ends(suffix)) continue;
      const std::size_t stem = w_.size() - suffix.size();
      if (measure(stem) > 1) {
        if (suffix == "ion" && stem > 0 && w_[stem - 1] != 's' &&
            w_[stem - 1] != 't') {
          return;
        }
        w_.resize(stem);
      }
      return;  // longest match decides the rule even when its condition fails
    }
  }

  void step5a() {
    if (!ends("e")) return;
    const int m = measure(w_.size() - 1);
    if (m > 1 || (m == 1 && !cvc(w_.size() - 2))) chop(1);
  }

  void step5b() {
    if (measure(w_.size()) > 1 && w_.back() == 'l' &&
        double_consonant(w_.size() - 1)) {
      chop(1);
    }
  }

 private:
  struct Rule {
    const char* suffix;
    const char* replacement;
  };

  std::string w_;

  bool is_consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in w[0..n).
  int measure(std::size_t n) const {
    int m = 0;
    std::size_t i = 0;
    while (i < n && is_consonant(i)) ++i;
    while (i < n) {
      while (i < n && !is_consonant(i)) ++i;
      if (i >= n) break;
      ++m;
      while (i < n && is_consonant(i)) ++i;
    }
    return m;
  }

  bool has_vowel(std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t i) const {
    return i >= 1 && w_[i] == w_[i - 1] && is_consonant(i);
  }

  // consonant-vowel-consonant ending at i, final consonant not w, x or y
  bool cvc(std::size_t i) const {
    if (i < 2 || !is_consonant(i) || is_consonant(i - 1) ||
        !is_consonant(i - 2)) {
      return false;
    }
    const char c = w_[i];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           w_.compare(w_.size() - suffix.size(), suffix.size(), suffix) == 0;
  }

  void chop(std::size_t n) { w_.resize(w_.size() - n); }

  // After removing "ed"/"ing": restore an e, undouble, or mark a short stem.
  void post_strip() {
    if (ends("at") || ends("bl") || ends("iz")) {
      w_.push_back('e');
    } else if (double_consonant(w_.size() - 1)) {
      const char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') chop(1);
    } else if (measure(w_.size()) == 1 && cvc(w_.size() - 1)) {
      w_.push_back('e');
    }
  }

  template <std::size_t N>
  void apply_table(const std::array<Rule, N>& rules, int min_measure) {
    for (const auto& r : rules) {
      std::string_view suffix{r.suffix};
      if (!ends(suffix)) continue;
      const std::size_t stem = w_.size() - suffix.size();
      if (measure(stem) > min_measure) {
        w_.resize(stem);
        w_.append(r.replacement);
      }
      return;
    }
  }
};

}  // namespace

std::string porter_stem(std::string_view word) {
  if (word.size() <= 2) return std::string(word);
  Stem s(word);
  s.step1a();
  s.step1b();
  s.step1c();
  s.step2();
  s.step3();
  s.step4();
  s.step5a();
  s.step5b();
  return std::move(s).take();
}

}  // namespace polya
