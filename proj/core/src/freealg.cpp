#include "weak/freealg.hpp"

#include <algorithm>

namespace weak {

Word Word::of(std::initializer_list<int> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (int l : letters) {
    if (l < 0 || l > 255) throw ConfigurationError("letter index out of range");
    out.push_back(static_cast<Letter>(l));
  }
  return Word(std::move(out));
}

int Word::scaled_degree() const noexcept {
  return static_cast<int>(letters_.size()) + count(0);
}

int Word::count(Letter letter) const noexcept {
  return static_cast<int>(std::count(letters_.begin(), letters_.end(), letter));
}

Word Word::concat(const Word& tail) const {
  std::vector<Letter> out;
  out.reserve(letters_.size() + tail.letters_.size());
  out.insert(out.end(), letters_.begin(), letters_.end());
  out.insert(out.end(), tail.letters_.begin(), tail.letters_.end());
  return Word(std::move(out));
}

Word Word::slice(std::size_t first, std::size_t count) const {
  return Word(std::vector<Letter>(letters_.begin() + static_cast<std::ptrdiff_t>(first),
                                  letters_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) out += '.';
    out += 'v';
    out += std::to_string(letters_[i]);
  }
  return out;
}

Word parse_word(const std::string& text) {
  if (text == "1") return Word{};
  std::vector<Letter> letters;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != 'v') throw ConfigurationError("malformed word '" + text + "'");
    std::size_t end = text.find('.', pos);
    if (end == std::string::npos) end = text.size();
    const std::string digits = text.substr(pos + 1, end - pos - 1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      throw ConfigurationError("malformed word '" + text + "'");
    }
    const int index = std::stoi(digits);
    if (index > 255) throw ConfigurationError("letter index out of range in '" + text + "'");
    letters.push_back(static_cast<Letter>(index));
    pos = end + 1;
  }
  return Word(std::move(letters));
}

bool CanonicalWordOrder::operator()(const Word& a, const Word& b) const noexcept {
  const int da = a.scaled_degree();
  const int db = b.scaled_degree();
  if (da != db) return da < db;
  if (a.size() != b.size()) return a.size() < b.size();
  return a.letters() < b.letters();
}

std::vector<Word> enumerate_words(int d, int max_scaled_degree) {
  std::vector<Word> out{Word{}};
  std::vector<Word> frontier{Word{}};
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int letter = 0; letter <= d; ++letter) {
        Word extended = w.concat(Word::letter(letter));
        if (extended.scaled_degree() <= max_scaled_degree) next.push_back(std::move(extended));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), CanonicalWordOrder{});
  return out;
}

}  // namespace weak
