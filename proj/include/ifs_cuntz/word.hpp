#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifs_cuntz/errors.hpp"

namespace ifs_cuntz {

/// Branch symbol, 1-based: the alphabet is {1, ..., N}.
using Symbol = int;

/// A finite cylinder address (empty period) or an eventually periodic point
/// of the coding space, stored in normal form: the period is primitive and
/// the prefix is as short as possible, so equal points compare equal.
class Word {
 public:
  Word() = default;

  explicit Word(std::vector<Symbol> prefix, std::vector<Symbol> period = {})
      : prefix_(std::move(prefix)), period_(std::move(period)) {
    for (Symbol s : prefix_) check_symbol(s);
    for (Symbol s : period_) check_symbol(s);
    canonicalize();
  }

  static Word periodic(std::vector<Symbol> period) { return Word({}, std::move(period)); }

  const std::vector<Symbol>& prefix() const noexcept { return prefix_; }
  const std::vector<Symbol>& period() const noexcept { return period_; }

  bool is_finite() const noexcept { return period_.empty(); }
  bool is_point() const noexcept { return !period_.empty(); }

  /// Length of a finite word.
  std::size_t size() const noexcept { return prefix_.size(); }
  bool empty() const noexcept { return prefix_.empty() && period_.empty(); }

  /// Symbol at position `pos` of the (possibly infinite) expansion.
  Symbol at(std::size_t pos) const {
    if (pos < prefix_.size()) return prefix_[pos];
    if (period_.empty()) throw DomainError("symbol position past the end of a finite word");
    return period_[(pos - prefix_.size()) % period_.size()];
  }

  /// First `k` symbols of the expansion.
  std::vector<Symbol> head(std::size_t k) const {
    if (is_finite() && k > prefix_.size()) throw DomainError("head longer than finite word");
    std::vector<Symbol> out;
    out.reserve(k);
    for (std::size_t pos = 0; pos < k; ++pos) out.push_back(at(pos));
    return out;
  }

  bool starts_with(std::span<const Symbol> w) const {
    if (is_finite() && w.size() > prefix_.size()) return false;
    for (std::size_t pos = 0; pos < w.size(); ++pos) {
      if (at(pos) != w[pos]) return false;
    }
    return true;
  }

  Word prepend(Symbol s) const {
    std::vector<Symbol> p;
    p.reserve(prefix_.size() + 1);
    p.push_back(s);
    p.insert(p.end(), prefix_.begin(), prefix_.end());
    return Word(std::move(p), period_);
  }

  /// The left shift: removes the first symbol.
  Word drop_first() const {
    if (!prefix_.empty()) {
      return Word(std::vector<Symbol>(prefix_.begin() + 1, prefix_.end()), period_);
    }
    if (period_.empty()) throw DomainError("cannot shift the empty word");
    std::vector<Symbol> rotated(period_.begin() + 1, period_.end());
    rotated.push_back(period_.front());
    return Word({}, std::move(rotated));
  }

  Word concat(std::span<const Symbol> suffix) const {
    if (!is_finite()) throw DomainError("cannot append to an infinite word");
    std::vector<Symbol> p = prefix_;
    p.insert(p.end(), suffix.begin(), suffix.end());
    return Word(std::move(p));
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  static void check_symbol(Symbol s) {
    if (s < 1) throw DomainError("word symbols are 1-based and must be >= 1");
  }

  void canonicalize() {
    if (period_.empty()) return;
    const std::size_t len = period_.size();
    for (std::size_t d = 1; d < len; ++d) {
      if (len % d != 0) continue;
      bool repeats = true;
      for (std::size_t j = d; j < len && repeats; ++j) repeats = period_[j] == period_[j - d];
      if (repeats) {
        period_.resize(d);
        break;
      }
    }
    while (!prefix_.empty() && prefix_.back() == period_.back()) {
      prefix_.pop_back();
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    }
  }

  std::vector<Symbol> prefix_;
  std::vector<Symbol> period_;
};

namespace detail {

inline char digit_char(Symbol s) {
  const int d = s - 1;
  if (d < 10) return static_cast<char>('0' + d);
  if (d < 36) return static_cast<char>('a' + d - 10);
  throw DomainError("symbol too large for the text form (max 36 branches)");
}

inline Symbol digit_symbol(char c) {
  if (c >= '0' && c <= '9') return c - '0' + 1;
  if (c >= 'a' && c <= 'z') return c - 'a' + 11;
  throw ParseError(std::string("invalid word digit '") + c + "'");
}

}  // namespace detail

/// 0-based digit string of a symbol sequence, e.g. {1,2,1} -> "010".
inline std::string digits(std::span<const Symbol> symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(detail::digit_char(s));
  return out;
}

inline std::vector<Symbol> parse_digits(std::string_view text) {
  std::vector<Symbol> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(detail::digit_symbol(c));
  return out;
}

/// Text form: 0-based digits, period in parentheses. {2} then 1^inf -> "1(0)".
inline std::string to_string(const Word& w) {
  std::string out = digits(w.prefix());
  if (w.is_point()) out += "(" + digits(w.period()) + ")";
  return out;
}

inline Word parse_word(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) return Word(parse_digits(text));
  if (text.back() != ')' || open + 2 > text.size() - 1) {
    throw ParseError("malformed periodic word '" + std::string(text) + "'");
  }
  return Word(parse_digits(text.substr(0, open)), parse_digits(text.substr(open + 1, text.size() - open - 2)));
}

}  // namespace ifs_cuntz
