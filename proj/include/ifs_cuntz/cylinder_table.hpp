#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifs_cuntz/errors.hpp"
#include "ifs_cuntz/word.hpp"

namespace ifs_cuntz {

inline constexpr std::size_t kMaxTableCells = std::size_t{1} << 24;

/// N^k, throwing ResolutionError past kMaxTableCells.
inline std::size_t cylinder_count(int n_branches, int depth) {
  if (depth < 0) throw DomainError("negative cylinder depth");
  std::size_t count = 1;
  for (int d = 0; d < depth; ++d) {
    count *= static_cast<std::size_t>(n_branches);
    if (count > kMaxTableCells) {
      throw ResolutionError("depth " + std::to_string(depth) + " exceeds the cylinder table size limit");
    }
  }
  return count;
}

/// Dense table over the N^k words of length k, in lexicographic order: the
/// index of (w_1..w_k) is sum (w_j - 1) N^(k-j).
template <class T>
class CylinderTable {
 public:
  CylinderTable() : CylinderTable(2, 0) {}

  CylinderTable(int n_branches, int depth, T fill = T(0))
      : n_(n_branches), depth_(depth), values_(cylinder_count(n_branches, depth), fill) {}

  CylinderTable(int n_branches, int depth, std::vector<T> values)
      : n_(n_branches), depth_(depth), values_(std::move(values)) {
    if (values_.size() != cylinder_count(n_, depth_)) throw DomainError("cylinder table has the wrong size");
  }

  int n_branches() const noexcept { return n_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator[](std::size_t idx) { return values_[idx]; }
  const T& operator[](std::size_t idx) const { return values_[idx]; }

  T& at(std::span<const Symbol> w) { return values_[index_of(w)]; }
  const T& at(std::span<const Symbol> w) const { return values_[index_of(w)]; }

  const std::vector<T>& values() const noexcept { return values_; }
  std::vector<T>& values() noexcept { return values_; }

  std::size_t index_of(std::span<const Symbol> w) const {
    if (static_cast<int>(w.size()) != depth_) throw DomainError("word length does not match table depth");
    return prefix_range(w).first;
  }

  /// Cells [first, second) whose words start with `w` (|w| <= depth).
  std::pair<std::size_t, std::size_t> prefix_range(std::span<const Symbol> w) const {
    if (static_cast<int>(w.size()) > depth_) throw DomainError("prefix longer than table depth");
    std::size_t idx = 0;
    for (Symbol s : w) {
      if (s < 1 || s > n_) throw DomainError("symbol outside alphabet");
      idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(s - 1);
    }
    std::size_t block = 1;
    for (int d = static_cast<int>(w.size()); d < depth_; ++d) block *= static_cast<std::size_t>(n_);
    return {idx * block, (idx + 1) * block};
  }

  std::vector<Symbol> symbols_at(std::size_t idx) const {
    std::vector<Symbol> w(static_cast<std::size_t>(depth_));
    for (int d = depth_ - 1; d >= 0; --d) {
      w[static_cast<std::size_t>(d)] = static_cast<Symbol>(idx % static_cast<std::size_t>(n_)) + 1;
      idx /= static_cast<std::size_t>(n_);
    }
    return w;
  }

  Word word_at(std::size_t idx) const { return Word(symbols_at(idx)); }

  /// Block of cells sitting under first symbol `s`, as a table one level shallower.
  CylinderTable branch_block(Symbol s) const {
    if (depth_ == 0) throw DomainError("depth-0 table has no branch blocks");
    const std::size_t block = values_.size() / static_cast<std::size_t>(n_);
    const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(block * static_cast<std::size_t>(s - 1));
    return CylinderTable(n_, depth_ - 1, std::vector<T>(begin, begin + static_cast<std::ptrdiff_t>(block)));
  }

  /// Table one level deeper with `this` placed in the block of symbol `s`
  /// and `fill` elsewhere.
  CylinderTable embedded_in_branch(Symbol s, T fill = T(0)) const {
    CylinderTable out(n_, depth_ + 1, fill);
    const std::size_t offset = values_.size() * static_cast<std::size_t>(s - 1);
    for (std::size_t idx = 0; idx < values_.size(); ++idx) out.values_[offset + idx] = values_[idx];
    return out;
  }

  friend bool operator==(const CylinderTable&, const CylinderTable&) = default;

 private:
  int n_;
  int depth_;
  std::vector<T> values_;
};

/// Value of a depth-k piecewise-constant function at a depth-d cell (d >= k).
inline std::size_t ancestor_index(std::size_t idx, int n_branches, int from_depth, int to_depth) {
  for (int d = from_depth; d > to_depth; --d) idx /= static_cast<std::size_t>(n_branches);
  return idx;
}

}  // namespace ifs_cuntz
