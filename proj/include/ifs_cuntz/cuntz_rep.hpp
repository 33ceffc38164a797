#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ifs_cuntz/coding_space.hpp"
#include "ifs_cuntz/hilbert.hpp"
#include "ifs_cuntz/measures.hpp"

namespace ifs_cuntz {

/// Basis relabelling n -> scale * n + shift on the integers.
struct IndexMap {
  std::int64_t scale;
  std::int64_t shift;

  std::int64_t operator()(std::int64_t n) const { return scale * n + shift; }

  bool in_image(std::int64_t m) const { return (m - shift) % scale == 0; }

  std::int64_t preimage(std::int64_t m) const { return (m - shift) / scale; }

  friend bool operator==(const IndexMap&, const IndexMap&) = default;
};

/// Finitely supported vector in l^2(Z).
class RepVector {
 public:
  RepVector() = default;
  explicit RepVector(std::map<std::int64_t, Complex> coefficients) : coefficients_(std::move(coefficients)) { prune(); }

  static RepVector basis(std::int64_t n, Complex c = 1.0) { return RepVector({{n, c}}); }

  const std::map<std::int64_t, Complex>& coefficients() const noexcept { return coefficients_; }
  bool is_zero() const noexcept { return coefficients_.empty(); }

  Complex operator[](std::int64_t n) const {
    auto it = coefficients_.find(n);
    return it == coefficients_.end() ? Complex(0.0) : it->second;
  }

  friend RepVector operator+(const RepVector& a, const RepVector& b) {
    std::map<std::int64_t, Complex> out = a.coefficients_;
    for (const auto& [n, c] : b.coefficients_) out[n] += c;
    return RepVector(std::move(out));
  }

  friend RepVector operator*(Complex s, const RepVector& a) {
    std::map<std::int64_t, Complex> out;
    for (const auto& [n, c] : a.coefficients_) out[n] = s * c;
    return RepVector(std::move(out));
  }

  friend RepVector operator-(const RepVector& a, const RepVector& b) { return a + Complex(-1.0) * b; }

  friend bool operator==(const RepVector&, const RepVector&) = default;

 private:
  void prune() {
    std::erase_if(coefficients_, [](const auto& kv) { return kv.second == Complex(0.0); });
  }

  std::map<std::int64_t, Complex> coefficients_;
};

inline Complex rep_inner(const RepVector& f, const RepVector& g) {
  Complex sum = 0.0;
  for (const auto& [n, c] : f.coefficients()) sum += std::conj(c) * g[n];
  return sum;
}

inline double rep_norm_squared(const RepVector& f) {
  double sum = 0.0;
  for (const auto& [n, c] : f.coefficients()) sum += std::norm(c);
  return sum;
}

inline double rep_norm(const RepVector& f) { return std::sqrt(rep_norm_squared(f)); }

/// Representation of O_N on l^2(Z) in which each generator sends basis
/// vectors to basis vectors. The images of the index maps partition Z,
/// which is exactly S_i^* S_j = delta_ij I and sum S_i S_i^* = I.
class PermutativeRep {
 public:
  explicit PermutativeRep(std::vector<IndexMap> maps) : alphabet_(static_cast<int>(maps.size())), maps_(std::move(maps)) {
    std::int64_t period = 1;
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (maps_[i].scale == 0) throw DomainError("index map " + std::to_string(i + 1) + " is not injective");
      period = std::lcm(period, std::abs(maps_[i].scale));
      if (period > 1'000'000) throw DomainError("index map scales are too large to validate");
    }
    for (std::int64_t r = 0; r < period; ++r) {
      int hits = 0;
      for (const auto& m : maps_) hits += m.in_image(r) ? 1 : 0;
      if (hits == 0) throw DomainError("index maps do not cover index " + std::to_string(r));
      if (hits > 1) throw DomainError("index map images overlap at index " + std::to_string(r));
    }
  }

  /// S_0 e_n = e_{2n}, S_1 e_n = e_{2n+1} (our branches 1 and 2): the
  /// representation f(z) -> f(z^2), z f(z^2) on L^2 of the circle.
  static PermutativeRep torus() { return PermutativeRep({{2, 0}, {2, 1}}); }

  int n_branches() const noexcept { return alphabet_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<IndexMap>& maps() const noexcept { return maps_; }

  const IndexMap& map(Symbol i) const {
    if (!alphabet_.contains(i)) throw DomainError("generator " + std::to_string(i) + " out of range");
    return maps_[static_cast<std::size_t>(i - 1)];
  }

  /// The generator whose range contains e_n.
  Symbol branch_of(std::int64_t n) const {
    for (Symbol i = 1; i <= n_branches(); ++i) {
      if (map(i).in_image(n)) return i;
    }
    throw DomainError("index not covered");  // excluded by the constructor
  }

  /// Address of the point carrying the spectral measure of e_n: the
  /// sequence of ranges visited by n -> S^* preimages. Always eventually
  /// periodic since every |scale| >= 2 shrinks |n|.
  Word itinerary(std::int64_t n) const {
    std::map<std::int64_t, std::size_t> seen;
    std::vector<Symbol> symbols;
    while (true) {
      auto [it, inserted] = seen.emplace(n, symbols.size());
      if (!inserted) {
        const auto start = static_cast<std::ptrdiff_t>(it->second);
        return Word(std::vector<Symbol>(symbols.begin(), symbols.begin() + start),
                    std::vector<Symbol>(symbols.begin() + start, symbols.end()));
      }
      const Symbol s = branch_of(n);
      symbols.push_back(s);
      n = map(s).preimage(n);
    }
  }

 private:
  Alphabet alphabet_;
  std::vector<IndexMap> maps_;
};

inline RepVector apply_gen(const PermutativeRep& rep, Symbol i, const RepVector& f) {
  const IndexMap& m = rep.map(i);
  std::map<std::int64_t, Complex> out;
  for (const auto& [n, c] : f.coefficients()) out[m(n)] = c;
  return RepVector(std::move(out));
}

inline RepVector apply_gen_star(const PermutativeRep& rep, Symbol i, const RepVector& f) {
  const IndexMap& m = rep.map(i);
  std::map<std::int64_t, Complex> out;
  for (const auto& [n, c] : f.coefficients()) {
    if (m.in_image(n)) out[m.preimage(n)] = c;
  }
  return RepVector(std::move(out));
}

struct RelationReport {
  std::vector<RelationResidual> rows;
  double tolerance = 0.0;

  double max_residual() const {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.residual);
    return worst;
  }
  bool ok() const { return max_residual() <= tolerance; }
};

/// S_i^* S_j f = delta_ij f and sum_i S_i S_i^* f = f on each test vector.
inline RelationReport verify_relations(const PermutativeRep& rep, const std::vector<RepVector>& vectors, double tol) {
  RelationReport report;
  report.tolerance = tol;
  for (std::size_t id = 0; id < vectors.size(); ++id) {
    const RepVector& f = vectors[id];
    RepVector sum;
    for (Symbol i = 1; i <= rep.n_branches(); ++i) {
      for (Symbol j = 1; j <= rep.n_branches(); ++j) {
        const RepVector v = apply_gen_star(rep, i, apply_gen(rep, j, f));
        const double r = rep_norm(i == j ? v - f : v);
        report.rows.push_back({id, "S" + std::to_string(i) + "*S" + std::to_string(j), r});
      }
      sum = sum + apply_gen(rep, i, apply_gen_star(rep, i, f));
    }
    report.rows.push_back({id, "sum SiSi*", rep_norm(sum - f)});
  }
  return report;
}

/// P(w) f = S_{w_1}...S_{w_k} S_{w_k}^*...S_{w_1}^* f.
inline RepVector cylinder_projection(const PermutativeRep& rep, std::span<const Symbol> w, const RepVector& f) {
  RepVector v = f;
  for (Symbol s : w) v = apply_gen_star(rep, s, v);
  for (auto it = w.rbegin(); it != w.rend(); ++it) v = apply_gen(rep, *it, v);
  return v;
}

inline RepVector cylinder_projection(const PermutativeRep& rep, const Word& w, const RepVector& f) {
  if (!w.is_finite()) throw DomainError("projection words are finite");
  rep.alphabet().validate(w);
  return cylinder_projection(rep, std::span<const Symbol>(w.prefix()), f);
}

/// P(E) f for E a union of pairwise disjoint cylinders.
inline RepVector union_projection(const PermutativeRep& rep, const std::vector<Word>& cylinders, const RepVector& f) {
  for (std::size_t a = 0; a < cylinders.size(); ++a) {
    for (std::size_t b = a + 1; b < cylinders.size(); ++b) {
      const auto& u = cylinders[a].prefix();
      const auto& v = cylinders[b].prefix();
      const std::size_t common = std::min(u.size(), v.size());
      if (std::equal(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(common), v.begin())) {
        throw DomainError("cylinders in a union projection must be disjoint");
      }
    }
  }
  RepVector out;
  for (const auto& w : cylinders) out = out + cylinder_projection(rep, w, f);
  return out;
}

/// mu_f(w) = ||P(w) f||^2 on every depth-k cylinder.
inline Measure<double> vector_measure(const PermutativeRep& rep, const RepVector& f, int depth) {
  CylinderTable<double> table(rep.n_branches(), depth);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    table[idx] = rep_norm_squared(cylinder_projection(rep, table.symbols_at(idx), f));
  }
  return Measure<double>(rep.n_branches(), std::move(table), RefinementModel<double>::frozen());
}

/// mu_{f,g}(w) = <f | P(w) g>.
inline CylinderTable<Complex> sesquilinear_measure(const PermutativeRep& rep, const RepVector& f, const RepVector& g,
                                                   int depth) {
  CylinderTable<Complex> table(rep.n_branches(), depth);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    table[idx] = rep_inner(f, cylinder_projection(rep, table.symbols_at(idx), g));
  }
  return table;
}

/// Exact spectral measure of a permutative representation:
/// mu_f = sum_n |f_n|^2 delta_{itinerary(n)}.
inline Measure<double> spectral_atoms(const PermutativeRep& rep, const RepVector& f) {
  std::vector<Atom<double>> atoms;
  for (const auto& [n, c] : f.coefficients()) atoms.push_back({rep.itinerary(n), std::norm(c)});
  return Measure<double>::atomic(rep.n_branches(), std::move(atoms));
}

struct CovarianceResidual {
  /// max |sum_i mu_{S_i^* f}∘tau_i^{-1}(w) - mu_f(w)|
  double recursive = 0.0;
  /// max over i, w of |mu_f∘tau_i^{-1}(w) - mu_{S_i f}(w)|
  double substituted = 0.0;

  double max() const { return std::max(recursive, substituted); }
};

inline double max_cell_difference(const Measure<double>& a, const Measure<double>& b, int depth) {
  const CylinderTable<double> ta = mass_table(a, depth);
  const CylinderTable<double> tb = mass_table(b, depth);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < ta.size(); ++idx) worst = std::max(worst, std::abs(ta[idx] - tb[idx]));
  return worst;
}

/// Both covariance identities of the vector measures, at cylinder depth max(depth, 1).
inline CovarianceResidual check_covariance(const PermutativeRep& rep, const IfsSystem& ifs, const RepVector& f, int depth) {
  if (ifs.alphabet() != rep.alphabet()) throw DomainError("system and representation alphabets differ");
  const int d = std::max(depth, 1);
  CovarianceResidual out;
  const Measure<double> mu_f = vector_measure(rep, f, d);
  std::vector<Measure<double>> parts;
  for (Symbol i = 1; i <= rep.n_branches(); ++i) {
    parts.push_back(pushforward_branch(vector_measure(rep, apply_gen_star(rep, i, f), d - 1), i));
  }
  const Measure<double> lhs = convex_combine(std::vector<double>(parts.size(), 1.0), parts);
  out.recursive = max_cell_difference(lhs, mu_f, d);
  const Measure<double> coarse = vector_measure(rep, f, d - 1);
  for (Symbol i = 1; i <= rep.n_branches(); ++i) {
    const Measure<double> pushed = pushforward_branch(coarse, i);
    out.substituted = std::max(out.substituted, max_cell_difference(pushed, vector_measure(rep, apply_gen(rep, i, f), d), d));
  }
  return out;
}

/// Cylinders of the system shrink to points, the hypothesis under which
/// W lands in H(X). Holds for every system this library can build.
inline bool cylinders_shrink(const IfsSystem& ifs) { return !ifs.is_metric() || ifs.contraction_ratio() < 1; }

/// W f = (1, mu_f) with the exact (atomic) spectral measure.
inline SquareDensity intertwiner_W(const PermutativeRep& rep, const RepVector& f) {
  return SquareDensity::constant(spectral_atoms(rep, f));
}

/// W f = (1, mu_f) with mu_f resolved on depth-k cylinders.
inline SquareDensity intertwiner_W(const PermutativeRep& rep, const RepVector& f, int depth) {
  return SquareDensity::constant(vector_measure(rep, f, depth));
}

inline SquareDensity intertwiner_W(const PermutativeRep& rep, const IfsSystem& ifs, const RepVector& f) {
  if (ifs.alphabet() != rep.alphabet()) throw DomainError("system and representation alphabets differ");
  if (!cylinders_shrink(ifs)) throw DomainError("composed branch images do not shrink to points");
  return intertwiner_W(rep, f);
}

/// <f|g> = (1/4) sum_k i^k ||i^k f + g||^2, norms read off mu_{i^k f + g}(X).
inline Complex polarized_inner(const PermutativeRep& rep, const RepVector& f, const RepVector& g, int depth) {
  Complex sum = 0.0;
  Complex power = 1.0;
  for (int k = 0; k < 4; ++k) {
    sum += power * total_mass(vector_measure(rep, power * f + g, depth));
    power *= Complex(0.0, 1.0);
  }
  return sum / 4.0;
}

}  // namespace ifs_cuntz
