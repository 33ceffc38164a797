#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifs_cuntz/coding_space.hpp"
#include "ifs_cuntz/cylinder_table.hpp"
#include "ifs_cuntz/errors.hpp"
#include "ifs_cuntz/rational.hpp"
#include "ifs_cuntz/word.hpp"

namespace ifs_cuntz {

namespace detail {

template <class T>
bool sums_to_one(const std::vector<T>& w) {
  T sum(0);
  for (const auto& x : w) sum += x;
  if constexpr (std::is_same_v<T, Rational>) {
    return sum == 1;
  } else {
    return std::abs(sum - 1.0) <= 1e-12;
  }
}

template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

}  // namespace detail

/// How a depth-k cylinder mass splits among its N children.
template <class T>
class RefinementModel {
 public:
  enum class Kind { Uniform, Bernoulli, Frozen };

  static RefinementModel uniform() { return RefinementModel(Kind::Uniform, {}); }

  /// Child `j` receives weights[j-1] of its parent. Weights must be >= 0 and sum to 1.
  static RefinementModel bernoulli(std::vector<T> weights) {
    for (const auto& w : weights) {
      if (w < T(0)) throw DomainError("Bernoulli refinement weights must be nonnegative");
    }
    if (weights.empty() || !detail::sums_to_one(weights)) {
      throw DomainError("Bernoulli refinement weights must sum to 1");
    }
    return RefinementModel(Kind::Bernoulli, std::move(weights));
  }

  /// No information below the stored depth.
  static RefinementModel frozen() { return RefinementModel(Kind::Frozen, {}); }

  Kind kind() const noexcept { return kind_; }
  bool refinable() const noexcept { return kind_ != Kind::Frozen; }
  const std::vector<T>& weights() const noexcept { return weights_; }

  T factor(Symbol s, int n_branches) const {
    switch (kind_) {
      case Kind::Uniform:
        return T(1) / T(n_branches);
      case Kind::Bernoulli:
        return weights_.at(static_cast<std::size_t>(s - 1));
      case Kind::Frozen:
        break;
    }
    throw ResolutionError("frozen measure cannot be refined");
  }

  /// Two models split every cell identically (uniform == bernoulli(1/N,...)).
  bool same_refinement(const RefinementModel& other, int n_branches) const {
    if (!refinable() || !other.refinable()) return !refinable() && !other.refinable();
    for (Symbol s = 1; s <= n_branches; ++s) {
      if (factor(s, n_branches) != other.factor(s, n_branches)) return false;
    }
    return true;
  }

  template <class U>
  RefinementModel<U> cast() const {
    switch (kind_) {
      case Kind::Uniform:
        return RefinementModel<U>::uniform();
      case Kind::Frozen:
        return RefinementModel<U>::frozen();
      case Kind::Bernoulli:
        break;
    }
    std::vector<U> w;
    for (const auto& x : weights_) w.push_back(static_cast<U>(to_double(x)));
    if constexpr (std::is_same_v<U, double>) {
      return RefinementModel<U>::bernoulli(std::move(w));
    } else {
      static_assert(std::is_same_v<T, U>, "only Rational->double or identity casts are supported");
      return *this;
    }
  }

  friend bool operator==(const RefinementModel&, const RefinementModel&) = default;

 private:
  RefinementModel(Kind kind, std::vector<T> weights) : kind_(kind), weights_(std::move(weights)) {}

  Kind kind_;
  std::vector<T> weights_;
};

template <class T>
struct Atom {
  Word point;
  T mass;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Positive finite measure on the coding space at finite resolution: a
/// diffuse part given by depth-k cylinder masses plus a refinement model,
/// and an atomic part on eventually periodic points.
template <class T>
class Measure {
 public:
  using Scalar = T;

  Measure(int n_branches, CylinderTable<T> diffuse, RefinementModel<T> model, std::vector<Atom<T>> atoms = {})
      : n_(Alphabet(n_branches).size()), diffuse_(std::move(diffuse)), model_(std::move(model)) {
    if (diffuse_.n_branches() != n_) throw DomainError("cylinder table alphabet does not match measure");
    for (const auto& m : diffuse_.values()) {
      if (m < T(0)) throw DomainError("cylinder masses must be nonnegative");
    }
    if (model_.kind() == RefinementModel<T>::Kind::Bernoulli && static_cast<int>(model_.weights().size()) != n_) {
      throw DomainError("Bernoulli refinement needs one weight per branch");
    }
    const Alphabet alphabet(n_);
    for (auto& a : atoms) {
      if (!a.point.is_point()) throw DomainError("atoms must sit at eventually periodic words");
      alphabet.validate(a.point);
      if (a.mass < T(0)) throw DomainError("atom masses must be positive");
    }
    atoms_ = merge_atoms(std::move(atoms));
  }

  static Measure zero(int n_branches) {
    return Measure(n_branches, CylinderTable<T>(n_branches, 0), RefinementModel<T>::uniform());
  }

  /// Uniform splitting of `total` (Lebesgue measure on the dyadic coding).
  static Measure uniform(int n_branches, T total = T(1)) {
    return Measure(n_branches, CylinderTable<T>(n_branches, 0, total), RefinementModel<T>::uniform());
  }

  /// Product measure with the given weights, tabulated at `depth`.
  static Measure bernoulli(std::vector<T> weights, int depth = 0);

  static Measure dirac(int n_branches, Word point, T mass = T(1)) {
    return atomic(n_branches, {{std::move(point), mass}});
  }

  static Measure atomic(int n_branches, std::vector<Atom<T>> atoms) {
    return Measure(n_branches, CylinderTable<T>(n_branches, 0), RefinementModel<T>::uniform(), std::move(atoms));
  }

  int n_branches() const noexcept { return n_; }
  int depth() const noexcept { return diffuse_.depth(); }
  const CylinderTable<T>& diffuse() const noexcept { return diffuse_; }
  const RefinementModel<T>& model() const noexcept { return model_; }
  const std::vector<Atom<T>>& atoms() const noexcept { return atoms_; }

  bool has_diffuse_mass() const {
    return std::any_of(diffuse_.values().begin(), diffuse_.values().end(), [](const T& m) { return m != T(0); });
  }

  /// Can be tabulated at any depth.
  bool refinable() const { return model_.refinable() || !has_diffuse_mass(); }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  static std::vector<Atom<T>> merge_atoms(std::vector<Atom<T>> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom<T>& a, const Atom<T>& b) { return a.point < b.point; });
    std::vector<Atom<T>> out;
    for (auto& a : atoms) {
      if (a.mass == T(0)) continue;
      if (!out.empty() && out.back().point == a.point) {
        out.back().mass += a.mass;
      } else {
        out.push_back(std::move(a));
      }
    }
    return out;
  }

  int n_;
  CylinderTable<T> diffuse_;
  RefinementModel<T> model_;
  std::vector<Atom<T>> atoms_;
};

// ---------------------------------------------------------------------------
// Tabulation

/// Diffuse masses at `depth`: coarsened by summation, or refined by the model.
template <class T>
CylinderTable<T> diffuse_table(const Measure<T>& m, int depth) {
  const int n = m.n_branches();
  const int k = m.depth();
  if (depth <= k) {
    CylinderTable<T> out(n, depth);
    for (std::size_t idx = 0; idx < m.diffuse().size(); ++idx) {
      out[ancestor_index(idx, n, k, depth)] += m.diffuse()[idx];
    }
    return out;
  }
  if (!m.has_diffuse_mass()) return CylinderTable<T>(n, depth);
  if (!m.model().refinable()) {
    throw ResolutionError("frozen measure of depth " + std::to_string(k) + " cannot be refined to depth " +
                          std::to_string(depth));
  }
  std::vector<T> factors;
  for (Symbol s = 1; s <= n; ++s) factors.push_back(m.model().factor(s, n));
  CylinderTable<T> current = m.diffuse();
  for (int d = k; d < depth; ++d) {
    CylinderTable<T> next(n, d + 1);
    for (std::size_t idx = 0; idx < current.size(); ++idx) {
      for (std::size_t j = 0; j < factors.size(); ++j) {
        next[idx * static_cast<std::size_t>(n) + j] = current[idx] * factors[j];
      }
    }
    current = std::move(next);
  }
  return current;
}

/// The same measure with its diffuse part tabulated at `depth` >= depth().
template <class T>
Measure<T> refined(const Measure<T>& m, int depth) {
  if (depth <= m.depth()) return m;
  return Measure<T>(m.n_branches(), diffuse_table(m, depth), m.model(), m.atoms());
}

/// Depth-`depth` summary; anything finer is forgotten.
template <class T>
Measure<T> coarsened(const Measure<T>& m, int depth) {
  if (depth >= m.depth()) return m;
  return Measure<T>(m.n_branches(), diffuse_table(m, depth), RefinementModel<T>::frozen(), m.atoms());
}

template <class T>
Measure<T> Measure<T>::bernoulli(std::vector<T> weights, int depth) {
  const int n = static_cast<int>(weights.size());
  Measure base(n, CylinderTable<T>(n, 0, T(1)), RefinementModel<T>::bernoulli(std::move(weights)));
  return refined(base, depth);
}

/// Mass of the atoms whose expansion starts with `w`.
template <class T>
T atom_mass_in(const Measure<T>& m, std::span<const Symbol> w) {
  T sum(0);
  for (const auto& a : m.atoms()) {
    if (a.point.starts_with(w)) sum += a.mass;
  }
  return sum;
}

template <class T>
T diffuse_mass(const Measure<T>& m, std::span<const Symbol> w) {
  const int k = m.depth();
  const int n = m.n_branches();
  if (static_cast<int>(w.size()) <= k) {
    const auto [lo, hi] = m.diffuse().prefix_range(w);
    T sum(0);
    for (std::size_t idx = lo; idx < hi; ++idx) sum += m.diffuse()[idx];
    return sum;
  }
  if (!m.has_diffuse_mass()) return T(0);
  if (!m.model().refinable()) {
    throw ResolutionError("cylinder of length " + std::to_string(w.size()) + " is finer than frozen depth " +
                          std::to_string(k));
  }
  T mass = m.diffuse().at(w.first(static_cast<std::size_t>(k)));
  for (std::size_t pos = static_cast<std::size_t>(k); pos < w.size(); ++pos) mass *= m.model().factor(w[pos], n);
  return mass;
}

/// Full mass (diffuse + atoms) of the cylinder w.
template <class T>
T cylinder_mass(const Measure<T>& m, std::span<const Symbol> w) {
  return diffuse_mass(m, w) + atom_mass_in(m, w);
}

template <class T>
T cylinder_mass(const Measure<T>& m, const Word& w) {
  if (!w.is_finite()) throw DomainError("cylinder_mass needs a finite word");
  return cylinder_mass(m, std::span<const Symbol>(w.prefix()));
}

/// Full masses of every depth-`depth` cylinder.
template <class T>
CylinderTable<T> mass_table(const Measure<T>& m, int depth) {
  CylinderTable<T> out = diffuse_table(m, depth);
  for (const auto& a : m.atoms()) {
    const auto head = a.point.head(static_cast<std::size_t>(depth));
    out.at(head) += a.mass;
  }
  return out;
}

template <class T>
T total_mass(const Measure<T>& m) {
  T sum(0);
  for (const auto& x : m.diffuse().values()) sum += x;
  for (const auto& a : m.atoms()) sum += a.mass;
  return sum;
}

/// Mass of the single point `p` (0 if not an atom).
template <class T>
T atom_mass_at(const Measure<T>& m, const Word& p) {
  for (const auto& a : m.atoms()) {
    if (a.point == p) return a.mass;
  }
  return T(0);
}

template <class U, class T>
Measure<U> measure_cast(const Measure<T>& m) {
  if constexpr (std::is_same_v<T, U>) {
    return m;
  } else {
    std::vector<U> masses;
    masses.reserve(m.diffuse().size());
    for (const auto& x : m.diffuse().values()) masses.push_back(static_cast<U>(to_double(x)));
    std::vector<Atom<U>> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({a.point, static_cast<U>(to_double(a.mass))});
    return Measure<U>(m.n_branches(), CylinderTable<U>(m.n_branches(), m.depth(), std::move(masses)),
                      m.model().template cast<U>(), std::move(atoms));
  }
}

template <class T>
Measure<T> scaled(const Measure<T>& m, const T& c) {
  if (c < T(0)) throw DomainError("measures can only be scaled by nonnegative numbers");
  CylinderTable<T> table = m.diffuse();
  for (auto& x : table.values()) x *= c;
  std::vector<Atom<T>> atoms = m.atoms();
  for (auto& a : atoms) a.mass *= c;
  return Measure<T>(m.n_branches(), std::move(table), m.model(), std::move(atoms));
}

/// m restricted to the cylinder w.
template <class T>
Measure<T> restricted(const Measure<T>& m, std::span<const Symbol> w) {
  Measure<T> fine = refined(m, std::max(m.depth(), static_cast<int>(w.size())));
  CylinderTable<T> table = fine.diffuse();
  const auto [lo, hi] = table.prefix_range(w);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    if (idx < lo || idx >= hi) table[idx] = T(0);
  }
  std::vector<Atom<T>> atoms;
  for (const auto& a : fine.atoms()) {
    if (a.point.starts_with(w)) atoms.push_back(a);
  }
  return Measure<T>(m.n_branches(), std::move(table), fine.model(), std::move(atoms));
}

// ---------------------------------------------------------------------------
// Pushforwards

/// m ∘ tau_i^{-1}: mass of w moves to i·w.
template <class T>
Measure<T> pushforward_branch(const Measure<T>& m, Symbol i) {
  if (!Alphabet(m.n_branches()).contains(i)) throw DomainError("branch " + std::to_string(i) + " out of range");
  std::vector<Atom<T>> atoms;
  for (const auto& a : m.atoms()) atoms.push_back({a.point.prepend(i), a.mass});
  return Measure<T>(m.n_branches(), m.diffuse().embedded_in_branch(i), m.model(), std::move(atoms));
}

template <class T>
Measure<T> pushforward_branch(const IfsSystem& ifs, const Measure<T>& m, Symbol i) {
  ifs.require_present(i);
  return pushforward_branch(m, i);
}

/// m ∘ sigma^{-1}: mass of w becomes sum_i mass(i·w).
template <class T>
Measure<T> pushforward_sigma(const Measure<T>& m) {
  const int n = m.n_branches();
  std::vector<Atom<T>> atoms;
  for (const auto& a : m.atoms()) atoms.push_back({a.point.drop_first(), a.mass});
  if (m.depth() == 0) {
    if (!m.refinable()) throw ResolutionError("sigma pushforward of a frozen depth-0 measure");
    return Measure<T>(n, m.diffuse(), m.model(), std::move(atoms));
  }
  CylinderTable<T> table(n, m.depth() - 1);
  for (Symbol s = 1; s <= n; ++s) {
    const CylinderTable<T> block = m.diffuse().branch_block(s);
    for (std::size_t idx = 0; idx < block.size(); ++idx) table[idx] += block[idx];
  }
  return Measure<T>(n, std::move(table), m.model(), std::move(atoms));
}

/// sum_j coeffs[j] * ms[j], tabulated at the deepest depth involved.
template <class T>
Measure<T> convex_combine(const std::vector<T>& coeffs, const std::vector<Measure<T>>& ms) {
  if (coeffs.size() != ms.size() || ms.empty()) throw DomainError("convex_combine needs matching nonempty lists");
  const int n = ms.front().n_branches();
  int depth = 0;
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    if (ms[j].n_branches() != n) throw DomainError("convex_combine over different alphabets");
    if (coeffs[j] < T(0)) throw DomainError("convex_combine coefficients must be nonnegative");
    if (coeffs[j] != T(0) && ms[j].has_diffuse_mass()) {
      active.push_back(j);
      depth = std::max(depth, ms[j].depth());
    }
  }
  CylinderTable<T> table(n, depth);
  std::optional<RefinementModel<T>> model;
  bool mixed = false;
  for (std::size_t j : active) {
    const CylinderTable<T> part = diffuse_table(ms[j], depth);
    for (std::size_t idx = 0; idx < part.size(); ++idx) table[idx] += coeffs[j] * part[idx];
    if (!model) {
      model = ms[j].model();
    } else if (!model->same_refinement(ms[j].model(), n)) {
      mixed = true;
    }
  }
  std::vector<Atom<T>> atoms;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    for (const auto& a : ms[j].atoms()) atoms.push_back({a.point, coeffs[j] * a.mass});
  }
  RefinementModel<T> out_model =
      mixed ? RefinementModel<T>::frozen() : model.value_or(RefinementModel<T>::uniform());
  return Measure<T>(n, std::move(table), std::move(out_model), std::move(atoms));
}

// ---------------------------------------------------------------------------
// Radon-Nikodym calculus

/// Per-cylinder ratio num(w)/den(w) at `depth`; 0/0 is 0.
template <class T>
CylinderTable<T> radon_nikodym(const Measure<T>& num, const Measure<T>& den, int depth) {
  if (num.n_branches() != den.n_branches()) throw DomainError("measures over different alphabets");
  const CylinderTable<T> a = mass_table(num, depth);
  const CylinderTable<T> b = mass_table(den, depth);
  CylinderTable<T> out(num.n_branches(), depth);
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (b[idx] == T(0)) {
      if (a[idx] != T(0)) {
        throw NotAbsolutelyContinuous("numerator charges a null cylinder of the denominator",
                                      to_string(a.word_at(idx)));
      }
      continue;
    }
    out[idx] = a[idx] / b[idx];
  }
  return out;
}

struct AbsContinuity {
  /// Verdict of the cylinder test at depths 0..k.
  bool cylinder = true;
  /// Verdict using atom structure and refinement models; empty when a
  /// frozen diffuse part leaves it undecidable.
  std::optional<bool> exact;
  std::optional<Word> cylinder_witness;
  std::optional<Word> atom_witness;

  /// exact verdict when known, else the cylinder verdict.
  bool holds() const { return exact.value_or(cylinder); }

  std::string witness_text() const {
    if (atom_witness) return to_string(*atom_witness);
    if (cylinder_witness) return to_string(*cylinder_witness);
    return {};
  }
};

/// num << den, decided at finite depth and (where possible) exactly.
template <class T>
AbsContinuity is_abs_continuous(const Measure<T>& num, const Measure<T>& den, int depth) {
  if (num.n_branches() != den.n_branches()) throw DomainError("measures over different alphabets");
  AbsContinuity out;
  for (int d = 0; d <= depth && out.cylinder; ++d) {
    const CylinderTable<T> a = mass_table(num, d);
    const CylinderTable<T> b = mass_table(den, d);
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
      if (b[idx] == T(0) && a[idx] != T(0)) {
        out.cylinder = false;
        out.cylinder_witness = a.word_at(idx);
        break;
      }
    }
  }

  bool exact = true;
  for (const auto& atom : num.atoms()) {
    if (atom_mass_at(den, atom.point) == T(0)) {
      exact = false;
      out.atom_witness = atom.point;
      break;
    }
  }
  if (exact && num.has_diffuse_mass()) {
    if (!num.model().refinable() || (!den.model().refinable() && den.has_diffuse_mass())) {
      out.exact = std::nullopt;
      return out;
    }
    // Distinct product refinements are mutually singular, so the diffuse
    // parts must refine alike and den must charge every cell num charges.
    const int d = std::max(num.depth(), den.depth());
    const CylinderTable<T> a = diffuse_table(num, d);
    const CylinderTable<T> b = diffuse_table(den, d);
    const bool same_model = den.has_diffuse_mass() && num.model().same_refinement(den.model(), num.n_branches());
    for (std::size_t idx = 0; idx < a.size() && exact; ++idx) {
      if (a[idx] != T(0) && (!same_model || b[idx] == T(0))) {
        exact = false;
        if (!out.cylinder_witness) out.cylinder_witness = a.word_at(idx);
      }
    }
  }
  out.exact = exact;
  return out;
}

/// sum over depth-k cylinders of |a(w) - b(w)|.
template <class T>
T l1_distance(const Measure<T>& a, const Measure<T>& b, int depth) {
  const CylinderTable<T> ta = mass_table(a, depth);
  const CylinderTable<T> tb = mass_table(b, depth);
  T sum(0);
  for (std::size_t idx = 0; idx < ta.size(); ++idx) sum += detail::abs_value(T(ta[idx] - tb[idx]));
  return sum;
}

// ---------------------------------------------------------------------------
// Hutchinson measure

template <class T>
void validate_weights(const IfsSystem& ifs, const std::vector<T>& p) {
  bool ok = static_cast<int>(p.size()) == ifs.n_branches();
  for (const auto& x : p) ok = ok && x > T(0);
  if (!ok || !detail::sums_to_one(p)) throw DomainError("weights must be positive and sum to 1");
}

/// Depth-k tabulation of the unique measure with mu = sum_i p_i mu∘tau_i^{-1}:
/// the product measure, mass(w_1..w_k) = p_{w_1}...p_{w_k}.
template <class T>
Measure<T> hutchinson_fixed_point(const IfsSystem& ifs, const std::vector<T>& p, int depth) {
  validate_weights(ifs, p);
  return Measure<T>::bernoulli(p, depth);
}

/// mu -> sum_i p_i mu∘tau_i^{-1}, tracked at fixed depth.
template <class T>
Measure<T> hutchinson_step(const IfsSystem& ifs, const std::vector<T>& p, const Measure<T>& m, int depth) {
  std::vector<Measure<T>> parts;
  for (Symbol s = 1; s <= ifs.n_branches(); ++s) parts.push_back(pushforward_branch(m, s));
  return coarsened(convex_combine(p, parts), depth);
}

template <class T>
struct HutchinsonTrace {
  Measure<T> result;
  /// l1 distance to the fixed point before iteration 0, 1, ..., n.
  std::vector<T> l1_distance;
};

template <class T>
HutchinsonTrace<T> hutchinson_iterate(const IfsSystem& ifs, const std::vector<T>& p, int depth,
                                      const Measure<T>& start, int iterations) {
  validate_weights(ifs, p);
  if (iterations < 0) throw DomainError("iteration count must be nonnegative");
  const Measure<T> target = hutchinson_fixed_point(ifs, p, depth);
  Measure<T> current(start.n_branches(), mass_table(start, depth), RefinementModel<T>::frozen());
  HutchinsonTrace<T> trace{current, {l1_distance(current, target, depth)}};
  for (int it = 0; it < iterations; ++it) {
    current = hutchinson_step(ifs, p, current, depth);
    trace.l1_distance.push_back(l1_distance(current, target, depth));
  }
  trace.result = std::move(current);
  return trace;
}

/// Empirical measure of `samples` i.i.d. branch words of length `depth`.
/// Deterministic for a given seed.
template <class T>
Measure<Rational> chaos_game(const IfsSystem& ifs, const std::vector<T>& p, std::int64_t samples,
                             std::uint64_t seed, int depth) {
  validate_weights(ifs, p);
  if (samples < 1) throw DomainError("chaos game needs at least one sample");
  std::vector<double> w;
  for (const auto& x : p) w.push_back(to_double(x));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  const auto n = static_cast<std::size_t>(ifs.n_branches());
  std::vector<std::int64_t> counts(cylinder_count(ifs.n_branches(), depth), 0);
  for (std::int64_t draw = 0; draw < samples; ++draw) {
    std::size_t idx = 0;
    for (int d = 0; d < depth; ++d) idx = idx * n + static_cast<std::size_t>(pick(rng));
    ++counts[idx];
  }
  CylinderTable<Rational> table(ifs.n_branches(), depth);
  for (std::size_t idx = 0; idx < counts.size(); ++idx) table[idx] = Rational(counts[idx], samples);
  return Measure<Rational>(ifs.n_branches(), std::move(table), RefinementModel<Rational>::frozen());
}

}  // namespace ifs_cuntz
