#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ifs_cuntz/hilbert.hpp"
#include "ifs_cuntz/measures.hpp"

namespace ifs_cuntz {

/// A measure with mu(X) = 1, checked exactly.
class ProbabilityMeasure {
 public:
  explicit ProbabilityMeasure(Measure<Rational> m) : measure_(std::make_shared<const Measure<Rational>>(std::move(m))) {
    if (total_mass(*measure_) != 1) {
      throw DomainError("L2 base measure must be normalized, total mass is " + to_string(total_mass(*measure_)));
    }
  }

  const Measure<Rational>& get() const noexcept { return *measure_; }
  const Measure<Rational>* operator->() const noexcept { return measure_.get(); }
  int n_branches() const noexcept { return measure_->n_branches(); }

  friend bool operator==(const ProbabilityMeasure& a, const ProbabilityMeasure& b) {
    return a.measure_ == b.measure_ || *a.measure_ == *b.measure_;
  }

 private:
  std::shared_ptr<const Measure<Rational>> measure_;
};

/// Element of L^2(mu): piecewise constant on depth-k cylinders of the
/// diffuse part, one value per atom of mu.
class L2Vector {
 public:
  L2Vector(ProbabilityMeasure base, int depth, std::vector<Complex> values, std::vector<Complex> atom_values)
      : base_(std::move(base)), depth_(depth), values_(std::move(values)), atom_values_(std::move(atom_values)) {
    if (values_.size() != cylinder_count(base_.n_branches(), depth_)) {
      throw DomainError("L2 vector values do not match its depth");
    }
    if (atom_values_.size() != base_->atoms().size()) throw DomainError("one L2 value per atom of the base is required");
    const CylinderTable<Rational> masses = diffuse_table(base_.get(), depth_);
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      if (masses[idx] == 0) values_[idx] = 0.0;
    }
  }

  static L2Vector constant(const ProbabilityMeasure& base, Complex c = 1.0, int depth = 0) {
    return L2Vector(base, depth, std::vector<Complex>(cylinder_count(base.n_branches(), depth), c),
                    std::vector<Complex>(base->atoms().size(), c));
  }

  /// Values from a function of the cylinder word; atoms get `atom_fn` of the atom point.
  static L2Vector from_function(const ProbabilityMeasure& base, int depth,
                                const std::function<Complex(std::span<const Symbol>)>& fn,
                                const std::function<Complex(const Word&)>& atom_fn = {}) {
    const CylinderTable<Complex> shape(base.n_branches(), depth);
    std::vector<Complex> values(shape.size());
    for (std::size_t idx = 0; idx < values.size(); ++idx) values[idx] = fn(shape.symbols_at(idx));
    std::vector<Complex> atom_values;
    for (const auto& a : base->atoms()) atom_values.push_back(atom_fn ? atom_fn(a.point) : Complex(0.0));
    return L2Vector(base, depth, std::move(values), std::move(atom_values));
  }

  const ProbabilityMeasure& base() const noexcept { return base_; }
  int depth() const noexcept { return depth_; }
  int n_branches() const noexcept { return base_.n_branches(); }
  const std::vector<Complex>& values() const noexcept { return values_; }
  const std::vector<Complex>& atom_values() const noexcept { return atom_values_; }

  Complex value_at(std::span<const Symbol> w) const { return CylinderTable<Complex>(n_branches(), depth_, values_).at(w); }

 private:
  ProbabilityMeasure base_;
  int depth_;
  std::vector<Complex> values_;
  std::vector<Complex> atom_values_;
};

inline void require_same_base(const L2Vector& a, const L2Vector& b) {
  if (!(a.base() == b.base())) throw DomainError("L2 vectors over different base measures");
}

inline L2Vector refined(const L2Vector& a, int depth) {
  if (depth <= a.depth()) return a;
  std::vector<Complex> values(cylinder_count(a.n_branches(), depth));
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    values[idx] = a.values()[ancestor_index(idx, a.n_branches(), depth, a.depth())];
  }
  return L2Vector(a.base(), depth, std::move(values), a.atom_values());
}

inline Complex l2_inner(const L2Vector& a, const L2Vector& b) {
  require_same_base(a, b);
  const int depth = std::max(a.depth(), b.depth());
  const L2Vector fa = refined(a, depth);
  const L2Vector fb = refined(b, depth);
  const CylinderTable<Rational> masses = diffuse_table(a.base().get(), depth);
  Complex sum = 0.0;
  for (std::size_t idx = 0; idx < masses.size(); ++idx) {
    sum += std::conj(fa.values()[idx]) * fb.values()[idx] * to_double(masses[idx]);
  }
  const auto& atoms = a.base()->atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    sum += std::conj(fa.atom_values()[j]) * fb.atom_values()[j] * to_double(atoms[j].mass);
  }
  return sum;
}

inline double l2_norm_squared(const L2Vector& a) { return l2_inner(a, a).real(); }
inline double l2_norm(const L2Vector& a) { return std::sqrt(l2_norm_squared(a)); }

inline L2Vector l2_combine(Complex ca, const L2Vector& a, Complex cb, const L2Vector& b) {
  require_same_base(a, b);
  const int depth = std::max(a.depth(), b.depth());
  const L2Vector fa = refined(a, depth);
  const L2Vector fb = refined(b, depth);
  std::vector<Complex> values(fa.values().size());
  for (std::size_t idx = 0; idx < values.size(); ++idx) values[idx] = ca * fa.values()[idx] + cb * fb.values()[idx];
  std::vector<Complex> atom_values(fa.atom_values().size());
  for (std::size_t j = 0; j < atom_values.size(); ++j) {
    atom_values[j] = ca * fa.atom_values()[j] + cb * fb.atom_values()[j];
  }
  return L2Vector(a.base(), depth, std::move(values), std::move(atom_values));
}

inline L2Vector l2_add(const L2Vector& a, const L2Vector& b) { return l2_combine(1.0, a, 1.0, b); }
inline double l2_distance(const L2Vector& a, const L2Vector& b) { return l2_norm(l2_combine(1.0, a, -1.0, b)); }

/// p = d(mu∘tau_i^{-1})/dmu, tabulated on cylinders of `depth` (at least
/// mu.depth()+1, where the ratio is exact) and on the atoms of mu.
struct BranchDensity {
  Symbol branch;
  CylinderTable<Rational> diffuse;
  std::vector<Rational> atoms;

  /// Smallest value on positive-mass cells of the branch cylinder.
  std::optional<Rational> minimum_on_branch(const Measure<Rational>& mu) const {
    std::optional<Rational> best;
    const CylinderTable<Rational> masses = diffuse_table(mu, diffuse.depth());
    const auto [lo, hi] = diffuse.prefix_range(std::vector<Symbol>{branch});
    for (std::size_t idx = lo; idx < hi; ++idx) {
      if (masses[idx] > 0 && (!best || diffuse[idx] < *best)) best = diffuse[idx];
    }
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (mu.atoms()[j].point.at(0) == branch && (!best || atoms[j] < *best)) best = atoms[j];
    }
    return best;
  }

  /// p >= 1 mu-a.e. on tau_i(X), checked on positive-mass cells.
  bool at_least_one_on_branch(const Measure<Rational>& mu) const {
    const auto m = minimum_on_branch(mu);
    return !m || *m >= 1;
  }
};

inline BranchDensity branch_density(const ProbabilityMeasure& base, Symbol i, int depth) {
  const Measure<Rational>& mu = base.get();
  const int n = mu.n_branches();
  if (!Alphabet(n).contains(i)) throw DomainError("branch " + std::to_string(i) + " out of range");
  const int d = std::max({depth, mu.depth() + 1, 1});
  const Measure<Rational> pushed = pushforward_branch(mu, i);
  const AbsContinuity verdict = is_abs_continuous(pushed, mu, d);
  if (!verdict.holds()) {
    throw NotAbsolutelyContinuous("mu∘tau_" + std::to_string(i) + "^{-1} is not absolutely continuous w.r.t. mu",
                                  verdict.witness_text());
  }
  BranchDensity out{i, CylinderTable<Rational>(n, d), {}};
  const CylinderTable<Rational> den = diffuse_table(mu, d);
  const CylinderTable<Rational> num = diffuse_table(pushed, d);
  for (std::size_t idx = 0; idx < den.size(); ++idx) {
    if (den[idx] == 0) {
      if (num[idx] != 0) {
        throw NotAbsolutelyContinuous("pushed mass on a null cell", to_string(den.word_at(idx)));
      }
      continue;
    }
    out.diffuse[idx] = num[idx] / den[idx];
  }
  for (const auto& a : mu.atoms()) {
    out.atoms.push_back(a.point.at(0) == i ? Rational(atom_mass_at(mu, a.point.drop_first()) / a.mass) : Rational(0));
  }
  return out;
}

namespace detail {

inline std::optional<std::size_t> atom_index(const Measure<Rational>& mu, const Word& p) {
  const auto& atoms = mu.atoms();
  auto it = std::lower_bound(atoms.begin(), atoms.end(), p,
                             [](const Atom<Rational>& a, const Word& w) { return a.point < w; });
  if (it == atoms.end() || it->point != p) return std::nullopt;
  return static_cast<std::size_t>(it - atoms.begin());
}

inline std::size_t pow_index(int n, int k) { return cylinder_count(n, k); }

}  // namespace detail

/// S_i phi = (phi∘sigma) sqrt(p_i).
inline L2Vector apply_S_mu(Symbol i, const L2Vector& phi) {
  const Measure<Rational>& mu = phi.base().get();
  const int n = phi.n_branches();
  const int d = std::max(phi.depth() + 1, mu.depth() + 1);
  const BranchDensity p = branch_density(phi.base(), i, d);
  const std::size_t block = detail::pow_index(n, d - 1);
  std::vector<Complex> values(p.diffuse.size(), 0.0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (static_cast<Symbol>(idx / block) + 1 != i || p.diffuse[idx] == 0) continue;
    const std::size_t tail = idx % block;
    values[idx] = phi.values()[ancestor_index(tail, n, d - 1, phi.depth())] * std::sqrt(to_double(p.diffuse[idx]));
  }
  std::vector<Complex> atom_values;
  for (std::size_t j = 0; j < mu.atoms().size(); ++j) {
    Complex v = 0.0;
    if (p.atoms[j] != 0) {
      const auto src = detail::atom_index(mu, mu.atoms()[j].point.drop_first());
      v = phi.atom_values()[src.value()] * std::sqrt(to_double(p.atoms[j]));
    }
    atom_values.push_back(v);
  }
  return L2Vector(phi.base(), d, std::move(values), std::move(atom_values));
}

/// S_i^* phi = (phi∘tau_i) (p_i∘tau_i)^{-1/2}.
inline L2Vector apply_S_mu_star(Symbol i, const L2Vector& phi) {
  const Measure<Rational>& mu = phi.base().get();
  const int n = phi.n_branches();
  const int d = std::max({phi.depth() - 1, mu.depth(), 0});
  const BranchDensity p = branch_density(phi.base(), i, d + 1);
  const std::size_t offset = detail::pow_index(n, d) * static_cast<std::size_t>(i - 1);
  std::vector<Complex> values(detail::pow_index(n, d), 0.0);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const std::size_t child = offset + idx;
    if (p.diffuse[child] == 0) continue;
    values[idx] = phi.values()[ancestor_index(child, n, d + 1, phi.depth())] / std::sqrt(to_double(p.diffuse[child]));
  }
  std::vector<Complex> atom_values;
  for (const auto& a : mu.atoms()) {
    Complex v = 0.0;
    if (const auto src = detail::atom_index(mu, a.point.prepend(i))) {
      if (p.atoms[*src] != 0) v = phi.atom_values()[*src] / std::sqrt(to_double(p.atoms[*src]));
    }
    atom_values.push_back(v);
  }
  return L2Vector(phi.base(), d, std::move(values), std::move(atom_values));
}

/// W_mu phi = (phi, mu) in H(X).
inline SquareDensity embed_W_mu(const L2Vector& phi) {
  const int depth = std::max(phi.depth(), phi.base()->depth());
  const L2Vector fine = refined(phi, depth);
  return SquareDensity(measure_cast<double>(refined(phi.base().get(), depth)), fine.values(), fine.atom_values());
}

/// || W_mu S_mu phi - S_i W_mu phi ||_{H(X)}
inline double check_intertwining(Symbol i, const L2Vector& phi) {
  const IfsSystem coding = IfsSystem::symbolic(phi.n_branches());
  return distance(embed_W_mu(apply_S_mu(i, phi)), apply_S(coding, i, embed_W_mu(phi)));
}

/// ||S_i^* phi||^2 = sum_w |phi(i·w)|^2 mu(w) / p(i·w), with the measure
/// factor formed exactly before rounding.
inline double norm_squared_S_mu_star(Symbol i, const L2Vector& phi) {
  const Measure<Rational>& mu = phi.base().get();
  const int n = phi.n_branches();
  const int d = std::max({phi.depth() - 1, mu.depth(), 0});
  const BranchDensity p = branch_density(phi.base(), i, d + 1);
  const CylinderTable<Rational> masses = diffuse_table(mu, d);
  const std::size_t offset = masses.size() * static_cast<std::size_t>(i - 1);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < masses.size(); ++idx) {
    const std::size_t child = offset + idx;
    if (p.diffuse[child] == 0) continue;
    const Complex v = phi.values()[ancestor_index(child, n, d + 1, phi.depth())];
    sum += std::norm(v) * to_double(Rational(masses[idx] / p.diffuse[child]));
  }
  for (const auto& a : mu.atoms()) {
    if (const auto src = detail::atom_index(mu, a.point.prepend(i))) {
      if (p.atoms[*src] != 0) sum += std::norm(phi.atom_values()[*src]) * to_double(Rational(a.mass / p.atoms[*src]));
    }
  }
  return sum;
}

/// ||phi||^2 - sum_{i in B} ||S_i^* phi||^2; zero for all phi iff the
/// branches in B cover X.
inline double completeness_defect(const std::vector<Symbol>& branches, const L2Vector& phi) {
  double defect = l2_norm_squared(phi);
  for (Symbol i : branches) defect -= norm_squared_S_mu_star(i, phi);
  return defect;
}

/// mu(X \ union_{i in B} tau_i(X)), exact.
inline Rational uncovered_mass(const ProbabilityMeasure& base, const std::vector<Symbol>& branches) {
  Rational covered = 0;
  for (Symbol i : branches) covered += cylinder_mass(base.get(), Word({i}));
  return total_mass(base.get()) - covered;
}

/// integral of |phi|^2 over the complement of the covered branch cylinders.
inline double uncovered_energy(const std::vector<Symbol>& branches, const L2Vector& phi) {
  const L2Vector fine = refined(phi, std::max(phi.depth(), 1));
  const CylinderTable<Rational> masses = diffuse_table(phi.base().get(), fine.depth());
  auto covered = [&](Symbol s) { return std::find(branches.begin(), branches.end(), s) != branches.end(); };
  double sum = 0.0;
  for (std::size_t idx = 0; idx < masses.size(); ++idx) {
    if (!covered(masses.symbols_at(idx).front())) sum += std::norm(fine.values()[idx]) * to_double(masses[idx]);
  }
  const auto& atoms = phi.base()->atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!covered(atoms[j].point.at(0))) sum += std::norm(fine.atom_values()[j]) * to_double(atoms[j].mass);
  }
  return sum;
}

}  // namespace ifs_cuntz
