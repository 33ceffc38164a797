#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <tuple>
#include <vector>

#include "ifs_cuntz/coding_space.hpp"
#include "ifs_cuntz/measures.hpp"

namespace ifs_cuntz {

/// A vector phi·sqrt(dmu) of the universal Hilbert space H(X): phi is
/// piecewise constant on the depth-k cylinders of mu's diffuse part and
/// takes one value per atom of mu. Values over null cells are stored as 0.
class SquareDensity {
 public:
  SquareDensity(Measure<double> base, std::vector<Complex> values, std::vector<Complex> atom_values)
      : base_(std::move(base)), values_(std::move(values)), atom_values_(std::move(atom_values)) {
    if (values_.size() != base_.diffuse().size()) throw DomainError("density values do not match the base depth");
    if (atom_values_.size() != base_.atoms().size()) throw DomainError("one density value per atom is required");
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      if (base_.diffuse()[idx] == 0.0) values_[idx] = 0.0;
    }
  }

  /// c·sqrt(dmu)
  static SquareDensity constant(const Measure<double>& base, Complex c = 1.0) {
    return SquareDensity(base, std::vector<Complex>(base.diffuse().size(), c),
                         std::vector<Complex>(base.atoms().size(), c));
  }

  static SquareDensity zero(int n_branches) { return constant(Measure<double>::zero(n_branches), 0.0); }

  const Measure<double>& base() const noexcept { return base_; }
  const std::vector<Complex>& values() const noexcept { return values_; }
  const std::vector<Complex>& atom_values() const noexcept { return atom_values_; }
  int depth() const noexcept { return base_.depth(); }
  int n_branches() const noexcept { return base_.n_branches(); }

 private:
  Measure<double> base_;
  std::vector<Complex> values_;
  std::vector<Complex> atom_values_;
};

namespace detail {

/// Visits the union of the atom lists of two densities in word order:
/// fn(point, phi, mu_mass, psi, nu_mass), absent side reported with mass 0.
template <class Fn>
void for_atom_pairs(const SquareDensity& a, const SquareDensity& b, Fn&& fn) {
  const auto& aa = a.base().atoms();
  const auto& ba = b.base().atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < aa.size() || j < ba.size()) {
    if (j == ba.size() || (i < aa.size() && aa[i].point < ba[j].point)) {
      fn(aa[i].point, a.atom_values()[i], aa[i].mass, Complex(0.0), 0.0);
      ++i;
    } else if (i == aa.size() || ba[j].point < aa[i].point) {
      fn(ba[j].point, Complex(0.0), 0.0, b.atom_values()[j], ba[j].mass);
      ++j;
    } else {
      fn(aa[i].point, a.atom_values()[i], aa[i].mass, b.atom_values()[j], ba[j].mass);
      ++i;
      ++j;
    }
  }
}

inline double safe_sqrt_ratio(double num, double den) { return den > 0.0 ? std::sqrt(num / den) : 0.0; }

inline SquareDensity add_over(const SquareDensity& a, const SquareDensity& b, const Measure<double>& dominating);

}  // namespace detail

/// Same class, diffuse part tabulated at `depth` >= a.depth().
inline SquareDensity refined(const SquareDensity& a, int depth) {
  if (depth <= a.depth()) return a;
  Measure<double> base = refined(a.base(), depth);
  std::vector<Complex> values(base.diffuse().size());
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    values[idx] = a.values()[ancestor_index(idx, a.n_branches(), depth, a.depth())];
  }
  return SquareDensity(std::move(base), std::move(values), a.atom_values());
}

inline void require_same_alphabet(const SquareDensity& a, const SquareDensity& b) {
  if (a.n_branches() != b.n_branches()) throw DomainError("square densities over different alphabets");
}

/// <a|b>, conjugate-linear in a. Diffuse cells contribute
/// conj(phi) psi sqrt(mu(w) nu(w)); atoms pair only with the same atom.
inline Complex inner(const SquareDensity& a, const SquareDensity& b) {
  require_same_alphabet(a, b);
  const int depth = std::max(a.depth(), b.depth());
  const SquareDensity fa = refined(a, depth);
  const SquareDensity fb = refined(b, depth);
  Complex sum = 0.0;
  for (std::size_t idx = 0; idx < fa.values().size(); ++idx) {
    const double weight = std::sqrt(fa.base().diffuse()[idx] * fb.base().diffuse()[idx]);
    if (weight > 0.0) sum += std::conj(fa.values()[idx]) * fb.values()[idx] * weight;
  }
  detail::for_atom_pairs(fa, fb, [&](const Word&, Complex phi, double mu, Complex psi, double nu) {
    if (mu > 0.0 && nu > 0.0) sum += std::conj(phi) * psi * std::sqrt(mu * nu);
  });
  return sum;
}

inline double norm_squared(const SquareDensity& a) {
  double sum = 0.0;
  for (std::size_t idx = 0; idx < a.values().size(); ++idx) sum += std::norm(a.values()[idx]) * a.base().diffuse()[idx];
  for (std::size_t j = 0; j < a.atom_values().size(); ++j) sum += std::norm(a.atom_values()[j]) * a.base().atoms()[j].mass;
  return sum;
}

inline double norm(const SquareDensity& a) { return std::sqrt(norm_squared(a)); }

inline SquareDensity scaled(const SquareDensity& a, Complex c) {
  std::vector<Complex> values = a.values();
  for (auto& v : values) v *= c;
  std::vector<Complex> atom_values = a.atom_values();
  for (auto& v : atom_values) v *= c;
  return SquareDensity(a.base(), std::move(values), std::move(atom_values));
}

/// Sum in H(X), represented over lambda = mu + nu.
inline SquareDensity add(const SquareDensity& a, const SquareDensity& b) {
  require_same_alphabet(a, b);
  return detail::add_over(a, b, convex_combine<double>({1.0, 1.0}, {a.base(), b.base()}));
}

inline SquareDensity subtract(const SquareDensity& a, const SquareDensity& b) { return add(a, scaled(b, -1.0)); }

/// ||a - b||: the cell terms are |phi sqrt(mu) - psi sqrt(nu)|^2, with
/// lambda cancelling.
inline double distance(const SquareDensity& a, const SquareDensity& b) {
  require_same_alphabet(a, b);
  const int depth = std::max(a.depth(), b.depth());
  const SquareDensity fa = refined(a, depth);
  const SquareDensity fb = refined(b, depth);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < fa.values().size(); ++idx) {
    sum += std::norm(fa.values()[idx] * std::sqrt(fa.base().diffuse()[idx]) -
                     fb.values()[idx] * std::sqrt(fb.base().diffuse()[idx]));
  }
  detail::for_atom_pairs(fa, fb, [&](const Word&, Complex phi, double mu, Complex psi, double nu) {
    sum += std::norm(phi * std::sqrt(mu) - psi * std::sqrt(nu));
  });
  return std::sqrt(sum);
}

/// phi sqrt(dmu/dlambda) == psi sqrt(dnu/dlambda) on every cell and atom
/// where lambda = mu + nu charges, within tol.
inline bool equivalent(const SquareDensity& a, const SquareDensity& b, double tol) {
  require_same_alphabet(a, b);
  const int depth = std::max(a.depth(), b.depth());
  const SquareDensity fa = refined(a, depth);
  const SquareDensity fb = refined(b, depth);
  for (std::size_t idx = 0; idx < fa.values().size(); ++idx) {
    const double mu = fa.base().diffuse()[idx];
    const double nu = fb.base().diffuse()[idx];
    const double lambda = mu + nu;
    if (lambda <= 0.0) continue;
    const Complex lhs = fa.values()[idx] * detail::safe_sqrt_ratio(mu, lambda);
    const Complex rhs = fb.values()[idx] * detail::safe_sqrt_ratio(nu, lambda);
    if (std::abs(lhs - rhs) > tol) return false;
  }
  bool ok = true;
  detail::for_atom_pairs(fa, fb, [&](const Word&, Complex phi, double mu, Complex psi, double nu) {
    const double lambda = mu + nu;
    if (lambda <= 0.0) return;
    const Complex lhs = phi * detail::safe_sqrt_ratio(mu, lambda);
    const Complex rhs = psi * detail::safe_sqrt_ratio(nu, lambda);
    if (std::abs(lhs - rhs) > tol) ok = false;
  });
  return ok;
}

namespace detail {

/// Sum represented over an arbitrary dominating measure; the class does
/// not depend on the choice.
inline SquareDensity add_over(const SquareDensity& a, const SquareDensity& b, const Measure<double>& dominating) {
  const int depth = std::max({a.depth(), b.depth(), dominating.depth()});
  const SquareDensity fa = refined(a, depth);
  const SquareDensity fb = refined(b, depth);
  const Measure<double> lambda = refined(dominating, depth);
  std::vector<Complex> values(lambda.diffuse().size());
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double l = lambda.diffuse()[idx];
    const double mu = fa.base().diffuse()[idx];
    const double nu = fb.base().diffuse()[idx];
    if ((mu > 0.0 || nu > 0.0) && l <= 0.0) throw DomainError("dominating measure misses a charged cell");
    values[idx] = fa.values()[idx] * safe_sqrt_ratio(mu, l) + fb.values()[idx] * safe_sqrt_ratio(nu, l);
  }
  std::vector<Complex> atom_values;
  for (const auto& atom : lambda.atoms()) {
    const double l = atom.mass;
    Complex v = 0.0;
    for_atom_pairs(fa, fb, [&](const Word& p, Complex phi, double mu, Complex psi, double nu) {
      if (p == atom.point) v = phi * safe_sqrt_ratio(mu, l) + psi * safe_sqrt_ratio(nu, l);
    });
    atom_values.push_back(v);
  }
  for_atom_pairs(fa, fb, [&](const Word& p, Complex, double mu, Complex, double nu) {
    if ((mu > 0.0 || nu > 0.0) && atom_mass_at(lambda, p) <= 0.0) {
      throw DomainError("dominating measure misses an atom");
    }
  });
  return SquareDensity(lambda, std::move(values), std::move(atom_values));
}

/// Rebuilds a density from (point, mass, value) triples; used after atom relabelling.
inline SquareDensity with_atoms(int n_branches, CylinderTable<double> table, const RefinementModel<double>& model,
                                std::vector<Complex> values, std::vector<std::tuple<Word, double, Complex>> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
  std::vector<Atom<double>> base_atoms;
  std::vector<Complex> atom_values;
  for (auto& [p, m, v] : atoms) {
    if (m <= 0.0) continue;
    base_atoms.push_back({p, m});
    atom_values.push_back(v);
  }
  return SquareDensity(Measure<double>(n_branches, std::move(table), model, std::move(base_atoms)), std::move(values),
                       std::move(atom_values));
}

}  // namespace detail

/// S_i(phi sqrt(dmu)) = (phi∘sigma) sqrt(d mu∘tau_i^{-1}).
inline SquareDensity apply_S(const IfsSystem& ifs, Symbol i, const SquareDensity& a) {
  ifs.require_present(i);
  if (a.n_branches() != ifs.n_branches()) throw DomainError("density alphabet does not match the system");
  const int n = a.n_branches();
  const CylinderTable<Complex> phi(n, a.depth(), a.values());
  std::vector<std::tuple<Word, double, Complex>> atoms;
  for (std::size_t j = 0; j < a.atom_values().size(); ++j) {
    atoms.emplace_back(a.base().atoms()[j].point.prepend(i), a.base().atoms()[j].mass, a.atom_values()[j]);
  }
  return detail::with_atoms(n, a.base().diffuse().embedded_in_branch(i), a.base().model(),
                            phi.embedded_in_branch(i).values(), std::move(atoms));
}

/// S_i^*: restriction to the branch cylinder tau_i(X), then
/// (phi∘tau_i, (mu|tau_i(X))∘sigma^{-1}). Zero on the complement of S_i H.
inline SquareDensity apply_S_star(const IfsSystem& ifs, Symbol i, const SquareDensity& a) {
  ifs.require_present(i);
  if (a.n_branches() != ifs.n_branches()) throw DomainError("density alphabet does not match the system");
  const int n = a.n_branches();
  const SquareDensity fine = refined(a, std::max(1, a.depth()));
  const CylinderTable<Complex> phi(n, fine.depth(), fine.values());
  std::vector<std::tuple<Word, double, Complex>> atoms;
  for (std::size_t j = 0; j < fine.atom_values().size(); ++j) {
    const Word& p = fine.base().atoms()[j].point;
    if (p.at(0) == i) atoms.emplace_back(p.drop_first(), fine.base().atoms()[j].mass, fine.atom_values()[j]);
  }
  return detail::with_atoms(n, fine.base().diffuse().branch_block(i), fine.base().model(),
                            phi.branch_block(i).values(), std::move(atoms));
}

struct RelationResidual {
  std::size_t vector_id;
  std::string relation;
  double residual;
};

struct CuntzReport {
  std::vector<RelationResidual> rows;
  /// sum_{i in B} S_i S_i^* a - a per input vector; only filled for a
  /// system whose present branches do not cover X.
  std::vector<SquareDensity> completeness_defects;
  double tolerance = 0.0;

  double max_residual() const {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.residual);
    return worst;
  }

  const RelationResidual* worst() const {
    const RelationResidual* out = nullptr;
    for (const auto& r : rows) {
      if (!out || r.residual > out->residual) out = &r;
    }
    return out;
  }

  bool ok() const { return max_residual() <= tolerance; }
};

/// Checks S_i^* S_j = delta_ij I and sum_i S_i S_i^* = I on each vector,
/// over the present branches of `ifs`.
inline CuntzReport verify_cuntz_on(const IfsSystem& ifs, const std::vector<SquareDensity>& vectors, double tol) {
  CuntzReport report;
  report.tolerance = tol;
  const auto branches = ifs.present_branches();
  for (std::size_t id = 0; id < vectors.size(); ++id) {
    const SquareDensity& a = vectors[id];
    for (Symbol j : branches) {
      const SquareDensity sj = apply_S(ifs, j, a);
      for (Symbol i : branches) {
        const SquareDensity v = apply_S_star(ifs, i, sj);
        const double r = i == j ? distance(v, a) : norm(v);
        report.rows.push_back({id, "S" + std::to_string(i) + "*S" + std::to_string(j), r});
      }
    }
    SquareDensity sum = SquareDensity::zero(a.n_branches());
    for (Symbol i : branches) sum = add(sum, apply_S(ifs, i, apply_S_star(ifs, i, a)));
    if (ifs.full_cover()) {
      report.rows.push_back({id, "sum SiSi*", distance(sum, a)});
    } else {
      SquareDensity defect = subtract(sum, a);
      report.rows.push_back({id, "completeness_defect", norm(defect)});
      report.completeness_defects.push_back(std::move(defect));
    }
  }
  return report;
}

}  // namespace ifs_cuntz
