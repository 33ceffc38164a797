#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "ifs_cuntz.hpp"

namespace testing_support {

using namespace ifs_cuntz;

/// Seeded generators for property tests. Everything is reproducible from
/// the seed so a failing case can be replayed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Complex complex() { return {real(), real()}; }

  /// m/16 + i m'/16 with |m|, |m'| <= 16: exact in binary floating point.
  Complex dyadic_complex() { return {integer(-16, 16) / 16.0, integer(-16, 16) / 16.0}; }

  /// Positive rational weights summing to 1.
  std::vector<Rational> weights(int n) {
    std::vector<int> raw(static_cast<std::size_t>(n));
    int total = 0;
    for (auto& r : raw) total += (r = integer(1, 9));
    std::vector<Rational> out;
    for (int r : raw) out.emplace_back(r, total);
    return out;
  }

  std::vector<Symbol> word(int n, int length) {
    std::vector<Symbol> w(static_cast<std::size_t>(length));
    for (auto& s : w) s = integer(1, n);
    return w;
  }

  Word point(int n) {
    return Word(word(n, integer(0, 3)), word(n, integer(1, 2)));
  }

  /// Normalized exact measure: random positive depth-k table with the
  /// given tail model.
  Measure<Rational> probability(int n, int depth, RefinementModel<Rational> model) {
    CylinderTable<Rational> table(n, depth);
    Rational total = 0;
    for (std::size_t idx = 0; idx < table.size(); ++idx) total += (table[idx] = integer(1, 9));
    for (std::size_t idx = 0; idx < table.size(); ++idx) table[idx] /= total;
    return Measure<Rational>(n, std::move(table), std::move(model));
  }

  Measure<double> frozen_measure(int n, int depth, bool with_atoms) {
    CylinderTable<double> table(n, depth);
    for (std::size_t idx = 0; idx < table.size(); ++idx) table[idx] = integer(0, 3) == 0 ? 0.0 : real(0.1, 1.0);
    std::vector<Atom<double>> atoms;
    if (with_atoms) {
      for (int k = integer(1, 3); k > 0; --k) atoms.push_back({point(n), real(0.1, 1.0)});
    }
    return Measure<double>(n, std::move(table), RefinementModel<double>::frozen(), std::move(atoms));
  }

  SquareDensity density_on(const Measure<double>& base) {
    std::vector<Complex> values(base.diffuse().size());
    for (auto& v : values) v = complex();
    std::vector<Complex> atom_values(base.atoms().size());
    for (auto& v : atom_values) v = complex();
    return SquareDensity(base, std::move(values), std::move(atom_values));
  }

  L2Vector l2_vector(const ProbabilityMeasure& base, int depth, bool dyadic = false) {
    std::vector<Complex> values(cylinder_count(base.n_branches(), depth));
    for (auto& v : values) v = dyadic ? dyadic_complex() : complex();
    std::vector<Complex> atom_values(base->atoms().size());
    for (auto& v : atom_values) v = dyadic ? dyadic_complex() : complex();
    return L2Vector(base, depth, std::move(values), std::move(atom_values));
  }

  RepVector rep_vector(std::int64_t lo, std::int64_t hi, bool dyadic = false) {
    std::map<std::int64_t, Complex> c;
    for (int k = integer(1, 8); k > 0; --k) {
      c[std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_)] += dyadic ? dyadic_complex() : complex();
    }
    return RepVector(std::move(c));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Every word of length k in lexicographic order.
inline std::vector<std::vector<Symbol>> all_words(int n, int k) {
  std::vector<std::vector<Symbol>> out{{}};
  for (int d = 0; d < k; ++d) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& w : out) {
      for (Symbol s = 1; s <= n; ++s) {
        auto v = w;
        v.push_back(s);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace oracle {

/// Product of weights along the word.
inline Rational product_mass(const std::vector<Rational>& p, const std::vector<Symbol>& w) {
  Rational m = 1;
  for (Symbol s : w) m *= p[static_cast<std::size_t>(s - 1)];
  return m;
}

/// Left endpoint of the dyadic cylinder: sum (w_j - 1) 2^-j.
inline Rational dyadic_left(const std::vector<Symbol>& w) {
  Rational x = 0, scale(1, 2);
  for (Symbol s : w) {
    x += (s - 1) * scale;
    scale /= 2;
  }
  return x;
}

/// Left endpoint of the Cantor cylinder: sum 2 (w_j - 1) 3^-j.
inline Rational cantor_left(const std::vector<Symbol>& w) {
  Rational x = 0, scale(1, 3);
  for (Symbol s : w) {
    x += 2 * (s - 1) * scale;
    scale /= 3;
  }
  return x;
}

/// For S_1 e_n = e_{2n}, S_2 e_n = e_{2n+1}: e_n lies in the range of
/// S_w iff n = sum (w_j - 1) 2^(j-1) mod 2^k.
inline bool torus_in_cylinder(std::int64_t n, const std::vector<Symbol>& w) {
  std::int64_t residue = 0;
  for (std::size_t j = 0; j < w.size(); ++j) residue += static_cast<std::int64_t>(w[j] - 1) << j;
  const std::int64_t modulus = std::int64_t{1} << w.size();
  return ((n - residue) % modulus + modulus) % modulus == 0;
}

/// Binary digits of n under the torus representation, lowest first,
/// as branch symbols for the first k places.
inline std::vector<Symbol> torus_digits(std::int64_t n, int k) {
  std::vector<Symbol> out;
  for (int j = 0; j < k; ++j) {
    const std::int64_t bit = ((n % 2) + 2) % 2;
    out.push_back(static_cast<Symbol>(bit + 1));
    n = (n - bit) / 2;
  }
  return out;
}

/// Direct Hellinger inner product for two densities over the same base:
/// sum conj(phi) psi mu.
inline Complex same_base_inner(const std::vector<Complex>& a, const std::vector<Complex>& b,
                               const std::vector<double>& masses) {
  Complex s = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) s += std::conj(a[k]) * b[k] * masses[k];
  return s;
}

}  // namespace oracle

}  // namespace testing_support
