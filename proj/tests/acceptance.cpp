// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"

using namespace ifs_cuntz;
using testing_support::Gen;

namespace {

constexpr double kTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

ProbabilityMeasure uniform_base() { return ProbabilityMeasure(Measure<Rational>::uniform(2)); }

/// Lebesgue measure for the dyadic system, the Cantor measure for the Cantor system.
ProbabilityMeasure natural_base(const std::string& system) {
  if (system == "dyadic") return uniform_base();
  const std::vector<Rational> half{Rational(1, 2), Rational(1, 2)};
  return ProbabilityMeasure(hutchinson_fixed_point(IfsSystem::cantor(), half, 0));
}

/// Full L2 relation residuals for one vector.
double max_relation_residual(const L2Vector& phi) {
  const int n = phi.n_branches();
  double worst = 0.0;
  L2Vector sum = L2Vector::constant(phi.base(), 0.0);
  for (Symbol j = 1; j <= n; ++j) {
    const L2Vector sj = apply_S_mu(j, phi);
    for (Symbol i = 1; i <= n; ++i) {
      const L2Vector v = apply_S_mu_star(i, sj);
      worst = std::max(worst, i == j ? l2_distance(v, phi) : l2_norm(v));
    }
    sum = l2_add(sum, apply_S_mu(j, apply_S_mu_star(j, phi)));
  }
  return std::max(worst, l2_distance(sum, phi));
}

Outcome criterion1() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  Gen g(101);
  double worst = 0.0;
  for (const char* system : {"dyadic", "cantor"}) {
    const ProbabilityMeasure mu = natural_base(system);
    for (int k = 0; k < 20; ++k) {
      const double r = max_relation_residual(g.l2_vector(mu, k % 7));
      worst = std::max(worst, r);
      out.require(r <= kTol, std::string(system) + " residual " + std::to_string(r));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(seconds < 5.0, "runtime " + std::to_string(seconds) + " s");
  if (out.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max residual %.3g, %.3f s", worst, seconds);
    out.detail = buf;
  }
  return out;
}

Outcome criterion2() {
  Outcome out;
  const double r2 = std::sqrt(2.0);
  // (a) operators on depth-3 indicators, Lebesgue and Cantor bases.
  const ProbabilityMeasure mu = uniform_base();
  for (const auto& w : testing_support::all_words(2, 3)) {
    const L2Vector chi = L2Vector::from_function(mu, 3, [&](std::span<const Symbol> v) {
      return std::equal(v.begin(), v.end(), w.begin()) ? Complex(1.0) : Complex(0.0);
    });
    for (Symbol i = 1; i <= 2; ++i) {
      std::vector<Symbol> iw{i};
      iw.insert(iw.end(), w.begin(), w.end());
      const L2Vector s = apply_S_mu(i, chi);
      for (const auto& v : testing_support::all_words(2, 4)) {
        out.require(s.value_at(v) == (v == iw ? Complex(r2) : Complex(0.0)), "S" + std::to_string(i) + " on " + digits(w));
      }
      const L2Vector t = apply_S_mu_star(i, chi);
      const std::vector<Symbol> tail(w.begin() + 1, w.end());
      for (const auto& v : testing_support::all_words(2, 2)) {
        out.require(t.value_at(v) == (w[0] == i && v == tail ? Complex(1.0 / r2) : Complex(0.0)),
                    "S" + std::to_string(i) + "* on " + digits(w));
      }
    }
  }
  // (b) Cantor measure: mu∘tau_i^{-1} = 2 mu restricted to tau_i(X).
  const IfsSystem cantor = IfsSystem::cantor();
  const auto cantor_measure = hutchinson_fixed_point(cantor, std::vector<Rational>{Rational(1, 2), Rational(1, 2)}, 0);
  for (Symbol i = 1; i <= 2; ++i) {
    const auto lhs = pushforward_branch(cantor, cantor_measure, i);
    const auto rhs = scaled(restricted(cantor_measure, std::vector<Symbol>{i}), Rational(2));
    for (int k = 0; k <= 10; ++k) {
      out.require(mass_table(lhs, k) == mass_table(rhs, k), "Cantor pushforward at depth " + std::to_string(k));
    }
  }
  // (c) torus representation: mu_{e0} = delta_0, mu_{e0}∘tau^{-1} = delta_{1/2}
  // for tau(x) = (x+1)/2.
  const IfsSystem dyadic = IfsSystem::dyadic();
  const PermutativeRep torus = PermutativeRep::torus();
  const auto delta0 = Measure<double>::dirac(2, point_word(dyadic, Rational(0)));
  const auto delta_half = Measure<double>::dirac(2, point_word(dyadic, Rational(1, 2)));
  for (int k = 0; k <= 10; ++k) {
    const auto mu_e0 = vector_measure(torus, RepVector::basis(0), k);
    out.require(mu_e0.diffuse() == mass_table(delta0, k), "mu_e0 at depth " + std::to_string(k));
    out.require(pushforward_branch(mu_e0, 1).diffuse() == mass_table(delta0, k + 1), "mu_e0 pushed by x/2");
    out.require(pushforward_branch(mu_e0, 2).diffuse() == mass_table(delta_half, k + 1), "mu_e0 pushed by (x+1)/2");
  }
  const auto atoms = spectral_atoms(torus, RepVector::basis(0));
  out.require(address_point(dyadic, atoms.atoms().at(0).point) == 0, "atom of e0 at 0");
  out.require(address_point(dyadic, pushforward_branch(atoms, 2).atoms().at(0).point) == Rational(1, 2),
              "pushed atom at 1/2");
  if (out.pass) out.detail = "indicator actions, Cantor masses to depth 10, torus atoms to depth 10";
  return out;
}

Outcome criterion3() {
  Outcome out;
  const std::vector<std::vector<Rational>> weight_sets{
      {Rational(1, 2), Rational(1, 2)}, {Rational(1, 3), Rational(2, 3)}, {Rational(1, 4), Rational(1, 4), Rational(1, 2)}};
  std::string summary;
  for (const auto& p : weight_sets) {
    const int n = static_cast<int>(p.size());
    std::vector<AffineMap> maps;
    for (int k = 0; k < n; ++k) maps.push_back({Rational(1, n), Rational(k, n)});
    const IfsSystem ifs = IfsSystem::affine(maps);
    const int depth = n == 2 ? 8 : 6;
    const auto trace = hutchinson_iterate(ifs, p, depth, Measure<Rational>::uniform(n), 50);
    int reached = -1;
    for (std::size_t k = 0; k < trace.l1_distance.size(); ++k) {
      if (reached < 0 && to_double(trace.l1_distance[k]) <= kTol) reached = static_cast<int>(k);
    }
    out.require(reached >= 0 && reached <= 50, "iteration did not converge for n=" + std::to_string(n));
    summary += "n=" + std::to_string(n) + ":" + std::to_string(reached) + " its ";

    const std::int64_t samples = 100000;
    const auto empirical = chaos_game(ifs, p, samples, 20240601, 3);
    const auto exact = hutchinson_fixed_point(ifs, p, 3);
    for (std::size_t idx = 0; idx < exact.diffuse().size(); ++idx) {
      const double q = to_double(exact.diffuse()[idx]);
      const double bound = 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
      const double dev = std::abs(to_double(empirical.diffuse()[idx]) - q);
      out.require(dev <= bound, "chaos cell " + digits(exact.diffuse().symbols_at(idx)) + " deviates " + std::to_string(dev));
    }
  }
  if (out.pass) out.detail = summary + "; chaos game within 3 sigma on all depth-3 cells";
  return out;
}

Outcome criterion4() {
  Outcome out;
  Gen g(104);
  std::vector<ProbabilityMeasure> bases{uniform_base(),
                                        ProbabilityMeasure(Measure<Rational>::bernoulli(g.weights(2), 0)),
                                        ProbabilityMeasure(Measure<Rational>::bernoulli(g.weights(3), 0))};
  double worst = 0.0;
  for (const auto& mu : bases) {
    std::vector<Symbol> all;
    for (Symbol i = 1; i <= mu.n_branches(); ++i) all.push_back(i);
    for (int k = 0; k < 20; ++k) {
      const double d = std::abs(completeness_defect(all, g.l2_vector(mu, k % 7)));
      worst = std::max(worst, d);
      out.require(d <= kTol, "full-cover defect " + std::to_string(d));
    }
  }
  const ProbabilityMeasure leb = uniform_base();
  const Rational outside = uncovered_mass(leb, {1});
  const double defect = completeness_defect({1}, L2Vector::constant(leb));
  out.require(outside == Rational(1, 2), "outside mass " + to_string(outside));
  out.require(Rational(defect) == outside, "defect " + std::to_string(defect) + " differs from outside mass");
  if (out.pass) out.detail = "full-cover max defect " + std::to_string(worst) + "; deleted-branch defect = " + to_string(Rational(defect));
  return out;
}

Outcome criterion5() {
  Outcome out;
  Gen g(105);
  double worst = 0.0;
  for (const char* system : {"dyadic", "cantor"}) {
    const ProbabilityMeasure mu = natural_base(system);
    for (int k = 0; k < 10; ++k) {
      const L2Vector phi = g.l2_vector(mu, k % 7);
      for (Symbol i = 1; i <= 2; ++i) {
        const double r = check_intertwining(i, phi);
        worst = std::max(worst, r);
        out.require(r <= kTol, std::string(system) + " intertwining residual " + std::to_string(r));
      }
    }
  }
  const PermutativeRep torus = PermutativeRep::torus();
  const IfsSystem dyadic = IfsSystem::dyadic();
  for (int k = 0; k < 10; ++k) {
    const RepVector f = g.rep_vector(-32, 32);
    const SquareDensity wf = intertwiner_W(torus, dyadic, f);
    out.require(std::abs(norm(wf) - rep_norm(f)) <= kTol, "W is not isometric");
    for (Symbol i = 1; i <= 2; ++i) {
      const double r = distance(intertwiner_W(torus, apply_gen(torus, i, f)), apply_S(dyadic, i, wf));
      const double s = distance(intertwiner_W(torus, apply_gen_star(torus, i, f)), apply_S_star(dyadic, i, wf));
      worst = std::max({worst, r, s});
      out.require(r <= kTol && s <= kTol, "torus W residual " + std::to_string(std::max(r, s)));
      // The cylinder-resolved W at depths <= 6 intertwines as well.
      const int d = k % 7;
      const double c = distance(intertwiner_W(torus, apply_gen(torus, i, f), d + 1), apply_S(dyadic, i, intertwiner_W(torus, f, d)));
      worst = std::max(worst, c);
      out.require(c <= kTol, "cylinder W residual " + std::to_string(c));
    }
  }
  if (out.pass) out.detail = "max residual " + std::to_string(worst);
  return out;
}

Outcome criterion6() {
  Outcome out;
  Gen g(106);
  const PermutativeRep torus = PermutativeRep::torus();
  const IfsSystem dyadic = IfsSystem::dyadic();
  auto same = [](const RepVector& a, const RepVector& b) { return a.coefficients() == b.coefficients(); };
  double covariance = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const RepVector f = g.rep_vector(-32, 32, true);
    const RepVector h = g.rep_vector(-32, 32, true);
    for (int k = 0; k <= 6; ++k) {
      RepVector total;
      const auto words = testing_support::all_words(2, k);
      for (const auto& w : words) {
        const RepVector pf = cylinder_projection(torus, w, f);
        total = total + pf;
        // (2) P = P* = P^2
        out.require(same(cylinder_projection(torus, w, pf), pf), "P(w)^2 != P(w) at " + digits(w));
        out.require(rep_inner(h, pf) == rep_inner(cylinder_projection(torus, w, h), f), "P(w) not self-adjoint");
        // refinement into children
        RepVector children;
        for (Symbol j = 1; j <= 2; ++j) {
          auto wj = w;
          wj.push_back(j);
          children = children + cylinder_projection(torus, wj, f);
        }
        out.require(same(children, pf), "children do not sum to P(" + digits(w) + ")");
        // (5) sum_i S_i P(tau_i^{-1} E) S_i^* = P(E)
        RepVector rec;
        for (Symbol i = 1; i <= 2; ++i) {
          if (!w.empty() && w[0] != i) continue;
          const std::vector<Symbol> pre(w.empty() ? w.begin() : w.begin() + 1, w.end());
          rec = rec + apply_gen(torus, i, cylinder_projection(torus, pre, apply_gen_star(torus, i, f)));
        }
        out.require(same(rec, pf), "covariance of P fails at " + digits(w));
        // Cauchy-Schwarz for the sesquilinear measure
        const Complex fg = rep_inner(f, cylinder_projection(torus, w, h));
        out.require(std::norm(fg) <= rep_norm_squared(pf) * rep_norm_squared(cylinder_projection(torus, w, h)),
                    "|mu_fg|^2 > mu_f mu_g");
        // (4) disjoint cylinders are orthogonal
        for (const auto& v : words) {
          if (v != w) out.require(cylinder_projection(torus, v, pf).is_zero(), "P(v)P(w) != 0 for disjoint cylinders");
        }
      }
      // (1) P(X) = I, and the level-k projections sum to I
      out.require(same(total, f), "level " + std::to_string(k) + " projections do not sum to I");
      const auto mu = vector_measure(torus, f, k);
      out.require(total_mass(mu) == rep_norm_squared(f), "mu_f(X) != ||f||^2");
      const auto c = check_covariance(torus, dyadic, f, k);
      covariance = std::max(covariance, c.max());
      out.require(c.max() <= kTol, "covariance residual " + std::to_string(c.max()));
    }
    // (3) additivity over a disjoint union
    const std::vector<Word> parts{Word({1, 1}), Word({1, 2, 1}), Word({2})};
    RepVector sum;
    for (const auto& w : parts) sum = sum + cylinder_projection(torus, w, f);
    out.require(same(union_projection(torus, parts, f), sum), "union projection is not additive");
  }
  if (out.pass) out.detail = "exact on cylinders of length <= 6; covariance residual " + std::to_string(covariance);
  return out;
}

Outcome criterion7() {
  Outcome out;
  std::size_t checked = 0;
  for (const auto& [ifs, c] : {std::pair{IfsSystem::dyadic(), Rational(1, 2)}, std::pair{IfsSystem::cantor(), Rational(1, 3)}}) {
    const Rational diam = ifs.hull().length();
    Rational ck = 1;
    for (int k = 0; k <= 20; ++k) {
      const Rational expected = ck * diam;
      const std::size_t count = std::size_t{1} << k;
      std::vector<Symbol> w(static_cast<std::size_t>(k), 1);
      for (std::size_t idx = 0; idx < count; ++idx) {
        for (int j = 0; j < k; ++j) w[static_cast<std::size_t>(k - 1 - j)] = static_cast<Symbol>(((idx >> j) & 1) + 1);
        if (composed_image_diameter(ifs, Word(w)) != expected) {
          out.require(false, "diameter mismatch at " + digits(w));
          break;
        }
        ++checked;
      }
      ck *= c;
    }
  }
  if (out.pass) out.detail = std::to_string(checked) + " words";
  return out;
}

Outcome criterion8() {
  Outcome out;
  Gen g(108);
  const std::vector<IfsSystem> systems{IfsSystem::dyadic(), IfsSystem::cantor(), IfsSystem::symbolic(3)};
  for (int trial = 0; trial < 10; ++trial) {
    const IfsSystem& ifs = systems[static_cast<std::size_t>(trial) % systems.size()];
    const int n = ifs.n_branches();
    const Measure<double> base = g.frozen_measure(n, g.integer(1, 4), true);
    const SquareDensity a = g.density_on(base);
    CylinderTable<double> t = base.diffuse();
    std::vector<Complex> values = a.values();
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      const double h = g.real(0.25, 4.0);
      t[idx] *= h;
      values[idx] /= std::sqrt(h);
    }
    std::vector<Atom<double>> atoms = base.atoms();
    std::vector<Complex> atom_values = a.atom_values();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double h = g.real(0.25, 4.0);
      atoms[j].mass *= h;
      atom_values[j] /= std::sqrt(h);
    }
    const SquareDensity b(Measure<double>(n, t, RefinementModel<double>::frozen(), atoms), values, atom_values);
    out.require(equivalent(a, b, kTol), "representatives are not equivalent");
    for (Symbol i = 1; i <= n; ++i) {
      out.require(equivalent(apply_S(ifs, i, a), apply_S(ifs, i, b), kTol), "S_" + std::to_string(i) + " breaks equivalence");
      out.require(equivalent(apply_S_star(ifs, i, a), apply_S_star(ifs, i, b), kTol),
                  "S_" + std::to_string(i) + "* breaks equivalence");
    }
  }
  if (out.pass) out.detail = "10 pairs over dyadic, Cantor and 3-letter systems";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Cuntz relations, dyadic and Cantor L2(mu)", criterion1},
      {"worked example values", criterion2},
      {"Hutchinson fixed point and chaos game", criterion3},
      {"completeness iff full cover", criterion4},
      {"intertwining residuals", criterion5},
      {"projection-valued measure laws", criterion6},
      {"diameter decay", criterion7},
      {"equivalence-class soundness", criterion8},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
