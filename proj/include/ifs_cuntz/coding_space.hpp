#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ifs_cuntz/errors.hpp"
#include "ifs_cuntz/rational.hpp"
#include "ifs_cuntz/word.hpp"

namespace ifs_cuntz {

class Alphabet {
 public:
  explicit Alphabet(int n_branches) : n_(n_branches) {
    if (n_ < 2) throw DomainError("alphabet needs at least 2 branches, got " + std::to_string(n_));
  }

  int size() const noexcept { return n_; }
  bool contains(Symbol s) const noexcept { return s >= 1 && s <= n_; }

  void validate(const Word& w) const {
    auto check = [&](Symbol s) {
      if (!contains(s)) {
        throw DomainError("symbol " + std::to_string(s) + " outside alphabet {1.." + std::to_string(n_) + "}");
      }
    };
    for (Symbol s : w.prefix()) check(s);
    for (Symbol s : w.period()) check(s);
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int n_;
};

/// x -> slope * x + offset, exact.
struct AffineMap {
  Rational slope;
  Rational offset;

  Rational operator()(const Rational& x) const { return slope * x + offset; }
  Rational inverse(const Rational& y) const { return (y - offset) / slope; }

  /// this ∘ inner
  AffineMap compose(const AffineMap& inner) const { return {slope * inner.slope, slope * inner.offset + offset}; }

  Rational fixed_point() const { return offset / (1 - slope); }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Closed interval [lo, hi] with exact endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval image(const AffineMap& f, const Interval& in) {
  Rational a = f(in.lo);
  Rational b = f(in.hi);
  if (b < a) std::swap(a, b);
  return {a, b};
}

enum class Geometry { Symbolic, AffineInterval, CantorMiddleThird };

/// Finite-alphabet IFS. The coding is always symbolic; the two metric
/// geometries add exact affine branch maps on the line.
class IfsSystem {
 public:
  static IfsSystem symbolic(int n_branches) { return IfsSystem(Alphabet(n_branches), Geometry::Symbolic, {}); }

  /// Branch maps must be contractions of [0,1] into itself with
  /// non-overlapping images.
  static IfsSystem affine(std::vector<AffineMap> maps) {
    const int n = static_cast<int>(maps.size());
    return IfsSystem(Alphabet(n), Geometry::AffineInterval, std::move(maps));
  }

  /// tau_1(x) = x/2, tau_2(x) = (x+1)/2 on [0,1].
  static IfsSystem dyadic() { return affine({{Rational(1, 2), 0}, {Rational(1, 2), Rational(1, 2)}}); }

  /// tau_1(x) = x/3, tau_2(x) = (x+2)/3; the attractor is the middle-third Cantor set.
  static IfsSystem cantor() {
    return IfsSystem(Alphabet(2), Geometry::CantorMiddleThird, {{Rational(1, 3), 0}, {Rational(1, 3), Rational(2, 3)}});
  }

  /// Same maps, only `branches` present.
  IfsSystem with_branches(const std::vector<Symbol>& branches) const {
    IfsSystem out = *this;
    std::fill(out.present_.begin(), out.present_.end(), false);
    for (Symbol s : branches) {
      if (!alphabet_.contains(s)) throw DomainError("branch " + std::to_string(s) + " outside alphabet");
      out.present_[s - 1] = true;
    }
    if (branches.empty()) throw DomainError("at least one branch must be present");
    return out;
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int n_branches() const noexcept { return alphabet_.size(); }
  Geometry geometry() const noexcept { return geometry_; }
  bool is_metric() const noexcept { return geometry_ != Geometry::Symbolic; }

  bool is_present(Symbol s) const noexcept { return alphabet_.contains(s) && present_[s - 1]; }

  std::vector<Symbol> present_branches() const {
    std::vector<Symbol> out;
    for (Symbol s = 1; s <= n_branches(); ++s) {
      if (present_[s - 1]) out.push_back(s);
    }
    return out;
  }

  /// The branch images cover X.
  bool full_cover() const noexcept {
    return std::all_of(present_.begin(), present_.end(), [](bool b) { return b; });
  }

  void require_present(Symbol s) const {
    if (!alphabet_.contains(s)) {
      throw DomainError("branch " + std::to_string(s) + " out of range {1.." + std::to_string(n_branches()) + "}");
    }
    if (!present_[s - 1]) throw DomainError("branch " + std::to_string(s) + " is not present in this system");
  }

  const AffineMap& map(Symbol s) const {
    require_metric();
    if (!alphabet_.contains(s)) throw DomainError("branch " + std::to_string(s) + " out of range");
    return maps_[s - 1];
  }

  const std::vector<AffineMap>& maps() const {
    require_metric();
    return maps_;
  }

  /// Convex hull of the attractor X.
  const Interval& hull() const {
    require_metric();
    return hull_;
  }

  /// max_i |slope_i|
  Rational contraction_ratio() const {
    require_metric();
    Rational c = 0;
    for (const auto& m : maps_) c = std::max(c, Rational(abs(m.slope)));
    return c;
  }

  void require_metric() const {
    if (!is_metric()) throw UnsupportedGeometry("symbolic-only system has no metric geometry");
  }

 private:
  IfsSystem(Alphabet alphabet, Geometry geometry, std::vector<AffineMap> maps)
      : alphabet_(alphabet),
        geometry_(geometry),
        maps_(std::move(maps)),
        present_(static_cast<std::size_t>(alphabet.size()), true) {
    if (geometry_ != Geometry::Symbolic) {
      validate_maps();
      hull_ = attractor_hull();
    }
  }

  void validate_maps() const {
    const Interval unit{0, 1};
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      const auto& m = maps_[i];
      if (m.slope == 0 || abs(m.slope) >= 1) {
        throw DomainError("branch " + std::to_string(i + 1) + " is not a proper contraction (need 0 < |a| < 1)");
      }
      const Interval img = image(m, unit);
      if (img.lo < 0 || img.hi > 1) throw DomainError("branch " + std::to_string(i + 1) + " maps outside [0,1]");
    }
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      for (std::size_t j = i + 1; j < maps_.size(); ++j) {
        const Interval a = image(maps_[i], unit);
        const Interval b = image(maps_[j], unit);
        if (std::min(a.hi, b.hi) > std::max(a.lo, b.lo)) {
          throw DomainError("branch images " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
        }
      }
    }
  }

  // The hull [L, R] is the unique interval with L = min_k min(tau_k L, tau_k R)
  // and R = max_k max(tau_k L, tau_k R). Each endpoint is attained by some
  // branch acting on some endpoint, so enumerate those linear systems.
  Interval attractor_hull() const {
    auto satisfies = [&](const Rational& lo, const Rational& hi) {
      if (hi < lo) return false;
      Rational mn = maps_[0](lo);
      Rational mx = mn;
      for (const auto& m : maps_) {
        for (const Rational* x : {&lo, &hi}) {
          const Rational y = m(*x);
          mn = std::min(mn, y);
          mx = std::max(mx, y);
        }
      }
      return mn == lo && mx == hi;
    };
    for (const auto& ml : maps_) {
      for (const auto& mr : maps_) {
        Rational lo;
        Rational hi;
        if (ml.slope > 0 && mr.slope > 0) {
          lo = ml.fixed_point();
          hi = mr.fixed_point();
        } else if (ml.slope > 0) {
          lo = ml.fixed_point();
          hi = mr(lo);
        } else if (mr.slope > 0) {
          hi = mr.fixed_point();
          lo = ml(hi);
        } else {
          lo = (ml.slope * mr.offset + ml.offset) / (1 - ml.slope * mr.slope);
          hi = mr(lo);
        }
        if (satisfies(lo, hi)) return {lo, hi};
      }
    }
    throw DomainError("could not determine the attractor hull");  // unreachable for contractions
  }

  Alphabet alphabet_;
  Geometry geometry_;
  std::vector<AffineMap> maps_;
  std::vector<bool> present_;
  Interval hull_{0, 1};
};

/// i·w. Geometrically address(i·w) = tau_i(address(w)).
inline Word apply_branch(const IfsSystem& ifs, Symbol i, const Word& w) {
  ifs.require_present(i);
  ifs.alphabet().validate(w);
  return w.prepend(i);
}

/// Left shift; the left inverse of every branch.
inline Word apply_sigma(const IfsSystem& ifs, const Word& w) {
  ifs.alphabet().validate(w);
  if (w.empty()) throw DomainError("sigma of the empty word is undefined");
  return w.drop_first();
}

inline Rational branch_point(const IfsSystem& ifs, Symbol i, const Rational& x) {
  ifs.require_present(i);
  return ifs.map(i)(x);
}

/// Branch whose image contains x; at a shared endpoint the branch for which x
/// is the left end wins (so on the dyadic system sigma(x) = 2x mod 1).
inline Symbol containing_branch(const IfsSystem& ifs, const Rational& x) {
  std::optional<Symbol> found;
  for (Symbol s = 1; s <= ifs.n_branches(); ++s) {
    const Interval img = image(ifs.map(s), ifs.hull());
    if (!img.contains(x)) continue;
    if (!found || x < img.hi) found = s;
    if (x < img.hi) break;
  }
  if (!found) throw DomainError("point " + to_string(x) + " lies in no branch image");
  return *found;
}

inline Rational sigma_point(const IfsSystem& ifs, const Rational& x) {
  return ifs.map(containing_branch(ifs, x)).inverse(x);
}

/// tau_{w_1} ∘ ... ∘ tau_{w_k}
inline AffineMap composed_map(const IfsSystem& ifs, std::span<const Symbol> w) {
  AffineMap out{1, 0};
  for (Symbol s : w) out = out.compose(ifs.map(s));
  return out;
}

/// diam(tau_{w_1} ∘ ... ∘ tau_{w_k}(X)) = prod |a_{w_j}| * diam X.
inline Rational composed_image_diameter(const IfsSystem& ifs, const Word& w) {
  ifs.require_metric();
  if (!w.is_finite()) throw DomainError("diameter is defined for finite words");
  ifs.alphabet().validate(w);
  Rational d = ifs.hull().length();
  for (Symbol s : w.prefix()) d *= abs(ifs.map(s).slope);
  return d;
}

/// Geometric cylinder tau_w(X) hull.
inline Interval address_interval(const IfsSystem& ifs, const Word& w) {
  ifs.require_metric();
  if (!w.is_finite()) throw DomainError("address_interval needs a finite word");
  ifs.alphabet().validate(w);
  return image(composed_map(ifs, w.prefix()), ifs.hull());
}

/// Exact point coded by an eventually periodic word.
inline Rational address_point(const IfsSystem& ifs, const Word& w) {
  ifs.require_metric();
  if (!w.is_point()) throw DomainError("address_point needs an eventually periodic word");
  ifs.alphabet().validate(w);
  const Rational cycle_fixed = composed_map(ifs, w.period()).fixed_point();
  return composed_map(ifs, w.prefix())(cycle_fixed);
}

using Address = std::variant<Rational, Interval>;

inline Address address(const IfsSystem& ifs, const Word& w) {
  if (w.is_point()) return address_point(ifs, w);
  return address_interval(ifs, w);
}

/// Canonical coding of a rational point of X by iterating sigma exactly.
/// Throws if x is not in the attractor or its orbit is not eventually
/// periodic within `max_steps`.
inline Word point_word(const IfsSystem& ifs, Rational x, std::size_t max_steps = 4096) {
  std::map<Rational, std::size_t> seen;
  std::vector<Symbol> symbols;
  for (std::size_t step = 0; step < max_steps; ++step) {
    auto [it, inserted] = seen.emplace(x, step);
    if (!inserted) {
      const auto start = static_cast<std::ptrdiff_t>(it->second);
      return Word(std::vector<Symbol>(symbols.begin(), symbols.begin() + start),
                  std::vector<Symbol>(symbols.begin() + start, symbols.end()));
    }
    const Symbol s = containing_branch(ifs, x);
    symbols.push_back(s);
    x = ifs.map(s).inverse(x);
  }
  throw DomainError("orbit is not eventually periodic within the step limit");
}

/// Representative of w's geometric point that point_word would produce.
inline Word canonical_point(const IfsSystem& ifs, const Word& w) { return point_word(ifs, address_point(ifs, w)); }

}  // namespace ifs_cuntz
