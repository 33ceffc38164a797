#pragma once

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ifs_cuntz/serialization.hpp"

namespace ifs_cuntz::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kInputError = 2;

struct SystemSpec {
  std::string name;
  IfsSystem ifs;
  /// Weights of the default base measure (uniform when empty).
  std::vector<Rational> weights;
};

inline std::vector<Rational> parse_weights(std::string text) {
  // Accept the typographic minus sign as well.
  for (std::size_t pos; (pos = text.find("\xE2\x88\x92")) != std::string::npos;) text.replace(pos, 3, "-");
  std::vector<Rational> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw ParseError("empty weight list");
  return out;
}

inline std::vector<Symbol> parse_branches(const std::string& text) {
  std::vector<Symbol> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("invalid branch number '" + item + "'");
    }
  }
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// N-adic maps x -> (x + k)/N.
inline IfsSystem n_adic(int n) {
  std::vector<AffineMap> maps;
  for (int k = 0; k < n; ++k) maps.push_back({Rational(1, n), Rational(k, n)});
  return IfsSystem::affine(std::move(maps));
}

/// dyadic | cantor | bernoulli:<p-list> | path to a system config.
inline SystemSpec resolve_system(const std::string& spec) {
  if (spec == "dyadic") return {spec, IfsSystem::dyadic(), {}};
  if (spec == "cantor") return {spec, IfsSystem::cantor(), {}};
  if (spec.rfind("bernoulli:", 0) == 0) {
    auto w = parse_weights(spec.substr(10));
    if (w.size() < 2) throw ParseError("a Bernoulli system needs at least two weights");
    IfsSystem ifs = n_adic(static_cast<int>(w.size()));
    validate_weights(ifs, w);
    return {spec, std::move(ifs), std::move(w)};
  }
  if (spec == "torus") throw ParseError("'torus' names a representation; use --rep torus");
  const Json j = read_json_file(spec);
  SystemSpec out{spec, ifs_from_json(j), {}};
  if (j.contains("weights")) {
    for (const auto& x : j.at("weights")) out.weights.push_back(detail::config_rational(x));
  }
  return out;
}

/// torus | path to a representation config.
inline PermutativeRep resolve_rep(const std::string& spec) {
  if (spec == "torus") return PermutativeRep::torus();
  return rep_from_json(read_json_file(spec));
}

/// The coding-space system matching a representation's alphabet.
inline IfsSystem system_for_rep(const PermutativeRep& rep) {
  return rep.n_branches() == 2 ? IfsSystem::dyadic() : IfsSystem::symbolic(rep.n_branches());
}

inline ProbabilityMeasure base_measure(const SystemSpec& s, const std::vector<Rational>& override_weights) {
  const auto& w = override_weights.empty() ? s.weights : override_weights;
  if (w.empty()) return ProbabilityMeasure(Measure<Rational>::uniform(s.ifs.n_branches()));
  validate_weights(s.ifs, w);
  return ProbabilityMeasure(Measure<Rational>::bernoulli(w, 0));
}

inline std::vector<L2Vector> random_l2_vectors(const ProbabilityMeasure& base, int depth, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<L2Vector> out{L2Vector::constant(base)};
  for (int k = 1; k < count; ++k) {
    std::vector<Complex> values(cylinder_count(base.n_branches(), depth));
    for (auto& v : values) v = {u(rng), u(rng)};
    out.emplace_back(base, depth, std::move(values), std::vector<Complex>(base->atoms().size(), 0.0));
  }
  return out;
}

inline std::vector<RepVector> random_rep_vectors(int count, std::int64_t radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::int64_t> index(-radius, radius);
  std::uniform_int_distribution<int> support(1, 6);
  std::vector<RepVector> out{RepVector::basis(0), RepVector::basis(1)};
  while (static_cast<int>(out.size()) < count) {
    std::map<std::int64_t, Complex> c;
    for (int k = support(rng); k > 0; --k) c[index(rng)] += Complex(u(rng), u(rng));
    out.emplace_back(std::move(c));
  }
  out.resize(static_cast<std::size_t>(std::max(count, 0)));
  return out;
}

/// S/S* word such as "S1*,S2" or "S2 S1*", applied rightmost first.
struct Op {
  Symbol branch;
  bool adjoint;
};

inline std::vector<Op> parse_ops(const std::string& text) {
  std::vector<Op> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token.size() < 2 || (token[0] != 'S' && token[0] != 's')) throw ParseError("invalid operator '" + token + "'");
    Op op{0, token.back() == '*'};
    const std::string digits_part = token.substr(1, token.size() - 1 - (op.adjoint ? 1 : 0));
    try {
      std::size_t used = 0;
      op.branch = std::stoi(digits_part, &used);
      if (used != digits_part.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("invalid operator '" + token + "'");
    }
    out.push_back(op);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

struct Options {
  std::string system = "dyadic";
  std::string rep;
  std::string weights;
  std::string branches;
  int depth = 3;
  double tol = 1e-12;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
  int iterate = -1;
  int vectors = 20;
  bool covariance = false;
  std::string vector_file;
  std::string coeffs;
  std::string ops;
};

namespace detail {

inline std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("ifs_cuntz", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("IFS_CUNTZ_LOG")) log->set_level(spdlog::level::from_str(env));
  return log;
}

inline Json error_json(const std::string& message, int code) {
  return {{"schema", kSchema}, {"kind", "error"}, {"error", message}, {"exit_code", code}};
}

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw ParseError("cannot write '" + o.out + "'");
  file << text;
}

inline void emit_json(const Options& o, std::ostream& out, const Json& j) { emit(o, out, j.dump(2) + "\n"); }

inline std::string residual_csv(const std::vector<RelationResidual>& rows) {
  std::ostringstream s;
  s.precision(17);
  s << "vector_id,relation,residual\n";
  for (const auto& r : rows) s << r.vector_id << ',' << r.relation << ',' << r.residual << '\n';
  return s.str();
}

inline const RelationResidual* worst_row(const std::vector<RelationResidual>& rows) {
  const RelationResidual* w = nullptr;
  for (const auto& r : rows) {
    if (!w || r.residual > w->residual) w = &r;
  }
  return w;
}

inline Json atom_rows(const Measure<double>& m, const std::optional<IfsSystem>& ifs) {
  Json rows = Json::array();
  for (const auto& a : m.atoms()) {
    Json row = {{"word", to_string(a.point)}, {"mass", a.mass}};
    if (ifs && ifs->is_metric()) row["point"] = to_string(address_point(*ifs, a.point));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline int cmd_hutchinson(const Options& o, std::ostream& out, spdlog::logger& log) {
  const SystemSpec s = resolve_system(o.system);
  auto w = o.weights.empty() ? s.weights : parse_weights(o.weights);
  if (w.empty()) w.assign(static_cast<std::size_t>(s.ifs.n_branches()), Rational(1, s.ifs.n_branches()));
  const Measure<Rational> fixed = hutchinson_fixed_point(s.ifs, w, o.depth);
  log.info("fixed point of {} at depth {}", s.name, o.depth);
  std::optional<HutchinsonTrace<Rational>> trace;
  if (o.iterate >= 0) trace = hutchinson_iterate(s.ifs, w, o.depth, Measure<Rational>::uniform(s.ifs.n_branches()), o.iterate);
  if (o.format == "csv") {
    std::ostringstream text;
    write_mass_csv(text, fixed, o.depth);
    if (trace) {
      text << "\niteration,l1_distance,exact\n";
      for (std::size_t k = 0; k < trace->l1_distance.size(); ++k) {
        text << k << ',' << to_double(trace->l1_distance[k]) << ',' << to_string(trace->l1_distance[k]) << '\n';
      }
    }
    detail::emit(o, out, text.str());
    return kOk;
  }
  Json j = to_json(fixed);
  if (trace) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < trace->l1_distance.size(); ++k) {
      rows.push_back({{"iteration", k}, {"l1_distance", to_double(trace->l1_distance[k])},
                      {"exact", to_string(trace->l1_distance[k])}});
    }
    j["trace"] = std::move(rows);
  }
  detail::emit_json(o, out, j);
  return kOk;
}

inline int verify_system(const Options& o, std::ostream& out, spdlog::logger& log) {
  SystemSpec s = resolve_system(o.system);
  if (!o.branches.empty()) s.ifs = s.ifs.with_branches(parse_branches(o.branches));
  const ProbabilityMeasure base = base_measure(s, o.weights.empty() ? std::vector<Rational>{} : parse_weights(o.weights));
  const auto vectors = random_l2_vectors(base, o.depth, o.vectors, o.seed);
  const auto branches = s.ifs.present_branches();

  std::vector<RelationResidual> rows;
  std::vector<SquareDensity> embedded;
  for (std::size_t id = 0; id < vectors.size(); ++id) {
    const L2Vector& phi = vectors[id];
    for (Symbol j : branches) {
      const L2Vector sj = apply_S_mu(j, phi);
      for (Symbol i : branches) {
        const L2Vector v = apply_S_mu_star(i, sj);
        rows.push_back({id, "L2 S" + std::to_string(i) + "*S" + std::to_string(j), i == j ? l2_distance(v, phi) : l2_norm(v)});
      }
      rows.push_back({id, "W S" + std::to_string(j), check_intertwining(j, phi)});
    }
    if (s.ifs.full_cover()) {
      L2Vector sum = L2Vector::constant(base, 0.0);
      for (Symbol i : branches) sum = l2_add(sum, apply_S_mu(i, apply_S_mu_star(i, phi)));
      rows.push_back({id, "L2 sum SiSi*", l2_distance(sum, phi)});
    } else {
      rows.push_back({id, "L2 completeness_defect", std::abs(completeness_defect(branches, phi))});
    }
    embedded.push_back(embed_W_mu(phi));
  }
  const CuntzReport h = verify_cuntz_on(s.ifs, embedded, o.tol);
  for (const auto& r : h.rows) rows.push_back({r.vector_id, "H " + r.relation, r.residual});

  const RelationResidual* worst = detail::worst_row(rows);
  const bool ok = !worst || worst->residual <= o.tol;
  if (!ok) log.error("residual {} exceeds tolerance {} ({} on vector {})", worst->residual, o.tol, worst->relation, worst->vector_id);
  if (o.format == "csv") {
    detail::emit(o, out, detail::residual_csv(rows));
  } else {
    Json j = {{"schema", kSchema}, {"kind", "verify_report"}, {"system", s.name}, {"depth", o.depth},
              {"tolerance", o.tol}, {"ok", ok}, {"max_residual", worst ? worst->residual : 0.0}};
    if (worst) j["worst"] = {{"vector_id", worst->vector_id}, {"relation", worst->relation}, {"residual", worst->residual}};
    if (!s.ifs.full_cover()) {
      j["uncovered_mass"] = to_string(uncovered_mass(base, branches));
      j["completeness_defect_of_one"] = completeness_defect(branches, L2Vector::constant(base));
    }
    j["rows"] = residual_rows_json(rows);
    detail::emit_json(o, out, j);
  }
  return ok ? kOk : kVerificationFailed;
}

inline int verify_rep(const Options& o, std::ostream& out, spdlog::logger& log) {
  const PermutativeRep rep = resolve_rep(o.rep);
  const IfsSystem ifs = system_for_rep(rep);
  const auto vectors = random_rep_vectors(o.vectors, 32, o.seed);
  std::vector<RelationResidual> rows = verify_relations(rep, vectors, o.tol).rows;
  for (std::size_t id = 0; id < vectors.size(); ++id) {
    const RepVector& f = vectors[id];
    const SquareDensity wf = intertwiner_W(rep, ifs, f);
    for (Symbol i = 1; i <= rep.n_branches(); ++i) {
      rows.push_back({id, "W S" + std::to_string(i), distance(intertwiner_W(rep, apply_gen(rep, i, f)), apply_S(ifs, i, wf))});
      rows.push_back({id, "W S" + std::to_string(i) + "*",
                      distance(intertwiner_W(rep, apply_gen_star(rep, i, f)), apply_S_star(ifs, i, wf))});
    }
    if (o.covariance) {
      const CovarianceResidual c = check_covariance(rep, ifs, f, o.depth);
      rows.push_back({id, "covariance recursive", c.recursive});
      rows.push_back({id, "covariance substituted", c.substituted});
    }
  }
  const RelationResidual* worst = detail::worst_row(rows);
  const bool ok = !worst || worst->residual <= o.tol;
  if (!ok) log.error("residual {} exceeds tolerance {} ({} on vector {})", worst->residual, o.tol, worst->relation, worst->vector_id);
  if (o.format == "csv") {
    detail::emit(o, out, detail::residual_csv(rows));
  } else {
    Json j = {{"schema", kSchema}, {"kind", "verify_report"}, {"rep", o.rep}, {"depth", o.depth},
              {"tolerance", o.tol}, {"ok", ok}, {"max_residual", worst ? worst->residual : 0.0}};
    if (worst) j["worst"] = {{"vector_id", worst->vector_id}, {"relation", worst->relation}, {"residual", worst->residual}};
    j["rows"] = residual_rows_json(rows);
    detail::emit_json(o, out, j);
  }
  return ok ? kOk : kVerificationFailed;
}

inline int cmd_verify(const Options& o, std::ostream& out, spdlog::logger& log) {
  return o.rep.empty() ? verify_system(o, out, log) : verify_rep(o, out, log);
}

/// Depth-k cells whose mass, within tol, stays in one descendant for two
/// further levels.
inline std::vector<std::pair<std::string, double>> atom_candidates(const PermutativeRep& rep, const RepVector& f,
                                                                   int depth, double tol) {
  const Measure<double> deep = vector_measure(rep, f, depth + 2);
  const CylinderTable<double> coarse = mass_table(deep, depth);
  std::vector<std::pair<std::string, double>> out;
  const std::size_t block = cylinder_count(rep.n_branches(), 2);
  for (std::size_t idx = 0; idx < coarse.size(); ++idx) {
    if (coarse[idx] <= tol) continue;
    double largest = 0.0;
    for (std::size_t c = 0; c < block; ++c) largest = std::max(largest, deep.diffuse()[idx * block + c]);
    if (std::abs(largest - coarse[idx]) <= tol) out.emplace_back(digits(coarse.symbols_at(idx)), coarse[idx]);
  }
  return out;
}

inline int cmd_extract(const Options& o, std::ostream& out, spdlog::logger& log) {
  if (o.vector_file.empty()) throw ParseError("extract needs --vector");
  const PermutativeRep rep = resolve_rep(o.rep.empty() ? "torus" : o.rep);
  std::ifstream in(o.vector_file);
  if (!in) throw ParseError("cannot open '" + o.vector_file + "'");
  const RepVector f = read_rep_vector_csv(in);
  log.info("read {} coefficients", f.coefficients().size());
  const Measure<double> mu = vector_measure(rep, f, o.depth);
  if (o.format == "csv") {
    std::ostringstream text;
    write_mass_csv(text, mu, o.depth);
    detail::emit(o, out, text.str());
    return kOk;
  }
  std::optional<IfsSystem> ifs;
  if (rep.n_branches() == 2) ifs = IfsSystem::dyadic();
  Json j = {{"schema", kSchema}, {"kind", "extract"}, {"depth", o.depth}, {"measure", to_json(mu)}};
  j["atoms"] = detail::atom_rows(spectral_atoms(rep, f), ifs);
  Json candidates = Json::array();
  for (const auto& [w, m] : atom_candidates(rep, f, o.depth, o.tol)) candidates.push_back({{"word", w}, {"mass", m}});
  j["atom_candidates"] = std::move(candidates);
  detail::emit_json(o, out, j);
  return kOk;
}

inline int cmd_chaos(const Options& o, std::ostream& out, spdlog::logger& log) {
  const SystemSpec s = resolve_system(o.system);
  auto w = o.weights.empty() ? s.weights : parse_weights(o.weights);
  if (w.empty()) w.assign(static_cast<std::size_t>(s.ifs.n_branches()), Rational(1, s.ifs.n_branches()));
  const Measure<Rational> empirical = chaos_game(s.ifs, w, o.samples, o.seed, o.depth);
  const Measure<Rational> exact = hutchinson_fixed_point(s.ifs, w, o.depth);
  double max_dev = 0.0;
  double bound_at_max = 0.0;
  bool within = true;
  Json cells = Json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "word,empirical,exact,deviation,bound\n";
  for (std::size_t idx = 0; idx < exact.diffuse().size(); ++idx) {
    const double p = to_double(exact.diffuse()[idx]);
    const double e = to_double(empirical.diffuse()[idx]);
    const double dev = std::abs(e - p);
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(o.samples));
    within = within && dev <= bound;
    if (dev >= max_dev) {
      max_dev = dev;
      bound_at_max = bound;
    }
    const std::string word = digits(exact.diffuse().symbols_at(idx));
    cells.push_back({{"word", word}, {"empirical", e}, {"exact", to_string(exact.diffuse()[idx])}, {"deviation", dev}, {"bound", bound}});
    csv << word << ',' << e << ',' << p << ',' << dev << ',' << bound << '\n';
  }
  if (!within) log.warn("empirical masses leave the 3 sigma band");
  if (o.format == "csv") {
    detail::emit(o, out, csv.str());
    return kOk;
  }
  Json j = {{"schema", kSchema}, {"kind", "chaos"}, {"system", s.name}, {"samples", o.samples}, {"seed", o.seed},
            {"depth", o.depth}, {"max_deviation", max_dev}, {"bound_at_max", bound_at_max}, {"within_bound", within}};
  j["cells"] = std::move(cells);
  j["empirical"] = to_json(empirical);
  detail::emit_json(o, out, j);
  return kOk;
}

inline int cmd_apply(const Options& o, std::ostream& out, spdlog::logger& log) {
  if (o.coeffs.empty()) throw ParseError("apply needs --coeffs");
  const SystemSpec s = resolve_system(o.system);
  const ProbabilityMeasure base = base_measure(s, o.weights.empty() ? std::vector<Rational>{} : parse_weights(o.weights));
  std::ifstream in(o.coeffs);
  if (!in) throw ParseError("cannot open '" + o.coeffs + "'");
  L2Vector v = read_l2_vector_csv(in, base);
  if (v.depth() < o.depth) v = refined(v, o.depth);
  const auto ops = parse_ops(o.ops);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    s.ifs.require_present(it->branch);
    v = it->adjoint ? apply_S_mu_star(it->branch, v) : apply_S_mu(it->branch, v);
    log.debug("applied S{}{} -> depth {}", it->branch, it->adjoint ? "*" : "", v.depth());
  }
  if (o.format == "csv") {
    std::ostringstream text;
    write_l2_vector_csv(text, v);
    detail::emit(o, out, text.str());
    return kOk;
  }
  Json values = Json::array();
  const CylinderTable<Complex> shape(v.n_branches(), v.depth());
  for (std::size_t idx = 0; idx < v.values().size(); ++idx) {
    values.push_back({digits(shape.symbols_at(idx)), v.values()[idx].real(), v.values()[idx].imag()});
  }
  detail::emit_json(o, out, {{"schema", kSchema}, {"kind", "coefficients"}, {"system", s.name}, {"depth", v.depth()},
                             {"norm", l2_norm(v)}, {"values", std::move(values)}});
  return kOk;
}

/// Parses and runs one command line (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  auto log = detail::make_logger(err);
  CLI::App app{"Measures, square densities and Cuntz representations on IFS coding spaces", "ifs_cuntz"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--system", o.system, "dyadic, cantor, bernoulli:<p-list> or a config file");
    c->add_option("--weights", o.weights, "comma-separated num/den weights");
    c->add_option("--depth", o.depth, "cylinder depth")->check(CLI::NonNegativeNumber);
    c->add_option("--tol", o.tol, "residual tolerance")->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--out", o.out, "output file (default stdout)");
  };
  auto* hutchinson = app.add_subcommand("hutchinson", "fixed-point measure masses");
  common(hutchinson);
  hutchinson->add_option("--iterate", o.iterate, "iterate from the uniform measure and report the L1 trace")
      ->check(CLI::NonNegativeNumber);
  auto* verify = app.add_subcommand("verify", "Cuntz relation, intertwining and covariance residuals");
  common(verify);
  verify->add_option("--rep", o.rep, "torus or a representation config");
  verify->add_option("--branches", o.branches, "comma-separated present branches (1-based)");
  verify->add_option("--vectors", o.vectors, "number of test vectors")->check(CLI::PositiveNumber);
  verify->add_flag("--covariance", o.covariance, "also check covariance of the vector measures");
  auto* extract = app.add_subcommand("extract", "vector measure of a representation vector");
  common(extract);
  extract->add_option("--rep", o.rep, "torus or a representation config");
  extract->add_option("--vector", o.vector_file, "CSV index,re,im")->required();
  auto* chaos = app.add_subcommand("chaos", "chaos-game estimate of the fixed-point measure");
  common(chaos);
  chaos->add_option("--samples", o.samples, "number of samples")->check(CLI::PositiveNumber);
  auto* apply = app.add_subcommand("apply", "apply a word in S_i, S_i* to an L2 coefficient table");
  common(apply);
  apply->add_option("--coeffs", o.coeffs, "CSV word,re,im")->required();
  apply->add_option("--ops", o.ops, "operator word, e.g. \"S1 S2*\" (rightmost first)")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << detail::error_json(e.what(), kInputError).dump() << '\n';
    return kInputError;
  }

  try {
    if (*hutchinson) return cmd_hutchinson(o, out, *log);
    if (*verify) return cmd_verify(o, out, *log);
    if (*extract) return cmd_extract(o, out, *log);
    if (*chaos) return cmd_chaos(o, out, *log);
    return cmd_apply(o, out, *log);
  } catch (const std::exception& e) {
    err << detail::error_json(e.what(), kInputError).dump() << '\n';
    return kInputError;
  }
}

}  // namespace ifs_cuntz::cli
