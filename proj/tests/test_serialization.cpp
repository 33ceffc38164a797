#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace ifs_cuntz;
using testing_support::Gen;

TEST(MeasureJson, ExactRoundTrip) {
  Gen g(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = g.integer(2, 3);
    auto m = g.probability(n, g.integer(0, 3), RefinementModel<Rational>::bernoulli(g.weights(n)));
    m = convex_combine<Rational>({Rational(1, 2), Rational(1, 2)}, {m, Measure<Rational>::dirac(n, g.point(n))});
    const Json j = to_json(m);
    EXPECT_EQ(j.at("schema"), "ifs-cuntz/v1");
    const auto back = measure_from_json<Rational>(Json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(l1_distance(back, m, 5), 0);
  }
}

TEST(MeasureJson, LargeIntegersSurvive) {
  Rational tiny(1);
  for (int k = 0; k < 30; ++k) tiny /= 7;
  const auto m = Measure<Rational>::bernoulli({tiny, 1 - tiny}, 2);
  EXPECT_EQ(l1_distance(measure_from_json<Rational>(to_json(m)), m, 4), 0);
}

TEST(MeasureJson, FloatingRoundTrip) {
  Gen g(72);
  const auto m = g.frozen_measure(2, 3, true);
  const auto back = measure_from_json<double>(Json::parse(to_json(m).dump()));
  EXPECT_EQ(max_cell_difference(back, m, 3), 0.0);
  EXPECT_EQ(back.atoms().size(), m.atoms().size());
}

TEST(MeasureJson, RejectsMalformedInput) {
  EXPECT_THROW(measure_from_json<Rational>(Json::parse(R"({"kind":"measure"})")), ParseError);
  Json j = to_json(Measure<Rational>::uniform(2));
  j["model"] = "weird";
  EXPECT_THROW(measure_from_json<Rational>(j), ParseError);
  j = to_json(Measure<Rational>::uniform(2));
  j["masses"] = Json::array({Json::array({"0", 0.5, 1})});
  EXPECT_THROW(measure_from_json<Rational>(j), ParseError);
  j = to_json(Measure<Rational>::uniform(2));
  j["masses"] = Json::array({Json::array({"", 1, 0})});
  EXPECT_THROW(measure_from_json<Rational>(j), ParseError);
}

TEST(SquareDensityJson, RoundTrip) {
  Gen g(73);
  const auto a = g.density_on(g.frozen_measure(3, 2, true));
  const auto b = square_density_from_json(Json::parse(to_json(a).dump()));
  EXPECT_TRUE(equivalent(a, b, 0.0));
}

TEST(Report, RowsCarryRelationNames) {
  Gen g(74);
  const auto report = verify_cuntz_on(IfsSystem::dyadic(), {g.density_on(g.frozen_measure(2, 2, false))}, 1e-12);
  const Json j = to_json(report);
  EXPECT_EQ(j.at("rows").size(), 5u);
  EXPECT_EQ(j.at("rows")[0].at("relation"), "S1*S1");
  EXPECT_EQ(j.at("rows")[4].at("relation"), "sum SiSi*");
  EXPECT_TRUE(j.at("ok").get<bool>());
}

TEST(MassCsv, OneRowPerCell) {
  std::ostringstream out;
  write_mass_csv(out, Measure<Rational>::bernoulli({Rational(1, 4), Rational(3, 4)}, 0), 2);
  EXPECT_EQ(out.str(), "word,mass,exact\n00,0.0625,1/16\n01,0.1875,3/16\n10,0.1875,3/16\n11,0.5625,9/16\n");
}

TEST(Configs, SystemFromJson) {
  const auto ifs = ifs_from_json(Json::parse(R"({"geometry":"affine","maps":[["1/3",0],[[1,3],"2/3"]],"branches":[2]})"));
  EXPECT_EQ(ifs.map(1).slope, Rational(1, 3));
  EXPECT_EQ(ifs.map(2).offset, Rational(2, 3));
  EXPECT_FALSE(ifs.is_present(1));
  EXPECT_EQ(ifs_from_json(Json::parse(R"({"geometry":"symbolic","alphabet":4})")).n_branches(), 4);
  EXPECT_THROW(ifs_from_json(Json::parse(R"({"geometry":"cantor","alphabet":3})")), ParseError);
  EXPECT_THROW(ifs_from_json(Json::parse(R"({"geometry":"affine","maps":[[2,0],[1,1]]})")), DomainError);
  EXPECT_THROW(ifs_from_json(Json::parse(R"({"geometry":"blob"})")), ParseError);
}

TEST(Configs, RepFromJson) {
  const auto rep = rep_from_json(Json::parse(R"({"alphabet":3,"index_maps":[[3,0],[3,1],[3,2]]})"));
  EXPECT_EQ(rep.n_branches(), 3);
  EXPECT_THROW(rep_from_json(Json::parse(R"({"index_maps":[[2,0],[2,2]]})")), DomainError);
  EXPECT_THROW(rep_from_json(Json::parse(R"({"index_maps":[[2]]})")), ParseError);
}

TEST(VectorCsv, ParsesAndRejects) {
  std::istringstream ok("index,re,im\n0, 0.5, 0\n\n2,0.5,-1\n0,0.25,0\n");
  const RepVector f = read_rep_vector_csv(ok);
  EXPECT_EQ(f[0], Complex(0.75, 0));
  EXPECT_EQ(f[2], Complex(0.5, -1));
  std::istringstream bad_number("0,abc,0\n");
  EXPECT_THROW(read_rep_vector_csv(bad_number), ParseError);
  std::istringstream bad_fields("0,1\n");
  EXPECT_THROW(read_rep_vector_csv(bad_fields), ParseError);
  std::istringstream bad_index("1.5,1,0\n");
  EXPECT_THROW(read_rep_vector_csv(bad_index), ParseError);
}

TEST(CoefficientCsv, RoundTrip) {
  Gen g(75);
  const ProbabilityMeasure mu(Measure<Rational>::uniform(2));
  const auto v = g.l2_vector(mu, 3);
  std::ostringstream out;
  write_l2_vector_csv(out, v);
  std::istringstream in(out.str());
  const auto back = read_l2_vector_csv(in, mu);
  EXPECT_EQ(back.values(), v.values());
  std::istringstream mixed("word,re,im\n0,1,0\n01,1,0\n");
  EXPECT_THROW(read_l2_vector_csv(mixed, mu), ParseError);
}
