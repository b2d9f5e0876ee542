#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles/oracles.hpp"
#include "scamdyn/error.hpp"
#include "scamdyn/integrators.hpp"
#include "scamdyn/csv.hpp"
#include "scamdyn/sensitivity.hpp"
#include "support.hpp"

using namespace scamdyn;

namespace {

double finite_difference_index(const Parameters& p, ParamId id) {
  const double r0 = reproduction_number(p, 1000.0);
  auto q = p;
  q[id] *= 1.0 + 1e-6;
  const double r1 = reproduction_number(q, 1000.0);
  return ((r1 - r0) / r0) / 1e-6;
}

double index_of(const LocalIndexSet& s, ParamId id) {
  switch (id) {
    case ParamId::Beta: return s.beta;
    case ParamId::Psi: return s.psi;
    case ParamId::Gamma: return s.gamma;
    case ParamId::Mu: return s.mu;
    case ParamId::Lambda: return s.lambda;
    case ParamId::Delta: return s.delta;
    default: return 0.0;
  }
}

SampleDesign toy_design(std::size_t n, std::uint64_t seed) {
  std::vector<ParameterRange> ranges;
  for (auto id : kAllParams) ranges.push_back({id, 0.0, 1.0});
  return lhs_sample(n, ranges, seed);
}

}  // namespace

TEST_CASE("local indices at the published means") {
  const auto s = local_indices(oracle::table_means());
  CHECK(std::abs(s.beta - 1.0000) <= 1e-4);
  CHECK(std::abs(s.psi - 0.9999) <= 1e-4);
  CHECK(std::abs(s.gamma + 0.9999) <= 1e-4);
  CHECK(std::abs(s.mu + 2.5586) <= 1e-4);
  CHECK(std::abs(s.lambda + 2.4681) <= 1e-4);
  CHECK(std::abs(s.delta - 4.0267) <= 1e-4);
}

TEST_CASE("local index special cases") {
  auto p = oracle::table_means();
  p.psi = p.gamma;
  auto s = local_indices(p);
  CHECK(s.psi == doctest::Approx(0.5));
  CHECK(s.gamma == doctest::Approx(-0.5));

  p = oracle::table_means();
  p.delta = 0.0;
  s = local_indices(p);
  CHECK(s.delta == 0.0);
  CHECK(s.mu == doctest::Approx(-p.mu / (p.mu + p.lambda)));
  CHECK(s.lambda == doctest::Approx(-p.lambda / (p.mu + p.lambda)));

  p.gamma = 0.0;
  p.psi = 0.0;
  CHECK_THROWS_AS(local_indices(p), DegenerateDenominator);
  p = oracle::table_means();
  p.delta = p.mu + p.lambda;
  CHECK_THROWS_AS(local_indices(p), DegenerateDenominator);
}

TEST_CASE("property: local index identities") {
  gen::Source g(501);
  for (int i = 0; i < 1000; ++i) {
    auto p = g.params();
    if (p.gamma + p.psi == 0.0 || p.mu + p.lambda == p.delta) continue;
    const auto s = local_indices(p);
    CHECK(s.beta == 1.0);
    CHECK(std::abs(s.psi + s.gamma) <= 1e-15);
    const double scale = std::max({1.0, std::abs(s.delta), std::abs(s.mu), std::abs(s.lambda)});
    CHECK(std::abs(s.delta + s.mu + s.lambda + 1.0) <= 1e-12 * scale);
  }
}

TEST_CASE("property: local indices match finite differences") {
  auto check_point = [](const Parameters& p) {
    const auto s = local_indices(p);
    for (auto id : {ParamId::Beta, ParamId::Psi, ParamId::Gamma, ParamId::Mu, ParamId::Lambda,
                    ParamId::Delta}) {
      if (p[id] == 0.0) continue;
      const double fd = finite_difference_index(p, id);
      const double exact = index_of(s, id);
      CHECK(std::abs(fd - exact) <= 1e-4 * std::max(1.0, std::abs(exact)));
    }
  };
  check_point(oracle::table_means());
  gen::Source g(502);
  int tested = 0;
  while (tested < 100) {
    const auto p = g.subcritical_params();
    // Keep away from the pole at mu + lambda = delta.
    if (p.mu + p.lambda - p.delta < 0.05 * (p.mu + p.lambda) || p.psi == 0.0 || p.beta == 0.0) continue;
    check_point(p);
    ++tested;
  }
}

TEST_CASE("latin hypercube design") {
  SUBCASE("n = 4 puts one point in each quarter") {
    const auto d = lhs_sample(4, {{ParamId::Beta, 0.0, 1.0}}, 3);
    std::vector<double> col(d.matrix.col(0).data(), d.matrix.col(0).data() + 4);
    std::sort(col.begin(), col.end());
    for (int i = 0; i < 4; ++i) {
      CHECK(col[static_cast<std::size_t>(i)] >= 0.25 * i);
      CHECK(col[static_cast<std::size_t>(i)] <= 0.25 * (i + 1));
    }
  }
  SUBCASE("same seed, same design") {
    const auto a = lhs_sample(100, default_global_ranges(), 11);
    const auto b = lhs_sample(100, default_global_ranges(), 11);
    CHECK(a.matrix == b.matrix);
    const auto c = lhs_sample(100, default_global_ranges(), 12);
    CHECK_FALSE(a.matrix == c.matrix);
  }
  SUBCASE("property: every column is stratified and in range") {
    gen::Source g(503);
    for (std::size_t n : {2u, 3u, 10u, 97u, 2500u}) {
      const auto d = lhs_sample(n, default_global_ranges(), g.engine()());
      for (Eigen::Index j = 0; j < d.matrix.cols(); ++j) {
        const auto& r = d.ranges[static_cast<std::size_t>(j)];
        std::vector<int> hits(n, 0);
        for (Eigen::Index i = 0; i < d.matrix.rows(); ++i) {
          const double v = d.matrix(i, j);
          REQUIRE(v >= r.low);
          REQUIRE(v <= r.high);
          auto s = static_cast<std::size_t>((v - r.low) / (r.high - r.low) * static_cast<double>(n));
          hits[std::min(s, n - 1)]++;
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
      }
    }
  }
  SUBCASE("published ranges") {
    const auto ranges = default_global_ranges();
    REQUIRE(ranges.size() == 7);
    const ParamId order[] = {ParamId::Beta, ParamId::Gamma, ParamId::Sigma, ParamId::Delta,
                             ParamId::Mu,   ParamId::Lambda, ParamId::Psi};
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(ranges[j].id == order[j]);
      CHECK(ranges[j].low == 0.0);
    }
    CHECK(ranges[2].high == 0.2);
    CHECK(ranges[5].high == 1.0);
    CHECK(ranges[0].high == 0.1);
  }
  SUBCASE("invalid") {
    CHECK_THROWS_AS(lhs_sample(1, default_global_ranges(), 1), InvalidRange);
    CHECK_THROWS_AS(lhs_sample(10, {{ParamId::Beta, 0.5, 0.5}}, 1), InvalidRange);
    CHECK_THROWS_AS(lhs_sample(10, {{ParamId::Beta, 0.6, 0.5}}, 1), InvalidRange);
  }
}

TEST_CASE("burden integrals") {
  Trajectory t;
  for (int k = 0; k <= 1520; ++k) {
    t.times.push_back(k);
    t.states.push_back(State{0, 2.0 + 0.01 * k, 0, 3.0, 0});
  }
  auto b = integrate_burden(t, 1520.0);
  CHECK(b.scammers == doctest::Approx(1520.0 * 3.0).epsilon(1e-12));
  CHECK(b.victims == doctest::Approx(1520.0 * (2.0 + 17.2) / 2.0).epsilon(1e-12));
  b = integrate_burden(t, 10.5);
  CHECK(b.scammers == doctest::Approx(31.5).epsilon(1e-12));
  CHECK(b.victims == doctest::Approx(10.5 * (2.0 + 2.105) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_burden(t, 1600.0), HorizonExceedsTrajectory);

  SUBCASE("agrees with Simpson quadrature on a model orbit") {
    const auto traj = simulate(State{1000, 100, 0, 200, 0}, oracle::table_means(), {.h = 1.0, .t_end = 1520.0});
    std::vector<double> as, v;
    for (const auto& x : traj.states) {
      as.push_back(x.a_s);
      v.push_back(x.v);
    }
    const auto got = integrate_burden(traj, 1520.0);
    CHECK(std::abs(got.scammers / oracle::simpson(as, 1.0) - 1.0) <= 1e-3);
    CHECK(std::abs(got.victims / oracle::simpson(v, 1.0) - 1.0) <= 1e-3);
  }
}

TEST_CASE("prcc against the matrix-inversion oracle") {
  gen::Source g(504);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = toy_design(20, g.engine()());
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      y[i] = std::exp(d.matrix(r, 0)) - 3.0 * d.matrix(r, 3) + 0.5 * d.matrix(r, 6) * d.matrix(r, 1) +
             g.uniform(0.0, 0.3);
    }
    const auto rep = prcc(d, y, BurdenOutput::AsBurden);
    const auto want = oracle::prcc_by_inversion(d.matrix, y);
    CHECK(rep.degrees_of_freedom == 12);
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(std::abs(rep.entries[j].coefficient - want[j]) <= 1e-10);
    }
  }
}

TEST_CASE("prcc behaviour") {
  SUBCASE("output tracking one input") {
    const auto d = toy_design(200, 5);
    gen::Source g(504);
    std::vector<double> y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
      y[static_cast<std::size_t>(i)] = d.matrix(i, 0) + g.uniform(0.0, 1e-3);
    }
    const auto rep = prcc(d, y, BurdenOutput::VBurden);
    CHECK(rep.entries[0].coefficient > 0.99);
    CHECK(rep.entries[0].p_value <= 1e-12);
    CHECK(rep.entries[0].significant);
    CHECK(rep.output == BurdenOutput::VBurden);

    // An exact copy leaves no output residual for the other inputs.
    for (Eigen::Index i = 0; i < 200; ++i) y[static_cast<std::size_t>(i)] = d.matrix(i, 0);
    CHECK_THROWS_AS(prcc(d, y, BurdenOutput::VBurden), DegenerateDesign);
  }
  SUBCASE("independent output") {
    const auto d = toy_design(2500, 6);
    gen::Source g(505);
    std::vector<double> y(2500);
    for (double& v : y) v = g.uniform(0.0, 1.0);
    const auto rep = prcc(d, y, BurdenOutput::AsBurden);
    for (const auto& e : rep.entries) {
      CHECK(std::abs(e.coefficient) < 0.1);
      CHECK(e.p_value >= 0.0);
      CHECK(e.p_value <= 1.0);
    }
  }
  SUBCASE("property: rank invariance and range") {
    const auto d = toy_design(150, 7);
    gen::Source g(506);
    std::vector<double> y(150);
    for (Eigen::Index i = 0; i < 150; ++i) {
      y[static_cast<std::size_t>(i)] = d.matrix(i, 2) - d.matrix(i, 4) * d.matrix(i, 4) + g.uniform(0.0, 0.5);
    }
    const auto base = prcc(d, y, BurdenOutput::AsBurden);
    auto warped = d;
    warped.matrix.col(2) = warped.matrix.col(2).array().cube();
    warped.matrix.col(4) = (warped.matrix.col(4).array() * 3.0).exp();
    std::vector<double> y2(y);
    for (double& v : y2) v = std::log1p(v + 1.0) * 10.0 - 4.0;
    const auto moved = prcc(warped, y2, BurdenOutput::AsBurden);
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(moved.entries[j].coefficient == doctest::Approx(base.entries[j].coefficient).epsilon(1e-12));
      CHECK(std::abs(base.entries[j].coefficient) <= 1.0);
    }
  }
  SUBCASE("degenerate inputs") {
    auto d = toy_design(30, 8);
    std::vector<double> y(30, 1.0);
    CHECK_THROWS_AS(prcc(d, y, BurdenOutput::AsBurden), DegenerateDesign);
    d.matrix.col(1) = d.matrix.col(0);
    for (std::size_t i = 0; i < 30; ++i) y[i] = static_cast<double>(i);
    CHECK_THROWS_AS(prcc(d, y, BurdenOutput::AsBurden), DegenerateDesign);
    const std::vector<double> short_y(29, 0.0);
    CHECK_THROWS_AS(prcc(toy_design(30, 8), short_y, BurdenOutput::AsBurden), InvalidArgument);
  }
}

TEST_CASE("global analysis plumbing") {
  GlobalConfig cfg;
  cfg.n = 10;
  const auto rep = global_analysis(cfg);
  CHECK(rep.scammers.degrees_of_freedom == 2);
  CHECK(rep.victims.degrees_of_freedom == 2);
  CHECK(rep.dropped_rows == 0);
  CHECK(rep.scammers.entries.size() == 7);

  cfg.n = 200;
  cfg.threads = 1;
  const auto one = global_analysis(cfg);
  cfg.threads = 4;
  const auto four = global_analysis(cfg);
  for (std::size_t j = 0; j < 7; ++j) {
    CHECK(one.scammers.entries[j].coefficient == four.scammers.entries[j].coefficient);
    CHECK(one.victims.entries[j].p_value == four.victims.entries[j].p_value);
  }

  std::ostringstream os;
  write_prcc_csv(os, one);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "parameter,range_low,range_high,prcc_As,p_As,prcc_V,p_V,significant_As,significant_V");
  std::getline(is, line);
  const auto fields = csv::split(line);
  REQUIRE(fields.size() == 9);
  CHECK(fields[0] == "beta");
  CHECK(csv::parse_double(fields[1]) == 0.0);
  CHECK(csv::parse_double(fields[2]) == 0.1);
  CHECK(csv::parse_double(fields[3]) == one.scammers.entries[0].coefficient);
}

TEST_CASE("local index export") {
  std::ostringstream os;
  const auto p = oracle::table_means();
  write_local_indices_csv(os, p, local_indices(p));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "parameter,description,nominal_value,sensitivity_index");
  std::vector<std::string> names;
  while (std::getline(is, line)) names.push_back(line.substr(0, line.find(',')));
  CHECK(names == std::vector<std::string>{"beta", "psi", "gamma", "mu", "lambda", "delta"});
}
