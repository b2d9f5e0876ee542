#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "scamdyn/config.hpp"
#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"
#include "support.hpp"

using namespace scamdyn;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "scamdyn_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.params == Parameters::posterior_means());
  CHECK(cfg.init == State{1000, 100, 0, 200, 0});
  CHECK(cfg.sim.h == 1.0);
  CHECK(cfg.sim.t_end == 1520.0);
  CHECK(cfg.fit.iterations == 10000);
  CHECK(cfg.fit.likelihood_step == 0.25);
  CHECK(cfg.sensitivity.n == 2500);
  CHECK(cfg.sensitivity.seed == 7);
}

TEST_CASE("loading a full file") {
  const auto path = write_temp("full.ini",
                               "# comment\n"
                               "[params]\nbeta = 0.01\nlambda=0.05\n"
                               "[init]\nS = 500\nAs = 20\n"
                               "[sim]\nh = 0.5\nscheme = reference\nrs_update = current\npopulation = 2000\n"
                               "[fit]\niterations = 50\nobservable = incidence\nerror_model = fixed\n"
                               "sigma2 = 3\nseries = ON\nseed = 99\n"
                               "[sensitivity]\nn = 100\nthreads = 2\nlambda_range = 0.1, 0.5\n");
  const auto cfg = load_config(path);
  CHECK(cfg.params.beta == 0.01);
  CHECK(cfg.params.lambda == 0.05);
  CHECK(cfg.params.sigma == Parameters::posterior_means().sigma);
  CHECK(cfg.init.s == 500.0);
  CHECK(cfg.init.a_s == 20.0);
  CHECK(cfg.init.v == 100.0);
  CHECK(cfg.sim.h == 0.5);
  CHECK(cfg.sim.scheme == Scheme::ReferenceRk);
  CHECK(cfg.sim.rs_update == RemovedScammerUpdate::CurrentScammers);
  CHECK(cfg.sim.population == 2000.0);
  CHECK(cfg.fit.iterations == 50);
  CHECK(cfg.fit.observable == Observable::Incidence);
  CHECK_FALSE(cfg.fit.sample_sigma);
  CHECK(cfg.fit.sigma2 == 3.0);
  CHECK(cfg.fit.series == "ON");
  CHECK(cfg.fit.seed == 99);
  CHECK(cfg.sensitivity.n == 100);
  CHECK(cfg.sensitivity.threads == 2);
  REQUIRE(cfg.sensitivity.ranges.size() == 7);
  CHECK(cfg.sensitivity.ranges[5].id == ParamId::Lambda);
  CHECK(cfg.sensitivity.ranges[5].low == 0.1);
  CHECK(cfg.sensitivity.ranges[5].high == 0.5);
}

TEST_CASE("typos and bad values are hard errors") {
  CHECK_THROWS_AS(load_config(write_temp("a.ini", "[params]\nbeta_typo = 1\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("b.ini", "[parms]\nbeta = 1\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("c.ini", "beta = 1\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("d.ini", "[sim]\nh = fast\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("e.ini", "[sim]\nscheme = euler\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("f.ini", "[fit]\niterations = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("g.ini", "[sensitivity]\nkappa_range = 0,1\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("h.ini", "[sensitivity]\nbeta_range = 0\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_temp("i.ini", "[init]\ns = 1\n")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / "scamdyn_test_config");
}

TEST_CASE("command-line overrides") {
  RunConfig cfg;
  apply_override(cfg, "params.psi=0");
  CHECK(cfg.params.psi == 0.0);
  apply_override(cfg, "sim.t_end=10");
  CHECK(cfg.sim.t_end == 10.0);
  CHECK_THROWS_AS(apply_override(cfg, "psi=0"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "params.psi"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "params.kappa=1"), ConfigError);
}

TEST_CASE("property: decimal formatting round-trips") {
  gen::Source g(701);
  for (int i = 0; i < 2000; ++i) {
    const double x = g.coin() ? g.log_uniform(1e-300, 1e300) : g.uniform(-1e6, 1e6);
    CHECK(csv::parse_double(csv::format_double(x)) == x);
    CHECK(csv::parse_double(csv::format_decimal(std::abs(x))) == std::abs(x));
  }
  CHECK_FALSE(csv::parse_double("").has_value());
  CHECK_FALSE(csv::parse_double("1.0x").has_value());
  CHECK(csv::parse_double("+2.5") == 2.5);
  CHECK(csv::split("a,,b") == std::vector<std::string_view>{"a", "", "b"});
}
