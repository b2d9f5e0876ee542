#include "scamdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"

namespace scamdyn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view section, std::string_view key,
                            std::string_view value) {
  throw ConfigError(fmt::format("[{}] {}: invalid value '{}'", section, key, value));
}

double to_double(std::string_view section, std::string_view key, std::string_view value) {
  const auto v = csv::parse_double(trim(value));
  if (!v || !std::isfinite(*v)) bad_value(section, key, value);
  return *v;
}

template <typename Int>
Int to_integer(std::string_view section, std::string_view key, std::string_view value) {
  value = trim(value);
  Int out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(section, key, value);
  return out;
}

void set_params(Parameters& p, std::string_view key, std::string_view value) {
  const auto id = param_from_name(key);
  if (!id) throw ConfigError(fmt::format("[params] unknown key '{}'", key));
  p[*id] = to_double("params", key, value);
}

void set_init(State& x, std::string_view key, std::string_view value) {
  const double v = to_double("init", key, value);
  if (key == "S") x.s = v;
  else if (key == "V") x.v = v;
  else if (key == "R") x.r = v;
  else if (key == "As") x.a_s = v;
  else if (key == "Rs") x.r_s = v;
  else throw ConfigError(fmt::format("[init] unknown key '{}'", key));
}

void set_sim(SimSettings& s, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (key == "h") s.h = to_double("sim", key, v);
  else if (key == "t_end") s.t_end = to_double("sim", key, v);
  else if (key == "population") s.population = to_double("sim", key, v);
  else if (key == "threshold_tol") s.threshold_tol = to_double("sim", key, v);
  else if (key == "scheme") {
    if (v == "nsfd") s.scheme = Scheme::Nsfd;
    else if (v == "reference") s.scheme = Scheme::ReferenceRk;
    else bad_value("sim", key, v);
  } else if (key == "rs_update") {
    if (v == "next") s.rs_update = RemovedScammerUpdate::NextScammers;
    else if (v == "current") s.rs_update = RemovedScammerUpdate::CurrentScammers;
    else bad_value("sim", key, v);
  } else {
    throw ConfigError(fmt::format("[sim] unknown key '{}'", key));
  }
}

void set_fit(FitSettings& f, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  constexpr std::string_view sec = "fit";
  if (key == "iterations") f.iterations = to_integer<std::size_t>(sec, key, v);
  else if (key == "adapt_interval") f.adapt_interval = to_integer<std::size_t>(sec, key, v);
  else if (key == "dr_stages") f.dr_stages = to_integer<int>(sec, key, v);
  else if (key == "burn_in") f.burn_in = to_double(sec, key, v);
  else if (key == "sigma2") f.sigma2 = to_double(sec, key, v);
  else if (key == "prior_shape") f.prior_shape = to_double(sec, key, v);
  else if (key == "prior_scale") f.prior_scale = to_double(sec, key, v);
  else if (key == "likelihood_step") f.likelihood_step = to_double(sec, key, v);
  else if (key == "predictive_draws") f.predictive_draws = to_integer<std::size_t>(sec, key, v);
  else if (key == "data_scale") f.data_scale = to_double(sec, key, v);
  else if (key == "population_scale") f.population_scale = to_double(sec, key, v);
  else if (key == "initial_scammers") f.initial_scammers = to_double(sec, key, v);
  else if (key == "proposal_scale") f.proposal_scale = to_double(sec, key, v);
  else if (key == "dr_scale") f.dr_scale = to_double(sec, key, v);
  else if (key == "seed") f.seed = to_integer<std::uint64_t>(sec, key, v);
  else if (key == "series") {
    if (v.empty()) bad_value(sec, key, v);
    f.series = std::string(v);
  } else if (key == "observable") {
    if (v == "prevalence") f.observable = Observable::Prevalence;
    else if (v == "incidence") f.observable = Observable::Incidence;
    else bad_value(sec, key, v);
  } else if (key == "error_model") {
    if (v == "sampled") f.sample_sigma = true;
    else if (v == "fixed") f.sample_sigma = false;
    else bad_value(sec, key, v);
  } else {
    throw ConfigError(fmt::format("[fit] unknown key '{}'", key));
  }
}

void set_sensitivity(SensitivitySettings& s, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  constexpr std::string_view sec = "sensitivity";
  if (key == "n") s.n = to_integer<std::size_t>(sec, key, v);
  else if (key == "horizon") s.horizon = to_double(sec, key, v);
  else if (key == "h") s.h = to_double(sec, key, v);
  else if (key == "seed") s.seed = to_integer<std::uint64_t>(sec, key, v);
  else if (key == "threads") s.threads = to_integer<unsigned>(sec, key, v);
  else if (key.ends_with("_range")) {
    const auto id = param_from_name(key.substr(0, key.size() - 6));
    if (!id) throw ConfigError(fmt::format("[sensitivity] unknown key '{}'", key));
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) bad_value(sec, key, v);
    const double low = to_double(sec, key, v.substr(0, comma));
    const double high = to_double(sec, key, v.substr(comma + 1));
    auto it = std::find_if(s.ranges.begin(), s.ranges.end(),
                           [&](const ParameterRange& r) { return r.id == *id; });
    if (it == s.ranges.end()) s.ranges.push_back({*id, low, high});
    else *it = {*id, low, high};
  } else {
    throw ConfigError(fmt::format("[sensitivity] unknown key '{}'", key));
  }
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view section, std::string_view key,
                   std::string_view value) {
  if (section == "params") set_params(cfg.params, key, value);
  else if (section == "init") set_init(cfg.init, key, value);
  else if (section == "sim") set_sim(cfg.sim, key, value);
  else if (section == "fit") set_fit(cfg.fit, key, value);
  else if (section == "sensitivity") set_sensitivity(cfg.sensitivity, key, value);
  else throw ConfigError(fmt::format("unknown section [{}]", section));
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError(fmt::format("override '{}' is not of the form section.key=value",
                                  assignment));
  }
  apply_setting(cfg, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1),
                assignment.substr(eq + 1));
}

RunConfig load_config(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ConfigError(fmt::format("key '{}' outside any section", section));
    }
    for (const auto& [key, leaf] : body) {
      apply_setting(cfg, section, key, leaf.data());
    }
  }
  return cfg;
}

}  // namespace scamdyn
