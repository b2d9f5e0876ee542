#pragma once

// Plain-text run configuration in INI form:
//
//   [params]       beta sigma gamma psi delta mu lambda
//   [init]         S V R As Rs
//   [sim]          h t_end scheme rs_update population threshold_tol
//   [fit]          iterations adapt_interval dr_stages burn_in observable
//                  error_model sigma2 prior_shape prior_scale likelihood_step
//                  predictive_draws data_scale population_scale
//                  initial_scammers proposal_scale dr_scale series seed
//   [sensitivity]  n horizon h seed threads <param>_range = low,high
//
// Every key is optional. Unknown sections or keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scamdyn/integrators.hpp"
#include "scamdyn/model.hpp"
#include "scamdyn/sensitivity.hpp"

namespace scamdyn {

struct SimSettings {
  double h = 1.0;
  double t_end = 1520.0;
  Scheme scheme = Scheme::Nsfd;
  RemovedScammerUpdate rs_update = RemovedScammerUpdate::NextScammers;
  std::optional<double> population;  // N for R0; defaults to N(0)
  double threshold_tol = kThresholdTolerance;
};

struct FitSettings {
  std::size_t iterations = 10000;
  std::size_t adapt_interval = 100;
  int dr_stages = 2;
  double burn_in = 0.25;
  Observable observable = Observable::Prevalence;
  bool sample_sigma = true;
  double sigma2 = 1.0;
  double prior_shape = 0.5;
  double prior_scale = 0.5;
  double likelihood_step = 0.25;
  std::size_t predictive_draws = 200;
  double data_scale = 1.0;
  double population_scale = 1000.0;
  double initial_scammers = 200.0;
  double proposal_scale = 0.01;
  double dr_scale = 0.2;
  std::string series = "pooled";
  std::uint64_t seed = 1;
};

struct SensitivitySettings {
  std::size_t n = 2500;
  double horizon = 1520.0;
  double h = 1.0;
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::vector<ParameterRange> ranges = default_global_ranges();
};

struct RunConfig {
  Parameters params = Parameters::posterior_means();
  State init{1000.0, 100.0, 0.0, 200.0, 0.0};
  SimSettings sim;
  FitSettings fit;
  SensitivitySettings sensitivity;
};

/// Throws ConfigError on unknown section/key or unparsable value.
void apply_setting(RunConfig& cfg, std::string_view section, std::string_view key,
                   std::string_view value);

/// `section.key=value`.
void apply_override(RunConfig& cfg, std::string_view assignment);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace scamdyn
