#include "scamdyn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "scamdyn/config.hpp"
#include "scamdyn/csv.hpp"
#include "scamdyn/data.hpp"
#include "scamdyn/error.hpp"
#include "scamdyn/inference.hpp"
#include "scamdyn/integrators.hpp"
#include "scamdyn/model.hpp"
#include "scamdyn/sensitivity.hpp"

namespace scamdyn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "INI run configuration");
  cmd->add_option("--out", common.out_dir, "Output directory (created if missing)");
  cmd->add_option("--seed", common.seed, "RNG seed (fit and sensitivity)");
  cmd->add_option("--set", common.overrides, "Override a config key: section.key=value");
}

RunConfig build_config(const CommonOptions& common) {
  RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
  for (const auto& o : common.overrides) apply_override(cfg, o);
  if (common.seed) {
    cfg.fit.seed = *common.seed;
    cfg.sensitivity.seed = *common.seed;
  }
  return cfg;
}

void write_output(const CommonOptions& common, const std::string& name,
                  const std::string& contents) {
  const fs::path dir(common.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  csv::write_file_atomic(dir / name, contents);
}

int exit_code_for(const Error& e, int fallback) {
  switch (e.category()) {
    case ErrorCategory::Config: return kConfigError;
    case ErrorCategory::InvalidArgument:
    case ErrorCategory::Model: return fallback;
    case ErrorCategory::Simulation: return kSimulationError;
    case ErrorCategory::Data: return kDataError;
    case ErrorCategory::Inference: return kInferenceError;
  }
  return fallback;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::optional<double> h;
  std::optional<double> t_end;
  std::string scheme;
  std::string sweep;
};

ordered_json simulation_summary(const Trajectory& traj, const RunConfig& cfg) {
  const double n0 = traj.states.front().total();
  const double population = cfg.sim.population.value_or(n0);
  const StabilityReport rep =
      classify_sfe_stability(traj.params, population, cfg.sim.threshold_tol);
  ordered_json j;
  if (std::isfinite(rep.r0)) j["R0"] = rep.r0;
  else j["R0"] = nullptr;
  j["classification"] = std::string(to_string(rep.classification));
  j["population"] = population;
  j["N0"] = n0;
  j["N_end"] = traj.states.back().total();
  j["bound_check"] = total_population_bound_check(traj);
  j["scheme"] = std::string(to_string(traj.scheme));
  j["h"] = traj.h;
  j["t_end"] = traj.times.back();
  return j;
}

int cmd_simulate(const CommonOptions& common, const SimulateOptions& opts,
                 std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  struct Run {
    std::string suffix;
    Parameters params;
  };
  std::vector<Run> runs;
  StepConfig step;
  try {
    cfg = build_config(common);
    if (opts.h) cfg.sim.h = *opts.h;
    if (opts.t_end) cfg.sim.t_end = *opts.t_end;
    if (!opts.scheme.empty()) apply_setting(cfg, "sim", "scheme", opts.scheme);
    cfg.params.validate();
    cfg.init.validate();
    step = StepConfig{cfg.sim.h, cfg.sim.t_end, cfg.sim.scheme, cfg.sim.rs_update};
    step.validate();

    if (opts.sweep.empty()) {
      runs.push_back({"", cfg.params});
    } else {
      const auto eq = opts.sweep.find('=');
      const auto id = param_from_name(opts.sweep.substr(0, eq));
      if (eq == std::string::npos || !id) {
        throw ConfigError("--sweep expects param=v1,v2,...");
      }
      for (const auto field : csv::split(std::string_view(opts.sweep).substr(eq + 1))) {
        const auto v = csv::parse_double(field);
        if (!v || *v < 0.0) throw ConfigError(fmt::format("bad sweep value '{}'", field));
        Run run{fmt::format("_{}_{}", param_name(*id), field), cfg.params};
        run.params[*id] = *v;
        runs.push_back(std::move(run));
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  for (const Run& run : runs) {
    try {
      const Trajectory traj = simulate(cfg.init, run.params, step);
      std::ostringstream csv_text;
      write_trajectory_csv(csv_text, traj);
      write_output(common, "trajectory" + run.suffix + ".csv", csv_text.str());
      const ordered_json summary = simulation_summary(traj, cfg);
      write_output(common, "summary" + run.suffix + ".json", summary.dump(2) + "\n");
      out << "trajectory" << run.suffix << ".csv: " << traj.size() << " points, R0 = "
          << (summary["R0"].is_null() ? std::string("undefined")
                                      : csv::format_double(summary["R0"].get<double>()))
          << '\n';
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e, kConfigError);
    }
  }
  return kSuccess;
}

// --------------------------------------------------------------- stability

int cmd_stability(const CommonOptions& common, std::optional<double> population,
                  std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = build_config(common);
    if (population) cfg.sim.population = *population;
    cfg.params.validate();
    const double n = cfg.sim.population.value_or(cfg.init.total());
    const StabilityReport rep = classify_sfe_stability(cfg.params, n, cfg.sim.threshold_tol);
    ordered_json j;
    if (std::isfinite(rep.r0)) {
      j["R0"] = rep.r0;
      j["see_condition"] = rep.r0 - 1.0;
    } else {
      j["R0"] = nullptr;
      j["see_condition"] = nullptr;
    }
    j["population"] = n;
    j["p1"] = rep.p1;
    j["p2"] = rep.p2;
    j["discriminant"] = rep.discriminant;
    j["eigenvalue_1"] = rep.eigenvalues[0];
    j["eigenvalue_2"] = rep.eigenvalues[1];
    j["classification"] = std::string(to_string(rep.classification));
    out << j.dump(2) << '\n';
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e, kConfigError);
  }
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  std::string data_path;
  std::optional<std::size_t> iterations;
  std::string series;
  std::string observable;
};

int cmd_fit(const CommonOptions& common, const FitOptions& opts, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = build_config(common);
    if (opts.iterations) cfg.fit.iterations = *opts.iterations;
    if (!opts.series.empty()) cfg.fit.series = opts.series;
    if (!opts.observable.empty()) apply_setting(cfg, "fit", "observable", opts.observable);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  ReportSeries series;
  try {
    const auto all = load_reports(opts.data_path, cfg.fit.data_scale);
    if (all.empty()) throw Error(ErrorCategory::Data, "data file has no rows");
    if (cfg.fit.series == "pooled") {
      series = pool(all);
    } else {
      const auto it = std::find_if(all.begin(), all.end(), [&](const ReportSeries& s) {
        return s.label == cfg.fit.series;
      });
      if (it == all.end()) {
        throw Error(ErrorCategory::Data, "no series labelled '" + cfg.fit.series + "'");
      }
      series = *it;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }

  try {
    const ObservationSet obs = to_observations(series, cfg.fit.observable);
    FitConfig fc;
    fc.iterations = cfg.fit.iterations;
    fc.adapt_interval = cfg.fit.adapt_interval;
    fc.dr_stages = cfg.fit.dr_stages;
    fc.init_params = cfg.params;
    fc.init_state = State{cfg.fit.population_scale, series.counts.front(), 0.0,
                          cfg.fit.initial_scammers, 0.0};
    fc.seed = cfg.fit.seed;
    if (cfg.fit.sample_sigma) {
      fc.error_model = SampledSigma{cfg.fit.prior_shape, cfg.fit.prior_scale};
    } else {
      fc.error_model = FixedSigma{cfg.fit.sigma2};
    }
    fc.max_step = cfg.fit.likelihood_step;
    fc.initial_proposal_scale = cfg.fit.proposal_scale;
    fc.dr_scale = cfg.fit.dr_scale;

    const Chain chain = run_dram(fc, obs, PriorBounds::defaults());
    const PosteriorSummary summary = summarize(chain, cfg.fit.burn_in);
    const auto skip = static_cast<std::size_t>(
        std::floor(cfg.fit.burn_in * static_cast<double>(chain.size())));
    const std::size_t draws = std::min(cfg.fit.predictive_draws, chain.size() - skip);
    const PredictiveBand band =
        posterior_predictive(chain, draws, fc.init_state, obs.times, obs.observable,
                             cfg.fit.seed + 1, cfg.fit.burn_in, fc.max_step);

    std::ostringstream chain_csv, summary_csv, band_csv;
    write_chain_csv(chain_csv, chain);
    write_summary_csv(summary_csv, summary);
    write_band_csv(band_csv, band);
    write_output(common, "chain.csv", chain_csv.str());
    write_output(common, "posterior_summary.csv", summary_csv.str());
    write_output(common, "predictive_band.csv", band_csv.str());

    out << "series: " << series.label << " (" << series.size() << " months)\n";
    out << "acceptance rate: " << fmt::format("{:.4f}", chain.acceptance_rate()) << '\n';
    if (chain.low_acceptance()) {
      err << "warning: acceptance rate below 1%; the proposal is likely mis-scaled\n";
    }
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e, kInferenceError);
  }
}

// ------------------------------------------------------------- sensitivity

struct SensitivityOptions {
  bool local = false;
  bool global = false;
  std::optional<std::size_t> n;
  std::optional<unsigned> threads;
  bool quiet = false;
};

int cmd_sensitivity(const CommonOptions& common, const SensitivityOptions& opts,
                    std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = build_config(common);
    if (opts.n) cfg.sensitivity.n = *opts.n;
    if (opts.threads) cfg.sensitivity.threads = *opts.threads;
    cfg.params.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const bool run_local = opts.local || !opts.global;

  if (run_local) {
    try {
      const LocalIndexSet idx = local_indices(cfg.params);
      std::ostringstream text;
      write_local_indices_csv(text, cfg.params, idx);
      write_output(common, "local_indices.csv", text.str());
      out << text.str();
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e, kConfigError);
    }
  }

  if (opts.global) {
    GlobalConfig gc;
    gc.n = cfg.sensitivity.n;
    gc.ranges = cfg.sensitivity.ranges;
    gc.fixed = cfg.params;
    gc.init = cfg.init;
    gc.horizon = cfg.sensitivity.horizon;
    gc.h = cfg.sensitivity.h;
    gc.seed = cfg.sensitivity.seed;
    gc.threads = cfg.sensitivity.threads;
    if (!opts.quiet) {
      gc.progress = [&err, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
        const std::size_t pct = done * 100 / total;
        if (pct / 10 != last / 10 || done == total) {
          err << "global sweep: " << done << "/" << total << " rows\n";
          last = pct;
        }
      };
    }
    try {
      const GlobalReport rep = global_analysis(gc);
      if (rep.scammers.degrees_of_freedom < 10) {
        err << "warning: only " << rep.scammers.degrees_of_freedom
            << " degrees of freedom; p-values are unreliable\n";
      }
      if (rep.dropped_rows > 0) {
        err << "warning: dropped " << rep.dropped_rows << " rows with failed simulations\n";
      }
      std::ostringstream text;
      write_prcc_csv(text, rep);
      write_output(common, "prcc.csv", text.str());
      out << "df = " << rep.scammers.degrees_of_freedom << ", dropped rows = " << rep.dropped_rows
          << '\n'
          << text.str();
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e, kConfigError);
    }
  }
  return kSuccess;
}

// -------------------------------------------------------------- synthesize

struct SynthesizeOptions {
  std::size_t months = 51;
  double noise_sd = 0.0;
  std::string observable = "prevalence";
  std::string start = "2021-01";
  std::string label = "synthetic";
};

int cmd_synthesize(const CommonOptions& common, const SynthesizeOptions& opts,
                   std::ostream& out, std::ostream& err) {
  SyntheticSpec spec;
  try {
    const RunConfig cfg = build_config(common);
    spec.true_params = cfg.params;
    spec.init = cfg.init;
    spec.months = opts.months;
    spec.noise_sd = opts.noise_sd;
    spec.seed = common.seed.value_or(42);
    spec.label = opts.label;
    if (opts.label.empty() || opts.label.find(',') != std::string::npos) {
      throw ConfigError("label must be non-empty and contain no commas");
    }
    if (opts.observable == "prevalence") spec.observable = Observable::Prevalence;
    else if (opts.observable == "incidence") spec.observable = Observable::Incidence;
    else throw ConfigError("observable must be prevalence or incidence");
    spec.start = YearMonth::parse(opts.start);
    spec.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const ReportSeries series = generate_synthetic(spec);
    std::ostringstream text;
    write_reports(text, std::span<const ReportSeries>(&series, 1));
    write_output(common, "synthetic.csv", text.str());
    out << "synthetic.csv: " << series.size() << " months\n";
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e, kSimulationError);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scam propagation model: simulation, stability, calibration and sensitivity"};
  app.name("scamdyn");
  app.require_subcommand(1);

  CommonOptions common;

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the model and write a trajectory");
  simulate_cmd->set_help_flag("--help", "Print this help message and exit");
  add_common(simulate_cmd, common);
  SimulateOptions sim_opts;
  simulate_cmd->add_option("--h", sim_opts.h, "Step size in days");
  simulate_cmd->add_option("--t-end", sim_opts.t_end, "Horizon in days");
  simulate_cmd->add_option("--scheme", sim_opts.scheme, "nsfd or reference");
  simulate_cmd->add_option("--sweep", sim_opts.sweep, "param=v1,v2,... one run per value");

  auto* stability_cmd = app.add_subcommand("stability", "R0 and scam-free equilibrium stability");
  add_common(stability_cmd, common);
  std::optional<double> population;
  stability_cmd->add_option("--population", population, "N used in R0 (default: N(0))");

  auto* fit_cmd = app.add_subcommand("fit", "Calibrate the rates to a report series");
  add_common(fit_cmd, common);
  FitOptions fit_opts;
  fit_cmd->add_option("--data", fit_opts.data_path, "Report CSV")->required();
  fit_cmd->add_option("--iterations", fit_opts.iterations, "Chain length");
  fit_cmd->add_option("--series", fit_opts.series, "Province label, or 'pooled'");
  fit_cmd->add_option("--observable", fit_opts.observable, "prevalence or incidence");

  auto* sens_cmd = app.add_subcommand("sensitivity", "Local indices of R0 and global PRCC");
  add_common(sens_cmd, common);
  SensitivityOptions sens_opts;
  sens_cmd->add_flag("--local", sens_opts.local, "Normalized local indices of R0");
  sens_cmd->add_flag("--global", sens_opts.global, "LHS + PRCC sweep of the burdens");
  sens_cmd->add_option("--n", sens_opts.n, "Number of LHS samples");
  sens_cmd->add_option("--threads", sens_opts.threads, "Worker threads (0: all cores)");
  sens_cmd->add_flag("--quiet", sens_opts.quiet, "No progress output");

  auto* synth_cmd = app.add_subcommand("synthesize", "Generate a synthetic report series");
  add_common(synth_cmd, common);
  SynthesizeOptions synth_opts;
  synth_cmd->add_option("--months", synth_opts.months, "Number of months");
  synth_cmd->add_option("--noise-sd", synth_opts.noise_sd, "Gaussian noise sd");
  synth_cmd->add_option("--observable", synth_opts.observable, "prevalence or incidence");
  synth_cmd->add_option("--start", synth_opts.start, "First month, YYYY-MM");
  synth_cmd->add_option("--label", synth_opts.label, "Province column value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (*simulate_cmd) return cmd_simulate(common, sim_opts, out, err);
  if (*stability_cmd) return cmd_stability(common, population, out, err);
  if (*fit_cmd) return cmd_fit(common, fit_opts, out, err);
  if (*sens_cmd) return cmd_sensitivity(common, sens_opts, out, err);
  return cmd_synthesize(common, synth_opts, out, err);
}

}  // namespace scamdyn::cli
