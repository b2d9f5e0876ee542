#pragma once

// Bayesian calibration of the seven rates against a victim-count series:
// uniform box priors, Gaussian (sum-of-squares) likelihood, and a
// delayed-rejection adaptive Metropolis sampler.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "scamdyn/integrators.hpp"
#include "scamdyn/model.hpp"

namespace scamdyn {

/// Step used by the NSFD solve inside every likelihood evaluation.
inline constexpr double kLikelihoodStep = 0.25;

struct PriorBounds {
  Parameters lower;
  Parameters upper;

  /// The 2.5% / 97.5% posterior quantiles of the reference fit, widened to
  /// x0.5 below and x2 above.
  static PriorBounds defaults();

  bool contains(const Parameters& p) const;
  void validate() const;
};

/// Observation times in days from the start of the series and the observed
/// value at each of them.
struct ObservationSet {
  std::vector<double> times;
  std::vector<double> values;
  Observable observable = Observable::Prevalence;

  std::size_t size() const { return values.size(); }
  void validate() const;
};

/// Sum over observations of (obs_k - model_k)^2 with the model read from an
/// NSFD solve at step <= max_step.
double sum_of_squares(const Parameters& params, const State& init,
                      const ObservationSet& obs, double max_step = kLikelihoodStep);

/// -SSE / (2 sigma2) - (m / 2) ln sigma2 inside the bounds, -inf outside.
double log_posterior(const Parameters& params, double sigma2, const State& init,
                     const ObservationSet& obs, const PriorBounds& bounds,
                     double max_step = kLikelihoodStep);

struct FixedSigma {
  double sigma2 = 1.0;
};

/// Inverse-gamma prior IG(shape, scale) on the error variance, updated by a
/// conjugate Gibbs draw after every Metropolis sweep.
struct SampledSigma {
  double prior_shape = 0.5;
  double prior_scale = 0.5;
};

using ErrorModel = std::variant<FixedSigma, SampledSigma>;

/// One Metropolis decision, reported through FitConfig::on_step.
struct StepRecord {
  std::size_t iteration = 0;
  int stage = 1;
  double current_log_post = 0.0;
  double proposed_log_post = 0.0;
  double log_acceptance = 0.0;  // log of the acceptance probability used
  double log_uniform = 0.0;
  bool accepted = false;
};

struct FitConfig {
  std::size_t iterations = 10000;
  std::size_t adapt_interval = 100;
  int dr_stages = 2;
  bool adapt = true;
  Parameters init_params = Parameters::posterior_means();
  State init_state;
  std::uint64_t seed = 1;
  ErrorModel error_model = SampledSigma{};
  double max_step = kLikelihoodStep;
  /// Initial proposal sd per coordinate, as a fraction of |init_params|.
  double initial_proposal_scale = 0.01;
  /// Second-stage proposal sd relative to the first.
  double dr_scale = 0.2;
  /// Added to the adapted covariance: regularization * (upper - lower)^2.
  double regularization = 1e-12;
  std::function<void(const StepRecord&)> on_step;

  void validate() const;
};

using ParamMatrix = Eigen::Matrix<double, kNumParams, kNumParams>;

struct Chain {
  std::vector<Parameters> samples;
  std::vector<double> log_posteriors;
  std::vector<double> sigma2_samples;
  std::size_t accept_count = 0;
  ParamMatrix proposal_covariance_final = ParamMatrix::Zero();

  std::size_t size() const { return samples.size(); }
  double acceptance_rate() const;
  /// Below 1% acceptance the proposal was almost certainly mis-scaled.
  bool low_acceptance() const { return acceptance_rate() < 0.01; }
};

Chain run_dram(const FitConfig& cfg, const ObservationSet& obs,
               const PriorBounds& bounds);

struct ParamSummary {
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

struct PosteriorSummary {
  std::array<ParamSummary, kNumParams> params{};

  const ParamSummary& operator[](ParamId id) const { return params[index(id)]; }
};

/// Drops the first floor(fraction * size) samples.
PosteriorSummary summarize(const Chain& chain, double burn_in_fraction);

struct PredictiveBand {
  std::vector<double> times;
  // Solution curve only.
  std::vector<double> mean, lower, upper;
  // Solution plus Gaussian observation noise with the sampled variance.
  std::vector<double> pred_mean, pred_lower, pred_upper;
};

/// Draws n_draws distinct post-burn-in rows uniformly, simulates each and
/// reports per-time 2.5% / mean / 97.5% of the observable.
PredictiveBand posterior_predictive(const Chain& chain, std::size_t n_draws,
                                    const State& init, std::span<const double> times,
                                    Observable observable, std::uint64_t seed,
                                    double burn_in_fraction = 0.0,
                                    double max_step = kLikelihoodStep);

/// `iter,beta,sigma,gamma,psi,delta,mu,lambda,sigma2,log_post`
void write_chain_csv(std::ostream& os, const Chain& chain);
/// `parameter,posterior_mean,quantile_2.5,quantile_97.5`
void write_summary_csv(std::ostream& os, const PosteriorSummary& summary);
/// `t,mean,q2.5,q97.5,pred_mean,pred_q2.5,pred_q97.5`
void write_band_csv(std::ostream& os, const PredictiveBand& band);

}  // namespace scamdyn
