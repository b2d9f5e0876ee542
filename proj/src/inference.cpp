#include "scamdyn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"
#include "scamdyn/stats.hpp"

namespace scamdyn {

namespace {

using Vec = Eigen::Matrix<double, kNumParams, 1>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vec to_vec(const Parameters& p) {
  const auto a = p.to_array();
  return Eigen::Map<const Vec>(a.data());
}

Parameters from_vec(const Vec& v) {
  std::array<double, kNumParams> a{};
  Eigen::Map<Vec>(a.data()) = v;
  return Parameters::from_array(a);
}

double gaussian_log_post(double sse, double sigma2, std::size_t m) {
  return -sse / (2.0 * sigma2) - 0.5 * static_cast<double>(m) * std::log(sigma2);
}

// log(1 - exp(x)) for x <= 0.
double log1m_exp(double x) {
  if (x == kNegInf) return 0.0;
  if (x >= 0.0) return kNegInf;
  return x > -0.693 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace

PriorBounds PriorBounds::defaults() {
  const Parameters q025{.beta = 0.005,
                        .sigma = 0.015,
                        .gamma = 0.035,
                        .psi = 0.000001,
                        .delta = 0.015,
                        .mu = 0.010,
                        .lambda = 0.009};
  const Parameters q975{.beta = 0.012,
                        .sigma = 0.035,
                        .gamma = 0.090,
                        .psi = 0.00001,
                        .delta = 0.040,
                        .mu = 0.025,
                        .lambda = 0.025};
  PriorBounds b;
  for (ParamId id : kAllParams) {
    b.lower[id] = 0.5 * q025[id];
    b.upper[id] = 2.0 * q975[id];
  }
  return b;
}

bool PriorBounds::contains(const Parameters& p) const {
  for (ParamId id : kAllParams) {
    if (!(p[id] >= lower[id] && p[id] <= upper[id])) return false;
  }
  return true;
}

void PriorBounds::validate() const {
  for (ParamId id : kAllParams) {
    if (!(lower[id] >= 0.0 && lower[id] < upper[id]) || !std::isfinite(upper[id])) {
      throw InvalidArgument(fmt::format("prior bounds for {} must satisfy 0 <= lower < upper",
                                        param_name(id)));
    }
  }
}

void ObservationSet::validate() const {
  if (values.empty()) throw InvalidArgument("no observations");
  if (times.size() != values.size()) {
    throw InvalidArgument("observation times and values differ in length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidArgument("non-finite observation");
    if (times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidArgument("observation times must be >= 0 and strictly increasing");
    }
  }
}

double sum_of_squares(const Parameters& params, const State& init,
                      const ObservationSet& obs, double max_step) {
  const std::vector<double> model =
      observe(init, params, obs.times, obs.observable, max_step);
  double sse = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double r = obs.values[k] - model[k];
    sse += r * r;
  }
  return sse;
}

double log_posterior(const Parameters& params, double sigma2, const State& init,
                     const ObservationSet& obs, const PriorBounds& bounds,
                     double max_step) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be > 0");
  if (!bounds.contains(params)) return kNegInf;
  return gaussian_log_post(sum_of_squares(params, init, obs, max_step), sigma2,
                           obs.size());
}

void FitConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (adapt_interval < 1) throw InvalidArgument("adapt_interval must be >= 1");
  if (dr_stages != 1 && dr_stages != 2) throw InvalidArgument("dr_stages must be 1 or 2");
  if (!(max_step > 0.0)) throw InvalidArgument("max_step must be > 0");
  if (!(initial_proposal_scale > 0.0)) throw InvalidArgument("initial_proposal_scale must be > 0");
  if (!(dr_scale > 0.0 && dr_scale < 1.0)) throw InvalidArgument("dr_scale must lie in (0, 1)");
  if (!(regularization >= 0.0)) throw InvalidArgument("regularization must be >= 0");
  if (const auto* fixed = std::get_if<FixedSigma>(&error_model)) {
    if (!(fixed->sigma2 > 0.0)) throw InvalidArgument("fixed sigma2 must be > 0");
  } else {
    const auto& sampled = std::get<SampledSigma>(error_model);
    if (!(sampled.prior_shape > 0.0 && sampled.prior_scale > 0.0)) {
      throw InvalidArgument("sigma2 prior shape and scale must be > 0");
    }
  }
  init_params.validate();
  init_state.validate();
}

double Chain::acceptance_rate() const {
  return samples.empty() ? 0.0
                         : static_cast<double>(accept_count) /
                               static_cast<double>(samples.size());
}

Chain run_dram(const FitConfig& cfg, const ObservationSet& obs,
               const PriorBounds& bounds) {
  cfg.validate();
  obs.validate();
  bounds.validate();
  if (!bounds.contains(cfg.init_params)) {
    throw InvalidArgument("initial parameters lie outside the prior bounds");
  }

  const std::size_t m = obs.size();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  auto sse_of = [&](const Vec& v) {
    const Parameters p = from_vec(v);
    if (!bounds.contains(p)) return std::numeric_limits<double>::infinity();
    return sum_of_squares(p, cfg.init_state, obs, cfg.max_step);
  };

  Vec x = to_vec(cfg.init_params);
  double sse_x = sse_of(x);

  const auto* sampled = std::get_if<SampledSigma>(&cfg.error_model);
  double sigma2 = sampled ? (sampled->prior_scale + 0.5 * sse_x) /
                                (sampled->prior_shape + 0.5 * static_cast<double>(m) + 1.0)
                          : std::get<FixedSigma>(cfg.error_model).sigma2;

  auto log_post = [&](double sse) {
    return std::isfinite(sse) ? gaussian_log_post(sse, sigma2, m) : kNegInf;
  };

  Vec width = to_vec(bounds.upper) - to_vec(bounds.lower);
  ParamMatrix regularizer = (cfg.regularization * width.array().square()).matrix().asDiagonal();

  ParamMatrix cov = ParamMatrix::Zero();
  for (std::size_t i = 0; i < kNumParams; ++i) {
    double sd = cfg.initial_proposal_scale * std::abs(x(i));
    if (sd == 0.0) sd = cfg.initial_proposal_scale * width(i);
    cov(i, i) = sd * sd;
  }
  ParamMatrix chol = cov.llt().matrixL();

  // Running mean and scatter of the chain for covariance adaptation.
  Vec run_mean = Vec::Zero();
  ParamMatrix run_scatter = ParamMatrix::Zero();
  const double am_scale = 2.38 * 2.38 / static_cast<double>(kNumParams);

  Chain chain;
  chain.samples.reserve(cfg.iterations);
  chain.log_posteriors.reserve(cfg.iterations);
  chain.sigma2_samples.reserve(cfg.iterations);

  auto report = [&](std::size_t it, int stage, double lp_cur, double lp_prop,
                    double log_alpha, double log_u, bool accepted) {
    if (cfg.on_step) {
      cfg.on_step(StepRecord{it, stage, lp_cur, lp_prop, log_alpha, log_u, accepted});
    }
  };

  auto draw_z = [&]() {
    Vec z;
    for (std::size_t i = 0; i < kNumParams; ++i) z(i) = normal(rng);
    return z;
  };

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double lp_x = log_post(sse_x);

    // Stage 1.
    const Vec z1 = draw_z();
    const Vec y1 = x + chol * z1;
    const double sse_y1 = sse_of(y1);
    const double lp_y1 = log_post(sse_y1);
    const double log_a1 = std::min(0.0, lp_y1 - lp_x);
    const double log_u1 = std::log(uniform(rng));
    const bool accept1 = log_u1 < log_a1;
    report(it, 1, lp_x, lp_y1, log_a1, log_u1, accept1);

    if (accept1) {
      x = y1;
      sse_x = sse_y1;
      ++chain.accept_count;
    } else if (cfg.dr_stages == 2) {
      // Stage 2: shrunken proposal around x, Tierney-Mira acceptance.
      const Vec z2 = draw_z();
      const Vec y2 = x + cfg.dr_scale * (chol * z2);
      const double sse_y2 = sse_of(y2);
      const double lp_y2 = log_post(sse_y2);
      double log_a2 = kNegInf;
      if (lp_y2 != kNegInf) {
        const Vec back = chol.triangularView<Eigen::Lower>().solve(y1 - y2);
        const double log_q_y2_y1 = -0.5 * back.squaredNorm();
        const double log_q_x_y1 = -0.5 * z1.squaredNorm();
        const double log_a1_rev = std::min(0.0, lp_y1 - lp_y2);
        const double num = lp_y2 + log_q_y2_y1 + log1m_exp(log_a1_rev);
        const double den = lp_x + log_q_x_y1 + log1m_exp(log_a1);
        log_a2 = std::min(0.0, num - den);
      }
      const double log_u2 = std::log(uniform(rng));
      const bool accept2 = log_u2 < log_a2;
      report(it, 2, lp_x, lp_y2, log_a2, log_u2, accept2);
      if (accept2) {
        x = y2;
        sse_x = sse_y2;
        ++chain.accept_count;
      }
    }

    if (sampled) {
      const double shape = sampled->prior_shape + 0.5 * static_cast<double>(m);
      const double rate = sampled->prior_scale + 0.5 * sse_x;
      std::gamma_distribution<double> precision(shape, 1.0 / rate);
      sigma2 = 1.0 / precision(rng);
    }

    chain.samples.push_back(from_vec(x));
    chain.log_posteriors.push_back(log_post(sse_x));
    chain.sigma2_samples.push_back(sigma2);

    const double n = static_cast<double>(it + 1);
    const Vec delta = x - run_mean;
    run_mean += delta / n;
    run_scatter += delta * (x - run_mean).transpose();

    if (cfg.adapt && (it + 1) % cfg.adapt_interval == 0 && it + 1 >= 2) {
      const ParamMatrix empirical = run_scatter / (n - 1.0);
      const ParamMatrix candidate = am_scale * empirical + regularizer;
      Eigen::LLT<ParamMatrix> llt(candidate);
      if (llt.info() == Eigen::Success) {
        cov = candidate;
        chol = llt.matrixL();
      }
    }
  }
  chain.proposal_covariance_final = cov;
  return chain;
}

PosteriorSummary summarize(const Chain& chain, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw InvalidArgument("burn-in fraction must lie in [0, 1)");
  }
  const auto skip = static_cast<std::size_t>(
      std::floor(burn_in_fraction * static_cast<double>(chain.size())));
  if (skip >= chain.size()) throw EmptyChain("no samples left after burn-in");

  PosteriorSummary out;
  std::vector<double> column(chain.size() - skip);
  for (ParamId id : kAllParams) {
    for (std::size_t i = skip; i < chain.size(); ++i) column[i - skip] = chain.samples[i][id];
    out.params[index(id)] = ParamSummary{stats::mean(column), stats::quantile(column, 0.025),
                                         stats::quantile(column, 0.975)};
  }
  return out;
}

PredictiveBand posterior_predictive(const Chain& chain, std::size_t n_draws,
                                    const State& init, std::span<const double> times,
                                    Observable observable, std::uint64_t seed,
                                    double burn_in_fraction, double max_step) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw InvalidArgument("burn-in fraction must lie in [0, 1)");
  }
  const auto skip = static_cast<std::size_t>(
      std::floor(burn_in_fraction * static_cast<double>(chain.size())));
  if (skip >= chain.size() || n_draws == 0) throw EmptyChain("no samples to draw from");
  const std::size_t available = chain.size() - skip;
  if (n_draws > available) {
    throw InvalidArgument(fmt::format("n_draws={} exceeds {} post-burn-in samples",
                                      n_draws, available));
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> rows(available);
  std::iota(rows.begin(), rows.end(), skip);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(n_draws);

  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t nt = times.size();
  std::vector<std::vector<double>> curves(nt, std::vector<double>(n_draws));
  std::vector<std::vector<double>> noisy(nt, std::vector<double>(n_draws));
  for (std::size_t d = 0; d < n_draws; ++d) {
    const std::size_t row = rows[d];
    const std::vector<double> y =
        observe(init, chain.samples[row], times, observable, max_step);
    const double sd =
        row < chain.sigma2_samples.size() ? std::sqrt(chain.sigma2_samples[row]) : 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      curves[k][d] = y[k];
      noisy[k][d] = std::max(0.0, y[k] + sd * normal(rng));
    }
  }

  PredictiveBand band;
  band.times.assign(times.begin(), times.end());
  for (std::size_t k = 0; k < nt; ++k) {
    band.mean.push_back(stats::mean(curves[k]));
    band.lower.push_back(stats::quantile(curves[k], 0.025));
    band.upper.push_back(stats::quantile(curves[k], 0.975));
    band.pred_mean.push_back(stats::mean(noisy[k]));
    band.pred_lower.push_back(stats::quantile(noisy[k], 0.025));
    band.pred_upper.push_back(stats::quantile(noisy[k], 0.975));
  }
  return band;
}

void write_chain_csv(std::ostream& os, const Chain& chain) {
  os << "iter,beta,sigma,gamma,psi,delta,mu,lambda,sigma2,log_post\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    os << i + 1;
    for (double v : chain.samples[i].to_array()) os << ',' << csv::format_double(v);
    os << ',' << csv::format_double(chain.sigma2_samples[i]) << ','
       << csv::format_double(chain.log_posteriors[i]) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const PosteriorSummary& summary) {
  os << "parameter,posterior_mean,quantile_2.5,quantile_97.5\n";
  for (ParamId id : kAllParams) {
    const ParamSummary& s = summary[id];
    os << param_name(id) << ',' << csv::format_double(s.mean) << ','
       << csv::format_double(s.q025) << ',' << csv::format_double(s.q975) << '\n';
  }
}

void write_band_csv(std::ostream& os, const PredictiveBand& band) {
  os << "t,mean,q2.5,q97.5,pred_mean,pred_q2.5,pred_q97.5\n";
  for (std::size_t k = 0; k < band.times.size(); ++k) {
    os << csv::format_double(band.times[k]) << ',' << csv::format_double(band.mean[k])
       << ',' << csv::format_double(band.lower[k]) << ','
       << csv::format_double(band.upper[k]) << ',' << csv::format_double(band.pred_mean[k])
       << ',' << csv::format_double(band.pred_lower[k]) << ','
       << csv::format_double(band.pred_upper[k]) << '\n';
  }
}

}  // namespace scamdyn
