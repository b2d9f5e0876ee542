#pragma once

// Five-compartment scam propagation model: susceptible (S), victims (V),
// recovered victims (R), active scammers (As) and removed scammers (Rs).
//
//   dS/dt  = -beta S As + sigma R
//   dV/dt  =  beta S As - (gamma + psi) V
//   dR/dt  =  gamma V - sigma R
//   dAs/dt =  (delta - mu - lambda) As + psi V
//   dRs/dt =  lambda As

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace scamdyn {

enum class ParamId : std::size_t { Beta, Sigma, Gamma, Psi, Delta, Mu, Lambda };

inline constexpr std::size_t kNumParams = 7;

inline constexpr std::array<ParamId, kNumParams> kAllParams = {
    ParamId::Beta,  ParamId::Sigma, ParamId::Gamma, ParamId::Psi,
    ParamId::Delta, ParamId::Mu,    ParamId::Lambda};

constexpr std::size_t index(ParamId id) { return static_cast<std::size_t>(id); }

/// Lower-case ASCII name ("beta", "sigma", ...), as used in CSV headers and
/// config keys.
std::string_view param_name(ParamId id);
std::optional<ParamId> param_from_name(std::string_view name);

/// The seven nonnegative transition rates, all per day (beta is per
/// individual per day).
struct Parameters {
  double beta = 0.0;    // S -> V per active scammer
  double sigma = 0.0;   // R -> S
  double gamma = 0.0;   // V -> R
  double psi = 0.0;     // V -> As
  double delta = 0.0;   // scammer recruitment
  double mu = 0.0;      // scammers quitting
  double lambda = 0.0;  // scammer arrest, As -> Rs

  double& operator[](ParamId id);
  double operator[](ParamId id) const;

  std::array<double, kNumParams> to_array() const;
  static Parameters from_array(std::span<const double, kNumParams> values);

  /// Throws InvalidArgument unless every rate is finite and >= 0.
  void validate() const;

  /// Posterior means of the fit to the monthly Canadian report series.
  static Parameters posterior_means();

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

struct State {
  double s = 0.0;
  double v = 0.0;
  double r = 0.0;
  double a_s = 0.0;
  double r_s = 0.0;

  double total() const { return s + v + r + a_s + r_s; }
  std::array<double, 5> to_array() const { return {s, v, r, a_s, r_s}; }

  /// Throws InvalidArgument unless every component is finite and >= 0.
  void validate() const;

  static State scam_free(double n) { return State{n, 0.0, 0.0, 0.0, 0.0}; }

  friend bool operator==(const State&, const State&) = default;
};

using Derivative = std::array<double, 5>;

Derivative rhs(const State& state, const Parameters& params);

/// beta psi N / ((gamma + psi)(mu + lambda - delta)). Signed: a negative
/// value means scammer recruitment outpaces removal.
double reproduction_number(const Parameters& params, double n);

struct NextGenMatrices {
  Eigen::Matrix2d f;
  Eigen::Matrix2d v;
  Eigen::Matrix2d k;  // F V^-1
  double spectral_radius = 0.0;
};

/// Builds F and V for the (V, As) infected subsystem at the scam-free
/// equilibrium and takes the spectral radius of K numerically.
NextGenMatrices next_generation_matrix(const Parameters& params, double n);

enum class SfeStability { StableSfe, UnstableSfe, Threshold };

std::string_view to_string(SfeStability s);

struct StabilityReport {
  double r0 = 0.0;
  double p1 = 0.0;  // -(gamma + psi)
  double p2 = 0.0;  // delta - mu - lambda
  double discriminant = 0.0;
  std::array<double, 2> eigenvalues{};  // ascending
  SfeStability classification = SfeStability::UnstableSfe;
};

inline constexpr double kThresholdTolerance = 1e-9;

StabilityReport classify_sfe_stability(const Parameters& params, double n,
                                       double tol = kThresholdTolerance);

/// L = a2 (psi / (gamma + psi)) V + a2 As.
double lyapunov_linear(const State& state, const Parameters& params,
                       double a2 = 1.0);

/// Volterra function sum_i (x_i / x*_i - ln(x_i / x*_i) - 1). Every
/// component of both states must be strictly positive.
double lyapunov_volterra(const State& state, const State& reference);

/// R0 - 1: negative in the scam-free regime, positive in the endemic one.
double endemic_condition(const Parameters& params, double n);

}  // namespace scamdyn
