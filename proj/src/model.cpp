#include "scamdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "scamdyn/error.hpp"

namespace scamdyn {

namespace {

constexpr std::array<std::string_view, kNumParams> kNames = {
    "beta", "sigma", "gamma", "psi", "delta", "mu", "lambda"};

}  // namespace

std::string_view param_name(ParamId id) { return kNames[index(id)]; }

std::optional<ParamId> param_from_name(std::string_view name) {
  for (ParamId id : kAllParams) {
    if (kNames[index(id)] == name) return id;
  }
  return std::nullopt;
}

double& Parameters::operator[](ParamId id) {
  switch (id) {
    case ParamId::Beta: return beta;
    case ParamId::Sigma: return sigma;
    case ParamId::Gamma: return gamma;
    case ParamId::Psi: return psi;
    case ParamId::Delta: return delta;
    case ParamId::Mu: return mu;
    case ParamId::Lambda: return lambda;
  }
  throw InvalidArgument("unknown parameter id");
}

double Parameters::operator[](ParamId id) const {
  return const_cast<Parameters&>(*this)[id];
}

std::array<double, kNumParams> Parameters::to_array() const {
  return {beta, sigma, gamma, psi, delta, mu, lambda};
}

Parameters Parameters::from_array(std::span<const double, kNumParams> v) {
  return Parameters{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

void Parameters::validate() const {
  for (ParamId id : kAllParams) {
    const double x = (*this)[id];
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(fmt::format("parameter {} must be finite and >= 0, got {}",
                                        param_name(id), x));
    }
  }
}

Parameters Parameters::posterior_means() {
  return Parameters{.beta = 0.008425,
                    .sigma = 0.023868,
                    .gamma = 0.059366,
                    .psi = 0.000004,
                    .delta = 0.026109,
                    .mu = 0.016590,
                    .lambda = 0.016003};
}

void State::validate() const {
  for (double x : to_array()) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(
          fmt::format("state components must be finite and >= 0, got {}", x));
    }
  }
}

Derivative rhs(const State& x, const Parameters& p) {
  const double infection = p.beta * x.s * x.a_s;
  return {
      -infection + p.sigma * x.r,
      infection - p.gamma * x.v - p.psi * x.v,
      p.gamma * x.v - p.sigma * x.r,
      p.delta * x.a_s - p.mu * x.a_s - p.lambda * x.a_s + p.psi * x.v,
      p.lambda * x.a_s,
  };
}

double reproduction_number(const Parameters& p, double n) {
  const double victim_exit = p.gamma + p.psi;
  const double scammer_net_exit = p.mu + p.lambda - p.delta;
  if (victim_exit == 0.0) {
    throw DegenerateDenominator("gamma + psi is zero");
  }
  if (scammer_net_exit == 0.0) {
    throw DegenerateDenominator("mu + lambda - delta is zero");
  }
  return p.beta * p.psi * n / (victim_exit * scammer_net_exit);
}

NextGenMatrices next_generation_matrix(const Parameters& p, double n) {
  NextGenMatrices out;
  out.f << 0.0, p.beta * n,
           0.0, 0.0;
  out.v << p.gamma + p.psi, 0.0,
           -p.psi, p.mu + p.lambda - p.delta;
  const double det = out.v.determinant();
  if (det == 0.0) {
    throw SingularV("V is singular: (gamma + psi)(mu + lambda - delta) = 0");
  }
  out.k = out.f * out.v.inverse();
  const Eigen::EigenSolver<Eigen::Matrix2d> solver(out.k, false);
  out.spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

std::string_view to_string(SfeStability s) {
  switch (s) {
    case SfeStability::StableSfe: return "StableSFE";
    case SfeStability::UnstableSfe: return "UnstableSFE";
    case SfeStability::Threshold: return "Threshold";
  }
  return "?";
}

StabilityReport classify_sfe_stability(const Parameters& p, double n,
                                       double tol) {
  if (p.gamma + p.psi <= 0.0) {
    throw InvalidArgument("gamma + psi must be positive");
  }
  StabilityReport rep;
  rep.p1 = -(p.gamma + p.psi);
  rep.p2 = p.delta - p.mu - p.lambda;
  const double coupling = p.beta * n * p.psi;
  // (p1 + p2)^2 - 4 (p1 p2 - coupling), written in the cancellation-free form.
  rep.discriminant = (rep.p1 - rep.p2) * (rep.p1 - rep.p2) + 4.0 * coupling;
  const double root = std::sqrt(rep.discriminant);
  rep.eigenvalues = {0.5 * (rep.p1 + rep.p2 - root),
                     0.5 * (rep.p1 + rep.p2 + root)};

  const double scammer_net_exit = p.mu + p.lambda - p.delta;
  if (scammer_net_exit == 0.0) {
    rep.r0 = coupling > 0.0 ? std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::quiet_NaN();
    rep.classification = SfeStability::UnstableSfe;
    return rep;
  }
  rep.r0 = reproduction_number(p, n);
  if (std::abs(rep.r0 - 1.0) <= tol) {
    rep.classification = SfeStability::Threshold;
  } else if (rep.r0 < 1.0 && rep.p1 + rep.p2 < 0.0 && scammer_net_exit > 0.0) {
    rep.classification = SfeStability::StableSfe;
  } else {
    rep.classification = SfeStability::UnstableSfe;
  }
  return rep;
}

double lyapunov_linear(const State& x, const Parameters& p, double a2) {
  if (p.gamma + p.psi <= 0.0) {
    throw InvalidArgument("gamma + psi must be positive");
  }
  if (!(a2 > 0.0)) throw InvalidArgument("a2 must be positive");
  const double a1 = a2 * p.psi / (p.gamma + p.psi);
  return a1 * x.v + a2 * x.a_s;
}

double lyapunov_volterra(const State& x, const State& ref) {
  const auto xs = x.to_array();
  const auto rs = ref.to_array();
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(rs[i] > 0.0)) {
      throw NonPositiveComponent(
          fmt::format("component {} must be > 0 (state {}, reference {})", i,
                      xs[i], rs[i]));
    }
    const double ratio = xs[i] / rs[i];
    total += ratio - std::log(ratio) - 1.0;
  }
  return std::max(total, 0.0);
}

double endemic_condition(const Parameters& params, double n) {
  return reproduction_number(params, n) - 1.0;
}

}  // namespace scamdyn
