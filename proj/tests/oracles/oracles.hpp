#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls into the library beyond its plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "scamdyn/model.hpp"

namespace oracle {

inline constexpr double kBeta = 0.008425;
inline constexpr double kSigma = 0.023868;
inline constexpr double kGamma = 0.059366;
inline constexpr double kPsi = 0.000004;
inline constexpr double kDelta = 0.026109;
inline constexpr double kMu = 0.016590;
inline constexpr double kLambda = 0.016003;

inline scamdyn::Parameters table_means() {
  scamdyn::Parameters p;
  p.beta = kBeta;
  p.sigma = kSigma;
  p.gamma = kGamma;
  p.psi = kPsi;
  p.delta = kDelta;
  p.mu = kMu;
  p.lambda = kLambda;
  return p;
}

// Right-hand side written out term by term, flux by flux.
inline std::array<double, 5> rhs(const scamdyn::State& x, const scamdyn::Parameters& p) {
  const double infection = p.beta * x.s * x.a_s;
  const double loss_of_immunity = p.sigma * x.r;
  const double recovery = p.gamma * x.v;
  const double defection = p.psi * x.v;
  const double recruitment = p.delta * x.a_s;
  const double quitting = p.mu * x.a_s;
  const double arrest = p.lambda * x.a_s;
  return {
      loss_of_immunity - infection,
      infection - recovery - defection,
      recovery - loss_of_immunity,
      recruitment - quitting - arrest + defection,
      arrest,
  };
}

inline double theta(double h, const scamdyn::Parameters& p) {
  const double rho = p.sigma + p.mu + p.gamma + p.lambda + p.psi;
  if (rho == 0.0) return h;
  return (1.0 - std::exp(-rho * h)) / rho;
}

// Each implicit-in-one-variable difference equation solved for its unknown.
inline scamdyn::State nsfd_step(const scamdyn::State& x, const scamdyn::Parameters& p, double h,
                                bool rs_from_next = true) {
  const double t = theta(h, p);
  scamdyn::State y;
  // (S' - S)/t = -beta S' As + sigma R
  y.s = (x.s + t * p.sigma * x.r) / (1.0 + t * p.beta * x.a_s);
  // (V' - V)/t = beta S As - gamma V' - psi V'
  y.v = (x.v + t * p.beta * x.s * x.a_s) / (1.0 + t * p.gamma + t * p.psi);
  // (R' - R)/t = gamma V - sigma R'
  y.r = (x.r + t * p.gamma * x.v) / (1.0 + t * p.sigma);
  // (As' - As)/t = delta As - (mu + lambda) As' + psi V
  y.a_s = (x.a_s + t * p.delta * x.a_s + t * p.psi * x.v) / (1.0 + t * (p.mu + p.lambda));
  y.r_s = x.r_s + t * p.lambda * (rs_from_next ? y.a_s : x.a_s);
  return y;
}

// Spectral radius of K = F V^-1 with the 2x2 inverse written out by
// adjugate and the eigenvalues taken from trace and determinant.
inline double spectral_radius_by_hand(const scamdyn::Parameters& p, double n) {
  const double f[2][2] = {{0.0, p.beta * n}, {0.0, 0.0}};
  const double v[2][2] = {{p.gamma + p.psi, 0.0}, {-p.psi, p.mu + p.lambda - p.delta}};
  const double det_v = v[0][0] * v[1][1] - v[0][1] * v[1][0];
  const double inv[2][2] = {{v[1][1] / det_v, -v[0][1] / det_v},
                            {-v[1][0] / det_v, v[0][0] / det_v}};
  double k[2][2] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int m = 0; m < 2; ++m) k[i][j] += f[i][m] * inv[m][j];
  const double trace = k[0][0] + k[1][1];
  const double det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
  const double disc = trace * trace - 4.0 * det;
  if (disc < 0.0) return std::sqrt(det);  // complex pair, |root|^2 = det
  const double root = std::sqrt(disc);
  return std::max(std::abs(0.5 * (trace + root)), std::abs(0.5 * (trace - root)));
}

// Composite Simpson rule over equally spaced samples (odd count required;
// an even count closes the last panel with the trapezoid rule).
inline double simpson(const std::vector<double>& y, double dx) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= last; i += 2) {
    s += dx / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
  }
  if (last != n - 1) s += 0.5 * dx * (y[n - 2] + y[n - 1]);
  return s;
}

// Ranks with ties averaged, by direct counting (O(n^2)).
inline std::vector<double> ranks_by_counting(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (double v : x) {
      if (v < x[i]) less += 1.0;
      else if (v == x[i]) equal += 1.0;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Partial correlations of every input with the output from the inverse of the
// full (k+1)x(k+1) rank-correlation matrix: r_{jy.rest} = -P_jy / sqrt(P_jj P_yy).
inline std::vector<double> prcc_by_inversion(const Eigen::MatrixXd& x,
                                             const std::vector<double>& y) {
  const auto n = x.rows();
  const auto k = x.cols();
  Eigen::MatrixXd r(n, k + 1);
  for (Eigen::Index j = 0; j < k; ++j) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = x(i, j);
    const auto rk = ranks_by_counting(col);
    for (Eigen::Index i = 0; i < n; ++i) r(i, j) = rk[static_cast<std::size_t>(i)];
  }
  const auto ry = ranks_by_counting(y);
  for (Eigen::Index i = 0; i < n; ++i) r(i, k) = ry[static_cast<std::size_t>(i)];

  const Eigen::MatrixXd centered = r.rowwise() - r.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered;
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  const Eigen::MatrixXd corr = cov.cwiseQuotient(sd * sd.transpose());
  const Eigen::MatrixXd prec = corr.inverse();
  std::vector<double> out(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    out[static_cast<std::size_t>(j)] = -prec(j, k) / std::sqrt(prec(j, j) * prec(k, k));
  }
  return out;
}

}  // namespace oracle
