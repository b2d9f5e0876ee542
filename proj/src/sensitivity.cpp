#include "scamdyn/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include <Eigen/QR>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"
#include "scamdyn/stats.hpp"

namespace scamdyn {

LocalIndexSet local_indices(const Parameters& p) {
  const double victim_exit = p.gamma + p.psi;
  const double scammer_net_exit = p.mu + p.lambda - p.delta;
  if (victim_exit == 0.0) throw DegenerateDenominator("gamma + psi is zero");
  if (scammer_net_exit == 0.0) throw DegenerateDenominator("mu + lambda - delta is zero");
  return LocalIndexSet{
      .beta = 1.0,
      .psi = p.gamma / victim_exit,
      .gamma = -p.gamma / victim_exit,
      .mu = -p.mu / scammer_net_exit,
      .lambda = -p.lambda / scammer_net_exit,
      .delta = p.delta / scammer_net_exit,
  };
}

std::vector<ParameterRange> default_global_ranges() {
  return {
      {ParamId::Beta, 0.0, 0.1},  {ParamId::Gamma, 0.0, 0.1},
      {ParamId::Sigma, 0.0, 0.2}, {ParamId::Delta, 0.0, 0.1},
      {ParamId::Mu, 0.0, 0.1},    {ParamId::Lambda, 0.0, 1.0},
      {ParamId::Psi, 0.0, 0.1},
  };
}

SampleDesign lhs_sample(std::size_t n, std::vector<ParameterRange> ranges,
                        std::uint64_t seed) {
  if (n < 2) throw InvalidRange("a Latin hypercube needs n >= 2");
  if (ranges.empty()) throw InvalidRange("no parameter ranges");
  for (const auto& r : ranges) {
    if (!(r.low < r.high) || !std::isfinite(r.low) || !std::isfinite(r.high)) {
      throw InvalidRange(fmt::format("range for {} must satisfy low < high, got [{}, {}]",
                                     param_name(r.id), r.low, r.high));
    }
  }

  SampleDesign d;
  d.n = n;
  d.seed = seed;
  d.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ranges.size()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  std::vector<std::size_t> strata(n);
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const double width = ranges[j].high - ranges[j].low;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[i]) + jitter(rng)) / static_cast<double>(n);
      d.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::min(ranges[j].low + width * u, ranges[j].high);
    }
  }
  d.ranges = std::move(ranges);
  return d;
}

Burden integrate_burden(const Trajectory& traj, double horizon) {
  if (traj.empty()) throw InvalidArgument("empty trajectory");
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be >= 0");
  const double last = traj.times.back();
  if (horizon > last * (1.0 + 1e-12)) {
    throw HorizonExceedsTrajectory(
        fmt::format("horizon {} exceeds trajectory end {}", horizon, last));
  }
  Burden b;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double t0 = traj.times[k - 1];
    if (t0 >= horizon) break;
    const State& x0 = traj.states[k - 1];
    const State& x1 = traj.states[k];
    double t1 = traj.times[k];
    double as1 = x1.a_s;
    double v1 = x1.v;
    if (t1 > horizon) {
      const double w = (horizon - t0) / (t1 - t0);
      as1 = x0.a_s + w * (x1.a_s - x0.a_s);
      v1 = x0.v + w * (x1.v - x0.v);
      t1 = horizon;
    }
    const double dt = t1 - t0;
    b.scammers += 0.5 * dt * (x0.a_s + as1);
    b.victims += 0.5 * dt * (x0.v + v1);
  }
  return b;
}

std::string_view to_string(BurdenOutput o) {
  return o == BurdenOutput::AsBurden ? "AsBurden" : "VBurden";
}

const PrccEntry& PrccReport::operator[](ParamId id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw InvalidArgument(fmt::format("parameter {} not in report", param_name(id)));
}

PrccReport prcc(const SampleDesign& design, std::span<const double> outputs,
                BurdenOutput label) {
  const auto n = static_cast<std::size_t>(design.matrix.rows());
  const auto k = static_cast<std::size_t>(design.matrix.cols());
  if (outputs.size() != n) throw InvalidArgument("outputs must match design rows");
  if (k != design.ranges.size()) throw InvalidArgument("design columns and ranges differ");
  if (n < k + 2) {
    throw InvalidArgument(fmt::format("PRCC needs n >= {} for {} inputs, got {}", k + 2, k, n));
  }
  const std::size_t df = n - 2 - (k - 1);

  using Eigen::Index;
  Eigen::MatrixXd ranks(static_cast<Index>(n), static_cast<Index>(k));
  std::vector<double> column(n);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = design.matrix(static_cast<Index>(i), static_cast<Index>(j));
    }
    const auto r = stats::average_ranks(column);
    ranks.col(static_cast<Index>(j)) = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Index>(n));
  }
  const auto ry_std = stats::average_ranks(outputs);
  const Eigen::VectorXd ry = Eigen::Map<const Eigen::VectorXd>(ry_std.data(), static_cast<Index>(n));

  auto residual = [](const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                     const Eigen::MatrixXd& z, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - z * qr.solve(v);
  };

  boost::math::students_t tdist(static_cast<double>(df));
  PrccReport report;
  report.output = label;
  report.n = n;
  report.degrees_of_freedom = df;

  for (std::size_t j = 0; j < k; ++j) {
    Eigen::MatrixXd z(static_cast<Index>(n), static_cast<Index>(k));
    z.col(0).setOnes();
    Index c = 1;
    for (std::size_t other = 0; other < k; ++other) {
      if (other != j) z.col(c++) = ranks.col(static_cast<Index>(other));
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    const Eigen::VectorXd ex = residual(qr, z, ranks.col(static_cast<Index>(j)));
    const Eigen::VectorXd ey = residual(qr, z, ry);

    const double scale_x = (ranks.col(static_cast<Index>(j)).array() -
                            ranks.col(static_cast<Index>(j)).mean()).matrix().norm();
    const double scale_y = (ry.array() - ry.mean()).matrix().norm();
    if (ex.norm() <= 1e-12 * std::max(scale_x, 1.0) ||
        ey.norm() <= 1e-12 * std::max(scale_y, 1.0)) {
      throw DegenerateDesign(fmt::format(
          "residuals for {} vanish after controlling for the other inputs",
          param_name(design.ranges[j].id)));
    }
    const double ex_mean = ex.mean();
    const double ey_mean = ey.mean();
    const Eigen::ArrayXd dx = ex.array() - ex_mean;
    const Eigen::ArrayXd dy = ey.array() - ey_mean;
    double r = (dx * dy).sum() / std::sqrt(dx.square().sum() * dy.square().sum());
    r = std::clamp(r, -1.0, 1.0);

    double p = 0.0;
    if (std::abs(r) < 1.0) {
      const double t = r * std::sqrt(static_cast<double>(df) / (1.0 - r * r));
      p = 2.0 * boost::math::cdf(boost::math::complement(tdist, std::abs(t)));
      p = std::clamp(p, 0.0, 1.0);
    }
    report.entries.push_back(
        PrccEntry{design.ranges[j].id, r, p, p < kSignificanceLevel});
  }
  return report;
}

GlobalReport global_analysis(const GlobalConfig& cfg) {
  cfg.init.validate();
  cfg.fixed.validate();
  StepConfig step{.h = cfg.h, .t_end = cfg.horizon, .scheme = Scheme::Nsfd};
  step.validate();

  GlobalReport out;
  out.design = lhs_sample(cfg.n, cfg.ranges, cfg.seed);
  const std::size_t n = cfg.n;
  std::vector<std::optional<Burden>> results(n);

  auto run_row = [&](std::size_t i) -> std::optional<Burden> {
    Parameters p = cfg.fixed;
    for (std::size_t j = 0; j < out.design.ranges.size(); ++j) {
      p[out.design.ranges[j].id] =
          out.design.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    try {
      const Burden b = integrate_burden(simulate(cfg.init, p, step), cfg.horizon);
      if (!std::isfinite(b.scammers) || !std::isfinite(b.victims)) return std::nullopt;
      return b;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  unsigned workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      results[i] = run_row(i);
      if (cfg.progress) {
        std::lock_guard lock(progress_mutex);
        cfg.progress(++done, n);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<Eigen::Index> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) kept.push_back(static_cast<Eigen::Index>(i));
  }
  out.dropped_rows = n - kept.size();

  SampleDesign used = out.design;
  used.n = kept.size();
  used.matrix = out.design.matrix(kept, Eigen::all);
  std::vector<double> scammers, victims;
  for (Eigen::Index i : kept) {
    scammers.push_back(results[static_cast<std::size_t>(i)]->scammers);
    victims.push_back(results[static_cast<std::size_t>(i)]->victims);
  }
  out.scammers = prcc(used, scammers, BurdenOutput::AsBurden);
  out.victims = prcc(used, victims, BurdenOutput::VBurden);
  return out;
}

void write_local_indices_csv(std::ostream& os, const Parameters& nominal,
                             const LocalIndexSet& s) {
  struct Row {
    ParamId id;
    std::string_view description;
    double index;
  };
  const Row rows[] = {
      {ParamId::Beta, "Susceptibility rate", s.beta},
      {ParamId::Psi, "Victim defection rate", s.psi},
      {ParamId::Gamma, "Insusceptibility rate", s.gamma},
      {ParamId::Mu, "Scammer dropout rate", s.mu},
      {ParamId::Lambda, "Scammer arrest rate", s.lambda},
      {ParamId::Delta, "Scammer recruitment rate", s.delta},
  };
  os << "parameter,description,nominal_value,sensitivity_index\n";
  for (const Row& r : rows) {
    os << param_name(r.id) << ',' << r.description << ','
       << csv::format_double(nominal[r.id]) << ',' << csv::format_double(r.index) << '\n';
  }
}

void write_prcc_csv(std::ostream& os, const GlobalReport& report) {
  os << "parameter,range_low,range_high,prcc_As,p_As,prcc_V,p_V,significant_As,significant_V\n";
  for (std::size_t j = 0; j < report.design.ranges.size(); ++j) {
    const ParameterRange& r = report.design.ranges[j];
    const PrccEntry& a = report.scammers.entries[j];
    const PrccEntry& v = report.victims.entries[j];
    os << param_name(r.id) << ',' << csv::format_double(r.low) << ','
       << csv::format_double(r.high) << ',' << csv::format_double(a.coefficient) << ','
       << csv::format_double(a.p_value) << ',' << csv::format_double(v.coefficient) << ','
       << csv::format_double(v.p_value) << ',' << (a.significant ? "true" : "false") << ','
       << (v.significant ? "true" : "false") << '\n';
  }
}

}  // namespace scamdyn
