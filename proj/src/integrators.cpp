#include "scamdyn/integrators.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"

namespace scamdyn {

std::string_view to_string(Scheme s) {
  return s == Scheme::Nsfd ? "nsfd" : "reference";
}

std::string_view to_string(Observable o) {
  return o == Observable::Prevalence ? "prevalence" : "incidence";
}

namespace {

// Number of equal steps covering `span` with steps no longer than `h`,
// tolerant of span/h landing a rounding error above an integer.
std::size_t steps_covering(double span, double h) {
  const double ratio = span / h;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

bool all_finite(const State& x) {
  for (double c : x.to_array()) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

State axpy(const State& x, double a, const Derivative& d) {
  return State{x.s + a * d[0], x.v + a * d[1], x.r + a * d[2],
               x.a_s + a * d[3], x.r_s + a * d[4]};
}

}  // namespace

void StepConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidArgument(fmt::format("step size must be > 0, got {}", h));
  }
  if (!(t_end >= h) || !std::isfinite(t_end)) {
    throw InvalidArgument(
        fmt::format("t_end must be >= h, got t_end={} h={}", t_end, h));
  }
}

std::size_t StepConfig::steps() const { return steps_covering(t_end, h); }

double denominator_rate(const Parameters& p) {
  return p.sigma + p.mu + p.gamma + p.lambda + p.psi;
}

double denominator(double h, const Parameters& p) {
  const double rho = denominator_rate(p);
  if (rho == 0.0) return h;
  return -std::expm1(-rho * h) / rho;
}

State nsfd_step(const State& x, const Parameters& p, double theta,
                RemovedScammerUpdate rs_update) {
  State next;
  next.s = (x.s + theta * p.sigma * x.r) / (1.0 + theta * p.beta * x.a_s);
  next.v = (x.v + theta * p.beta * x.s * x.a_s) /
           (1.0 + theta * p.gamma + theta * p.psi);
  next.r = (x.r + theta * p.gamma * x.v) / (1.0 + theta * p.sigma);
  next.a_s = (x.a_s * (1.0 + theta * p.delta) + theta * p.psi * x.v) /
             (1.0 + theta * (p.mu + p.lambda));
  const double removed_from =
      rs_update == RemovedScammerUpdate::NextScammers ? next.a_s : x.a_s;
  next.r_s = x.r_s + theta * p.lambda * removed_from;
  return next;
}

State nsfd_step(const State& x, const Parameters& p, double h) {
  return nsfd_step(x, p, denominator(h, p), RemovedScammerUpdate::NextScammers);
}

State rk4_step(const State& x, const Parameters& p, double h) {
  const Derivative k1 = rhs(x, p);
  const Derivative k2 = rhs(axpy(x, 0.5 * h, k1), p);
  const Derivative k3 = rhs(axpy(x, 0.5 * h, k2), p);
  const Derivative k4 = rhs(axpy(x, h, k3), p);
  Derivative sum{};
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i] = k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i];
  }
  return axpy(x, h / 6.0, sum);
}

Trajectory simulate(const State& init, const Parameters& params,
                    const StepConfig& cfg) {
  init.validate();
  params.validate();
  cfg.validate();

  const std::size_t steps = cfg.steps();
  Trajectory traj;
  traj.scheme = cfg.scheme;
  traj.params = params;
  traj.h = cfg.h;
  traj.stride = steps > kMaxStoredPoints
                    ? (steps + kMaxStoredPoints - 1) / kMaxStoredPoints
                    : 1;
  const std::size_t stored = steps / traj.stride + 1;
  traj.times.reserve(stored);
  traj.states.reserve(stored);
  traj.times.push_back(0.0);
  traj.states.push_back(init);

  const double theta = denominator(cfg.h, params);
  State x = init;
  for (std::size_t k = 1; k <= steps; ++k) {
    x = cfg.scheme == Scheme::Nsfd ? nsfd_step(x, params, theta, cfg.rs_update)
                                   : rk4_step(x, params, cfg.h);
    const double t = static_cast<double>(k) * cfg.h;
    if (!all_finite(x)) {
      throw NonFiniteState(
          fmt::format("{} state became non-finite at t={}", to_string(cfg.scheme), t),
          t);
    }
    if (k % traj.stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
  }
  return traj;
}

bool total_population_bound_check(const Trajectory& traj) {
  if (traj.empty()) throw InvalidArgument("empty trajectory");
  const double n0 = traj.states.front().total();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double bound = n0 * std::exp(traj.params.delta * traj.times[k]) * (1.0 + 1e-9);
    if (traj.states[k].total() > bound) return false;
  }
  return true;
}

std::vector<double> observe(const State& init, const Parameters& params,
                            std::span<const double> times, Observable what,
                            double max_step) {
  init.validate();
  params.validate();
  if (!(max_step > 0.0)) throw InvalidArgument("max_step must be > 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidArgument("observation times must be >= 0 and strictly increasing");
    }
  }

  std::vector<double> checkpoints(times.begin(), times.end());
  if (what == Observable::Incidence && !times.empty()) {
    const double last_gap =
        times.size() > 1 ? times.back() - times[times.size() - 2] : kDaysPerMonth;
    checkpoints.push_back(times.back() + last_gap);
  }

  std::vector<double> out;
  out.reserve(times.size());
  State x = init;
  double t = 0.0;
  double new_victims = 0.0;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double gap = checkpoints[c] - t;
    if (gap > 0.0) {
      const std::size_t n = std::max<std::size_t>(1, steps_covering(gap, max_step));
      const double h = gap / static_cast<double>(n);
      const double theta = denominator(h, params);
      for (std::size_t k = 0; k < n; ++k) {
        new_victims += theta * params.beta * x.s * x.a_s;
        x = nsfd_step(x, params, theta, RemovedScammerUpdate::NextScammers);
      }
      if (!all_finite(x)) {
        throw NonFiniteState("state became non-finite while observing", checkpoints[c]);
      }
      t = checkpoints[c];
    }
    if (what == Observable::Prevalence) {
      out.push_back(x.v);
    } else {
      if (c > 0) out.push_back(new_victims);
      new_victims = 0.0;
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,S,V,R,As,Rs\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State& x = traj.states[k];
    os << csv::format_double(traj.times[k]) << ',' << csv::format_double(x.s) << ','
       << csv::format_double(x.v) << ',' << csv::format_double(x.r) << ','
       << csv::format_double(x.a_s) << ',' << csv::format_double(x.r_s) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,S,V,R,As,Rs") {
    throw InvalidArgument("trajectory CSV must start with header t,S,V,R,As,Rs");
  }
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 6) {
      throw InvalidArgument(fmt::format("line {}: expected 6 fields", lineno));
    }
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
      const auto parsed = csv::parse_double(fields[i]);
      if (!parsed) throw InvalidArgument(fmt::format("line {}: bad number", lineno));
      v[i] = *parsed;
    }
    traj.times.push_back(v[0]);
    traj.states.push_back(State{v[1], v[2], v[3], v[4], v[5]});
  }
  if (traj.size() > 1) traj.h = traj.times[1] - traj.times[0];
  return traj;
}

}  // namespace scamdyn
