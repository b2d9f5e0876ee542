#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "scamdyn/model.hpp"

namespace scamdyn {

enum class Scheme { Nsfd, ReferenceRk };

std::string_view to_string(Scheme s);

/// Which scammer value feeds the removed-scammer update of the NSFD step.
/// `NextScammers` is the compact explicit form (Rs += theta lambda As_{k+1});
/// `CurrentScammers` uses As_k instead.
enum class RemovedScammerUpdate { NextScammers, CurrentScammers };

struct StepConfig {
  double h = 1.0;
  double t_end = 1520.0;
  Scheme scheme = Scheme::Nsfd;
  RemovedScammerUpdate rs_update = RemovedScammerUpdate::NextScammers;

  void validate() const;
  std::size_t steps() const;
};

/// Stored orbit. Times are k * h * stride for k = 0, 1, ...; `stride` is 1
/// unless the run exceeded kMaxStoredPoints steps.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Scheme scheme = Scheme::Nsfd;
  Parameters params;
  double h = 0.0;
  std::size_t stride = 1;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

inline constexpr std::size_t kMaxStoredPoints = 1'000'000;

/// Sum of the five rates leaving their compartments in the linear part of
/// the model: sigma + mu + gamma + lambda + psi.
double denominator_rate(const Parameters& params);

/// theta(h) = (1 - exp(-rho h)) / rho, and h itself when rho = 0.
double denominator(double h, const Parameters& params);

/// One step of the positivity-preserving nonstandard scheme with a
/// precomputed theta(h).
State nsfd_step(const State& x, const Parameters& p, double theta,
                RemovedScammerUpdate rs_update);

/// Convenience overload: computes theta(h) and uses the compact form.
State nsfd_step(const State& x, const Parameters& p, double h);

/// Classical fourth-order Runge-Kutta step on `rhs`.
State rk4_step(const State& x, const Parameters& p, double h);

/// Throws NonFiniteState if any component overflows.
Trajectory simulate(const State& init, const Parameters& params,
                    const StepConfig& cfg);

/// N(t_k) <= N(0) exp(delta t_k) (1 + 1e-9) for every stored point.
bool total_population_bound_check(const Trajectory& traj);

enum class Observable { Prevalence, Incidence };

std::string_view to_string(Observable o);

/// Runs the NSFD scheme from t = 0 and reads the observable at each of
/// `times` (strictly increasing, >= 0). Each gap between checkpoints is split
/// into ceil(gap / max_step) equal steps so that every checkpoint falls on
/// the grid.
///
/// Prevalence is V(t_k). Incidence is the number of new victims,
/// sum of theta beta S As over the steps of (t_k, t_{k+1}]; the last
/// bucket reuses the previous spacing (or kDaysPerMonth for a single time).
std::vector<double> observe(const State& init, const Parameters& params,
                            std::span<const double> times, Observable what,
                            double max_step);

inline constexpr double kDaysPerMonth = 30.44;

/// Header `t,S,V,R,As,Rs`, 17 significant digits, LF endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Reads a file produced by write_trajectory_csv. Only times and states are
/// recovered.
Trajectory read_trajectory_csv(std::istream& is);

}  // namespace scamdyn
