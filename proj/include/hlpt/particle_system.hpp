#pragma once
// Event-driven HL-PushTASEP on the non-negative integers, plus the discrete
// time stochastic six vertex companion chain. Particles carry rate-1 clocks;
// an activated particle takes a geometric(1-b) number of right steps, and
// landing on an occupied site transfers the activation (cascade). The global
// scheduler draws Exp(#particles) holding times and a uniform particle, which
// is distributionally identical to independent per-particle clocks.
//
// A Configuration is single-owner mutable state; nothing here shares
// mutation. Replicas run embarrassingly parallel with one RNG stream each
// (replica.hpp) and results are merged by value.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hlpt/rng.hpp"

namespace hlpt {

struct EmptyStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  double b = 0.5;          // jump-continuation parameter, 0 < b < 1
  std::uint64_t seed = 1;  // master RNG seed
};

struct Step {
  long long L = 1;  // fill every site in [0, L]
};
struct StepBernoulli {
  double rho = 1.0;  // occupation probability, 0 < rho <= 1
  long long L = 1;
};
struct Explicit {
  std::vector<long long> positions;  // strictly increasing, all >= 0
};
using InitialCondition = std::variant<Step, StepBernoulli, Explicit>;

void validate(const ModelParams& params);
void validate(const InitialCondition& ic);

struct Configuration {
  std::vector<long long> positions;  // strictly increasing, all >= 0
  double time = 0.0;
  unsigned long long clock_rings = 0;
  long long max_cascade_depth = 0;
  bool boundary_touched = false;  // a cascade moved the rightmost particle

  bool ordered() const;
};

// Draws the initial configuration at time 0. Throws EmptyStateError if no
// particle comes up (possible under StepBernoulli with small rho*L).
Configuration sample_initial(const ModelParams& params,
                             const InitialCondition& ic, Rng& rng);

// One full cascade started at the given particle. The rightmost particle has
// no right neighbour and takes an untruncated geometric flight.
void activate(Configuration& config, std::size_t index, double b, Rng& rng);

// One scheduler event: Exp(N) holding time, uniform particle, cascade.
void step(Configuration& config, double b, Rng& rng);

// Runs events until the next holding time would pass t_end, then sets
// config.time = t_end (valid by memorylessness of the exponential clock).
void run_until(Configuration& config, double b, double t_end, Rng& rng);

// Height function N_x = #{i : positions[i] <= x}.
long long height(const Configuration& config, long long x);

// Reservoir mode: Bernoulli(rho) product data on [0, window]; arrivals at
// rate tau = rho (1-rho)^{-1} (1-b)^{-1} enter as active particles whose gap
// is measured from site -1, so an arrival settles on an empty site 0 with
// probability 1-b and displaces an occupant with the usual cascade rule.
// Particles that leave the window are frozen (their clocks stop); this does
// not affect the law of the occupations inside the window.
Configuration run_with_influx(const ModelParams& params, double rho,
                              double t_end, long long window, Rng& rng);

// Same reservoir dynamics, pausing at each time in `times` (increasing) and
// handing the intermediate state to `on_snapshot(index, state)`.
void run_with_influx_snapshots(
    const ModelParams& params, double rho, const std::vector<double>& times,
    long long window, Rng& rng,
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot);

struct SixVertexParams {
  double b1 = 0.5;       // stay probability
  double b2 = 0.5;       // geometric continuation parameter
  long long steps = 1;   // number of sweeps for convenience drivers
};

// One discrete-time stochastic six vertex sweep, left to right: each particle
// stays with probability b1, otherwise moves geometric(1-b2) steps truncated
// at its right neighbour, pushing on contact. Particles displaced by a push
// have consumed their turn for this sweep.
void six_vertex_step(Configuration& config, const SixVertexParams& sv,
                     Rng& rng);

// --- fast windowed replica runner -----------------------------------------
//
// The restriction of HL-PushTASEP to [0, window] is Markov: particles beyond
// the window can never re-enter or push anything inside it, so they are
// dropped the moment they cross. Statistics of any functional of the
// occupations in [0, window] computed from the surviving particles are exact.
struct WindowResult {
  std::vector<long long> live;  // particles still <= window, increasing
  double time = 0.0;
  unsigned long long clock_rings = 0;
  long long max_cascade_depth = 0;
  bool boundary_touched = false;  // some particle crossed the window
};

WindowResult run_window(std::vector<long long> initial, double b,
                        long long window, double t_end, Rng& rng);

// Same dynamics, pausing at each time in `times` (must be increasing) and
// handing the intermediate state to `on_snapshot(index, state)`.
void run_window_snapshots(
    std::vector<long long> initial, double b, long long window,
    const std::vector<double>& times, Rng& rng,
    const std::function<void(std::size_t, const WindowResult&)>& on_snapshot);

long long height_of(const std::vector<long long>& sorted_positions,
                    long long x);

// Boundary margin under which statistics over [0, nu*t] are declared exact:
// L >= nu t + 10 sqrt(nu t) + t/(1-b).
long long recommended_window(double nu, double t, double b);

// Trajectory snapshot as one JSON line: {"time":..,"positions":[..],
// "clock_rings":..}.
std::string snapshot_jsonl(const Configuration& config);

}  // namespace hlpt
