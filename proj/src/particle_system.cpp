#include "hlpt/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hlpt {

namespace {

constexpr long long kNoNeighbour = std::numeric_limits<long long>::max();

// Core cascade on the first n_live entries of pos: particle `i` is active,
// `cont` is the geometric continuation parameter. A landing strictly inside a
// gap ends the chain; landing on the right neighbour's site transfers the
// activation. The particle at index n_live-1 has no right neighbour and takes
// an untruncated flight. Returns the index of the last particle moved.
std::size_t cascade(std::vector<long long>& pos, std::size_t n_live,
                    std::size_t i, double neg_inv_log, Rng& rng,
                    long long* max_depth) {
  long long depth = 0;
  for (;;) {
    ++depth;
    const long long gap =
        (i + 1 < n_live) ? pos[i + 1] - pos[i] : kNoNeighbour;
    const long long g = rng.geometric(neg_inv_log);
    if (g < gap || gap == kNoNeighbour) {
      pos[i] += g;
      break;
    }
    pos[i] = pos[i + 1];  // take the neighbour's site, neighbour wakes up
    ++i;
  }
  if (max_depth && depth > *max_depth) *max_depth = depth;
  return i;
}

}  // namespace

void validate(const ModelParams& params) {
  if (!(params.b > 0.0 && params.b < 1.0))
    throw std::invalid_argument("ModelParams.b must lie in (0,1)");
}

void validate(const InitialCondition& ic) {
  if (const auto* s = std::get_if<Step>(&ic)) {
    if (s->L < 1) throw std::invalid_argument("Step.L must be >= 1");
  } else if (const auto* sb = std::get_if<StepBernoulli>(&ic)) {
    if (!(sb->rho > 0.0 && sb->rho <= 1.0))
      throw std::invalid_argument("StepBernoulli.rho must lie in (0,1]");
    if (sb->L < 1) throw std::invalid_argument("StepBernoulli.L must be >= 1");
  } else {
    const auto& e = std::get<Explicit>(ic);
    if (e.positions.empty())
      throw std::invalid_argument("Explicit.positions must be non-empty");
    long long prev = -1;
    for (long long p : e.positions) {
      if (p <= prev)
        throw std::invalid_argument(
            "Explicit.positions must be strictly increasing and >= 0");
      prev = p;
    }
  }
}

bool Configuration::ordered() const {
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (positions[i] <= positions[i - 1]) return false;
  return positions.empty() || positions.front() >= 0;
}

Configuration sample_initial(const ModelParams& params,
                             const InitialCondition& ic, Rng& rng) {
  validate(params);
  validate(ic);
  Configuration config;
  if (const auto* s = std::get_if<Step>(&ic)) {
    config.positions.resize(static_cast<std::size_t>(s->L) + 1);
    for (long long x = 0; x <= s->L; ++x)
      config.positions[static_cast<std::size_t>(x)] = x;
  } else if (const auto* sb = std::get_if<StepBernoulli>(&ic)) {
    for (long long x = 0; x <= sb->L; ++x)
      if (sb->rho >= 1.0 || rng.uniform() < sb->rho)
        config.positions.push_back(x);
  } else {
    config.positions = std::get<Explicit>(ic).positions;
  }
  if (config.positions.empty())
    throw EmptyStateError("initial configuration came up empty");
  return config;
}

void activate(Configuration& config, std::size_t index, double b, Rng& rng) {
  if (index >= config.positions.size())
    throw std::out_of_range("activate: particle index out of range");
  const std::size_t last =
      cascade(config.positions, config.positions.size(), index,
              -1.0 / std::log(b), rng, &config.max_cascade_depth);
  if (last + 1 == config.positions.size()) config.boundary_touched = true;
}

void step(Configuration& config, double b, Rng& rng) {
  const std::size_t n = config.positions.size();
  if (n == 0) throw EmptyStateError("step: no particles");
  config.time += rng.exponential(static_cast<double>(n));
  ++config.clock_rings;
  activate(config, rng.below(n), b, rng);
}

void run_until(Configuration& config, double b, double t_end, Rng& rng) {
  if (t_end < config.time)
    throw std::invalid_argument("run_until: t_end precedes current time");
  const std::size_t n = config.positions.size();
  if (n == 0) throw EmptyStateError("run_until: no particles");
  const double inv_log_b = -1.0 / std::log(b);
  for (;;) {
    const double hold = rng.exponential(static_cast<double>(n));
    if (config.time + hold > t_end) break;
    config.time += hold;
    ++config.clock_rings;
    const std::size_t last = cascade(config.positions, n, rng.below(n),
                                     inv_log_b, rng, &config.max_cascade_depth);
    if (last + 1 == n) config.boundary_touched = true;
  }
  config.time = t_end;
}

long long height(const Configuration& config, long long x) {
  return height_of(config.positions, x);
}

long long height_of(const std::vector<long long>& sorted_positions,
                    long long x) {
  return static_cast<long long>(
      std::upper_bound(sorted_positions.begin(), sorted_positions.end(), x) -
      sorted_positions.begin());
}

namespace {

// Shared reservoir event loop: advances `config` to t_end with arrivals at
// rate tau entering as active particles whose gap is measured from site -1.
void influx_segment(Configuration& config, double b, double tau,
                    long long window, double t_end, Rng& rng) {
  const double inv_log_b = -1.0 / std::log(b);
  auto& pos = config.positions;
  auto drop_escapee = [&](std::size_t moved) {
    if (moved + 1 == pos.size() && !pos.empty() && pos.back() > window) {
      pos.pop_back();
      config.boundary_touched = true;
    }
  };
  for (;;) {
    const double total_rate = static_cast<double>(pos.size()) + tau;
    const double hold = rng.exponential(total_rate);
    if (config.time + hold > t_end) break;
    config.time += hold;
    ++config.clock_rings;
    if (rng.uniform() * total_rate < tau) {
      // Arrival: active particle whose gap is measured from site -1.
      const long long gap = pos.empty() ? kNoNeighbour : pos[0] + 1;
      const long long g = rng.geometric(inv_log_b);
      if (g < gap || gap == kNoNeighbour) {
        pos.insert(pos.begin(), -1 + g);
        drop_escapee(0);
      } else {
        pos.insert(pos.begin(), pos[0]);  // takes site pos[0], occupant moves
        const std::size_t moved = cascade(pos, pos.size(), 1, inv_log_b, rng,
                                          &config.max_cascade_depth);
        drop_escapee(moved);
      }
    } else {
      const std::size_t moved =
          cascade(pos, pos.size(), rng.below(pos.size()), inv_log_b, rng,
                  &config.max_cascade_depth);
      drop_escapee(moved);
    }
  }
  config.time = t_end;
}

Configuration influx_initial(const ModelParams& params, double rho,
                             long long window, Rng& rng) {
  validate(params);
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("run_with_influx: rho must lie in (0,1)");
  if (window < 1) throw std::invalid_argument("run_with_influx: window < 1");
  Configuration config;
  for (long long x = 0; x <= window; ++x)
    if (rng.uniform() < rho) config.positions.push_back(x);
  return config;
}

}  // namespace

Configuration run_with_influx(const ModelParams& params, double rho,
                              double t_end, long long window, Rng& rng) {
  Configuration config = influx_initial(params, rho, window, rng);
  const double tau = rho / (1.0 - rho) / (1.0 - params.b);
  influx_segment(config, params.b, tau, window, t_end, rng);
  return config;
}

void run_with_influx_snapshots(
    const ModelParams& params, double rho, const std::vector<double>& times,
    long long window, Rng& rng,
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot) {
  Configuration config = influx_initial(params, rho, window, rng);
  const double tau = rho / (1.0 - rho) / (1.0 - params.b);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < config.time)
      throw std::invalid_argument("run_with_influx_snapshots: times not increasing");
    influx_segment(config, params.b, tau, window, times[k], rng);
    on_snapshot(k, config);
  }
}

void six_vertex_step(Configuration& config, const SixVertexParams& sv,
                     Rng& rng) {
  // b1 in [0,1] closed: b1=1 is the identity map, b1=0 moves every particle.
  if (!(sv.b1 >= 0.0 && sv.b1 <= 1.0) || !(sv.b2 > 0.0 && sv.b2 < 1.0))
    throw std::invalid_argument("SixVertexParams: need b1 in [0,1], b2 in (0,1)");
  auto& pos = config.positions;
  const double inv_log_b2 = -1.0 / std::log(sv.b2);
  std::size_t i = 0;
  while (i < pos.size()) {
    if (sv.b1 >= 1.0 || (sv.b1 > 0.0 && rng.uniform() < sv.b1)) {
      ++i;  // stays put
      continue;
    }
    const std::size_t last = cascade(pos, pos.size(), i, inv_log_b2, rng,
                                     &config.max_cascade_depth);
    if (last + 1 == pos.size()) config.boundary_touched = true;
    i = last + 1;  // displaced particles consumed their turn
  }
  config.time += 1.0;
}

WindowResult run_window(std::vector<long long> initial, double b,
                        long long window, double t_end, Rng& rng) {
  WindowResult result;
  result.live = std::move(initial);
  auto& pos = result.live;
  while (!pos.empty() && pos.back() > window) pos.pop_back();
  const double inv_log_b = -1.0 / std::log(b);
  double t = 0.0;
  while (!pos.empty()) {
    const double hold = rng.exponential(static_cast<double>(pos.size()));
    if (t + hold > t_end) break;
    t += hold;
    ++result.clock_rings;
    const std::size_t last =
        cascade(pos, pos.size(), rng.below(pos.size()), inv_log_b, rng,
                &result.max_cascade_depth);
    if (last + 1 == pos.size() && pos.back() > window) {
      pos.pop_back();
      result.boundary_touched = true;
    }
  }
  result.time = t_end;
  return result;
}

void run_window_snapshots(
    std::vector<long long> initial, double b, long long window,
    const std::vector<double>& times, Rng& rng,
    const std::function<void(std::size_t, const WindowResult&)>& on_snapshot) {
  WindowResult state;
  state.live = std::move(initial);
  auto& pos = state.live;
  while (!pos.empty() && pos.back() > window) pos.pop_back();
  const double inv_log_b = -1.0 / std::log(b);
  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t_end = times[k];
    if (t_end < t)
      throw std::invalid_argument("run_window_snapshots: times not increasing");
    // Segment-wise restart is exact by memorylessness of the holding times.
    while (!pos.empty()) {
      const double hold = rng.exponential(static_cast<double>(pos.size()));
      if (t + hold > t_end) break;
      t += hold;
      ++state.clock_rings;
      const std::size_t last =
          cascade(pos, pos.size(), rng.below(pos.size()), inv_log_b, rng,
                  &state.max_cascade_depth);
      if (last + 1 == pos.size() && pos.back() > window) {
        pos.pop_back();
        state.boundary_touched = true;
      }
    }
    t = t_end;
    state.time = t_end;
    on_snapshot(k, state);
  }
}

long long recommended_window(double nu, double t, double b) {
  const double nut = nu * t;
  return static_cast<long long>(
      std::ceil(nut + 10.0 * std::sqrt(nut) + t / (1.0 - b)));
}

std::string snapshot_jsonl(const Configuration& config) {
  std::ostringstream out;
  out.precision(17);
  out << "{\"time\":" << config.time << ",\"positions\":[";
  for (std::size_t i = 0; i < config.positions.size(); ++i) {
    if (i) out << ',';
    out << config.positions[i];
  }
  out << "],\"clock_rings\":" << config.clock_rings << "}";
  return out.str();
}

}  // namespace hlpt
