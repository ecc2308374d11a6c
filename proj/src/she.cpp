#include "hlpt/she.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hlpt/replica.hpp"

namespace hlpt {

WeakScaling WeakScaling::make(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("WeakScaling: eps must lie in (0,1)");
  WeakScaling ws;
  ws.eps = eps;
  ws.nu_eps = (std::sqrt(5.0) - 1.0) / 2.0;
  ws.lambda_eps = std::pow(ws.nu_eps, -1.5);
  ws.b_eps = std::exp(-ws.lambda_eps * std::sqrt(eps));
  const double b = ws.b_eps;
  const double bnu = std::pow(b, ws.nu_eps);
  ws.mu_eps = (1.0 / b - 1.0) / (1.0 / bnu - 1.0) +
              (1.0 - ws.nu_eps) * std::log(b) / (1.0 - bnu);
  return ws;
}

double WeakScaling::b_nu() const { return std::pow(b_eps, nu_eps); }
double WeakScaling::frame_speed() const { return 1.0 / (1.0 - b_nu()); }
double WeakScaling::phi(double dt) const {
  const double one_minus = 1.0 - b_nu();
  return (1.0 / b_eps - 1.0) * dt / (one_minus * one_minus);
}

double LatticeField::at(double x) const {
  if (values.empty()) return 0.0;
  const double pos = x + offset - static_cast<double>(first);
  if (pos <= 0.0) return pos == 0.0 ? values.front() : 0.0;
  if (pos >= static_cast<double>(values.size() - 1)) {
    return pos == static_cast<double>(values.size() - 1) ? values.back() : 0.0;
  }
  const std::size_t i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

LatticeField gartner_transform(const std::vector<long long>& sorted_positions,
                               double t, const WeakScaling& ws,
                               long long y_max) {
  const double log_b = std::log(ws.b_eps);
  const long long floor_s =
      static_cast<long long>(std::floor(t * ws.frame_speed()));
  LatticeField f;
  f.first = -floor_s;
  f.offset = 0.0;
  f.time = t;
  f.values.resize(static_cast<std::size_t>(y_max) + 1);
  std::size_t idx = 0;  // particles consumed so far
  long long n_y = 0;
  for (long long y = 0; y <= y_max; ++y) {
    while (idx < sorted_positions.size() && sorted_positions[idx] <= y) {
      ++idx;
      ++n_y;
    }
    const double expo =
        log_b * (static_cast<double>(n_y) -
                 (1.0 - ws.nu_eps) * static_cast<double>(y)) -
        ws.mu_eps * t;
    f.values[static_cast<std::size_t>(y)] = std::exp(expo);
  }
  return f;
}

LatticeField gartner_transform(const Configuration& config,
                               const WeakScaling& ws, long long y_max) {
  return gartner_transform(config.positions, config.time, ws, y_max);
}

LatticeField heat_kernel_p(const WeakScaling& ws, double dt) {
  if (dt < 0.0) throw std::invalid_argument("heat_kernel_p: dt < 0");
  LatticeField f;
  f.first = 0;
  f.offset = ws.phi(dt);
  f.time = dt;
  if (dt == 0.0) {
    f.values = {1.0};
    return f;
  }
  const double q = ws.b_nu();
  const double lam = (1.0 / ws.b_eps - 1.0) / (1.0 - q) * dt;
  const double jump_mean = 1.0 / (1.0 - q);
  const double jump_sq = (1.0 + q) / ((1.0 - q) * (1.0 - q));
  const long long n_max =
      static_cast<long long>(lam + 12.0 * std::sqrt(lam) + 30.0);
  const long long m_max = static_cast<long long>(
      lam * jump_mean + 12.0 * std::sqrt(lam * jump_sq) + 60.0);
  f.values.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  const double log_q = std::log(q), log_1mq = std::log(1.0 - q),
               log_lam = std::log(lam);
  f.values[0] = std::exp(-lam);  // n = 0
  for (long long n = 1; n <= n_max; ++n) {
    const double log_pois =
        -lam + n * log_lam - std::lgamma(static_cast<double>(n + 1));
    if (log_pois < -46.0 - std::log1p(lam)) {
      if (n > lam) break;
      continue;
    }
    // NB(m;n) = C(m-1,n-1)(1-q)^n q^{m-n}, built by recurrence in log space.
    double log_nb = n * log_1mq;  // m = n
    for (long long m = n; m <= m_max; ++m) {
      const double le = log_pois + log_nb;
      if (le > -46.0) f.values[static_cast<std::size_t>(m)] += std::exp(le);
      log_nb += log_q + std::log(static_cast<double>(m) /
                                 static_cast<double>(m - n + 1));
    }
  }
  return f;
}

LatticeField convolve(const LatticeField& a, const LatticeField& b) {
  LatticeField c;
  c.first = a.first + b.first;
  c.offset = a.offset + b.offset;
  c.time = a.time + b.time;
  if (a.values.empty() || b.values.empty()) return c;
  c.values.assign(a.values.size() + b.values.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double av = a.values[i];
    if (av == 0.0) continue;
    for (std::size_t j = 0; j < b.values.size(); ++j)
      c.values[i + j] += av * b.values[j];
  }
  return c;
}

std::vector<double> exact_mean_field(const WeakScaling& ws, double t,
                                     long long y_max) {
  const double b = ws.b_eps, q = ws.b_nu(), mu = ws.mu_eps;
  const double rate = 1.0 / b - 1.0;
  const double log_b = std::log(b);
  const std::size_t n = static_cast<std::size_t>(y_max) + 1;
  std::vector<double> m(n);
  for (std::size_t y = 0; y < n; ++y)
    m[y] = std::exp(log_b * (1.0 + ws.nu_eps * static_cast<double>(y)));

  // dm_y/dt = rate * S_y - (1+mu) m_y + e^{-mu t} q^y,
  // S_y = sum_{k>=1} q^k m_{y-k} via the prefix recurrence S_y = q(S_{y-1} +
  // m_{y-1}). Classical RK4 with a step well under the relaxation scale.
  std::vector<double> qs(n);
  for (std::size_t y = 0; y < n; ++y)
    qs[y] = std::exp(static_cast<double>(y) * std::log(q));
  auto deriv = [&](const std::vector<double>& f, double tt,
                   std::vector<double>& df) {
    const double inh = std::exp(-mu * tt);
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      df[y] = rate * s - (1.0 + mu) * f[y] + inh * qs[y];
      s = q * (s + f[y]);
    }
  };
  const double h0 = 0.02;
  const long long steps = std::max<long long>(1, std::llround(t / h0));
  const double h = t / static_cast<double>(steps);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double tt = 0.0;
  for (long long s = 0; s < steps; ++s) {
    deriv(m, tt, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * h * k1[i];
    deriv(tmp, tt + 0.5 * h, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + 0.5 * h * k2[i];
    deriv(tmp, tt + 0.5 * h, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = m[i] + h * k3[i];
    deriv(tmp, tt + h, k4);
    for (std::size_t i = 0; i < n; ++i)
      m[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tt += h;
  }
  return m;
}

SheMeanReport she_mean_residual(const WeakScaling& ws, double t,
                                std::uint64_t replicas, std::uint64_t seed,
                                int sites) {
  if (replicas < 1000)
    throw std::invalid_argument("she_mean_residual: need >= 1e3 replicas");
  const long long floor_s =
      static_cast<long long>(std::floor(t * ws.frame_speed()));
  const long long y_hi = floor_s + sites / 2 + 2;
  const long long window = y_hi + 10;
  const std::size_t width = static_cast<std::size_t>(sites);
  const long long x_lo = -sites / 2;

  struct Acc {
    std::vector<double> sum, sumsq;
  };
  std::vector<long long> init(static_cast<std::size_t>(window) + 1);
  for (long long i = 0; i <= window; ++i)
    init[static_cast<std::size_t>(i)] = i;

  Acc total = parallel_reduce<Acc>(
      replicas, seed,
      [&](Rng& rng, Acc& acc) {
        if (acc.sum.empty()) {
          acc.sum.assign(width, 0.0);
          acc.sumsq.assign(width, 0.0);
        }
        const WindowResult r = run_window(init, ws.b_eps, window, t, rng);
        const double log_b = std::log(ws.b_eps);
        for (std::size_t i = 0; i < width; ++i) {
          const long long y = x_lo + static_cast<long long>(i) + floor_s;
          const long long n_y = height_of(r.live, y);
          const double z =
              std::exp(log_b * (static_cast<double>(n_y) -
                                (1.0 - ws.nu_eps) * static_cast<double>(y)) -
                       ws.mu_eps * t);
          acc.sum[i] += z;
          acc.sumsq[i] += z * z;
        }
      },
      [&](Acc& into, const Acc& from) {
        if (into.sum.empty()) {
          into = from;
          return;
        }
        for (std::size_t i = 0; i < width; ++i) {
          into.sum[i] += from.sum[i];
          into.sumsq[i] += from.sumsq[i];
        }
      });

  // Semigroup prediction: the drift part of the discrete SHE applied to
  // Z(0), i.e. the exact mean field (the martingale term has mean zero).
  const std::vector<double> pred = exact_mean_field(ws, t, y_hi);

  SheMeanReport rep;
  rep.window_lo = x_lo + floor_s;
  rep.window_hi = x_lo + static_cast<long long>(width) - 1 + floor_s;
  rep.mc_mean.resize(width);
  rep.predicted.resize(width);
  rep.std_err.resize(width);
  const double nrep = static_cast<double>(replicas);
  for (std::size_t i = 0; i < width; ++i) {
    const double mean = total.sum[i] / nrep;
    const double var = std::max(0.0, total.sumsq[i] / nrep - mean * mean);
    const double se = std::sqrt(var / (nrep - 1.0));
    const long long y = x_lo + static_cast<long long>(i) + floor_s;
    rep.mc_mean[i] = mean;
    rep.predicted[i] = pred[static_cast<std::size_t>(y)];
    rep.std_err[i] = se;
    if (se > 0.0)
      rep.max_std_dev = std::max(rep.max_std_dev,
                                 std::abs(mean - rep.predicted[i]) / se);
  }
  return rep;
}

KernelEstimateReport heat_kernel_estimate_check(
    const std::vector<double>& eps_grid, const std::vector<double>& dt_grid,
    double T, double v, double u) {
  KernelEstimateReport rep;
  auto run_cell = [&](double eps, double dt, bool record) {
    const WeakScaling ws = WeakScaling::make(eps);
    const LatticeField p = heat_kernel_p(ws, dt);
    double lhs1 = 0.0, lhs2 = 0.0, sup_p = 0.0;
    for (std::size_t m = 0; m < p.values.size(); ++m) {
      const double zeta = p.point(m);
      const double w = std::exp(u * eps * std::abs(zeta));
      lhs1 += p.values[m] * w;
      lhs2 += p.values[m] * std::pow(std::abs(zeta), v) * w;
      sup_p = std::max(sup_p, p.values[m]);
    }
    double holder = 0.0;
    for (long long gap : {1LL, 5LL, 25LL}) {
      for (std::size_t m = 0; m + static_cast<std::size_t>(gap) < p.values.size();
           ++m) {
        const double diff =
            std::abs(p.values[m] - p.values[m + static_cast<std::size_t>(gap)]);
        holder = std::max(
            holder, diff / std::pow(static_cast<double>(gap), v));
      }
    }
    const double shape2 = std::pow(eps, -v / 2.0) * std::pow(dt, v / 2.0);
    const double shape3 = std::sqrt(eps) * std::min(1.0, 1.0 / std::sqrt(dt));
    const double shape4 = std::pow(eps, (1.0 + v) / 2.0) *
                          std::min(1.0, std::pow(dt, -(1.0 + v) / 2.0));
    const double cs[5] = {0.0, lhs1, lhs2 / shape2, sup_p / shape3,
                          holder / shape4};
    for (int e = 1; e <= 4; ++e) {
      if (!std::isfinite(cs[e])) rep.all_finite = false;
      if (record) {
        KernelEstimateRow row;
        row.eps = eps;
        row.dt = dt;
        row.estimate = e;
        row.lhs = (e == 1) ? lhs1 : (e == 2 ? lhs2 : (e == 3 ? sup_p : holder));
        row.shape = (e == 1) ? 1.0 : (e == 2 ? shape2 : (e == 3 ? shape3 : shape4));
        row.c_emp = cs[e];
        rep.rows.push_back(row);
        rep.c_max[e] = std::max(rep.c_max[e], cs[e]);
      }
    }
    return std::array<double, 5>{0.0, cs[1], cs[2], cs[3], cs[4]};
  };

  double refined_max[5] = {0, 0, 0, 0, 0};
  for (double eps : eps_grid) {
    for (std::size_t i = 0; i < dt_grid.size(); ++i) {
      const double dt = dt_grid[i];
      if (!(dt > 0.0 && dt <= T / eps + 1e-12)) continue;
      run_cell(eps, dt, true);
      if (i + 1 < dt_grid.size()) {
        const double mid = std::sqrt(dt * dt_grid[i + 1]);
        if (mid <= T / eps + 1e-12) {
          const auto cs = run_cell(eps, mid, false);
          for (int e = 1; e <= 4; ++e)
            refined_max[e] = std::max(refined_max[e], cs[e]);
        }
      }
    }
  }
  for (int e = 1; e <= 4; ++e) {
    const double all = std::max(rep.c_max[e], refined_max[e]);
    rep.stability_ratio[e] = (rep.c_max[e] > 0.0) ? all / rep.c_max[e] : 1.0;
  }
  return rep;
}

double theorem_normalization(const WeakScaling& ws, bool sqrt_eps_inside) {
  const double arg = ws.lambda_eps * ws.nu_eps *
                     (sqrt_eps_inside ? std::sqrt(ws.eps) : 1.0);
  return (1.0 - std::exp(-arg)) / ws.eps;
}

double ContinuumField::at(double xq) const {
  if (x.empty()) return 0.0;
  if (xq <= x.front() || xq >= x.back()) {
    if (xq == x.front()) return v.front();
    if (xq == x.back()) return v.back();
    return 0.0;
  }
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return v[i - 1] * (1.0 - w) + v[i] * w;
}

ContinuumField scaled_field(const LatticeField& field, const WeakScaling& ws,
                            bool normalize) {
  ContinuumField c;
  const double norm = normalize ? theorem_normalization(ws, true) : 1.0;
  c.x.resize(field.values.size());
  c.v.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    c.x[i] = ws.eps * field.point(i);
    c.v[i] = norm * field.values[i];
  }
  return c;
}

MomentBoundReport moment_bound_check(const WeakScaling& ws, double T,
                                     std::uint64_t replicas,
                                     std::uint64_t seed) {
  std::vector<double> ts;
  for (double t = 0.25; t < T / ws.eps; t *= 2.0) ts.push_back(t);
  ts.push_back(T / ws.eps);
  const double t_max = ts.back();
  const long long window =
      static_cast<long long>(std::ceil(t_max * ws.frame_speed())) + 40;
  const int half = 10;

  std::vector<long long> init(static_cast<std::size_t>(window) + 1);
  for (long long i = 0; i <= window; ++i)
    init[static_cast<std::size_t>(i)] = i;
  const double norm = theorem_normalization(ws, true);
  const double log_b = std::log(ws.b_eps);

  struct Acc {
    std::vector<double> sumsq;  // [t][site] flattened
  };
  const std::size_t nsite = 2 * half + 1;
  Acc total = parallel_reduce<Acc>(
      replicas, seed,
      [&](Rng& rng, Acc& acc) {
        if (acc.sumsq.empty()) acc.sumsq.assign(ts.size() * nsite, 0.0);
        run_window_snapshots(
            init, ws.b_eps, window, ts, rng,
            [&](std::size_t k, const WindowResult& state) {
              const double t = ts[k];
              const long long floor_s =
                  static_cast<long long>(std::floor(t * ws.frame_speed()));
              for (std::size_t i = 0; i < nsite; ++i) {
                const long long y =
                    floor_s - half + static_cast<long long>(i);
                if (y < 0) continue;
                const long long n_y = height_of(state.live, y);
                const double z =
                    norm *
                    std::exp(log_b * (static_cast<double>(n_y) -
                                      (1.0 - ws.nu_eps) *
                                          static_cast<double>(y)) -
                             ws.mu_eps * t);
                acc.sumsq[k * nsite + i] += z * z;
              }
            });
      },
      [&](Acc& into, const Acc& from) {
        if (into.sumsq.empty()) {
          into = from;
          return;
        }
        for (std::size_t i = 0; i < into.sumsq.size(); ++i)
          into.sumsq[i] += from.sumsq[i];
      });

  MomentBoundReport rep;
  double coarse_max = 0.0, all_max = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < nsite; ++i)
      norm2 = std::max(
          norm2, std::sqrt(total.sumsq[k * nsite + i] /
                           static_cast<double>(replicas)));
    MomentBoundRow row;
    row.t = ts[k];
    row.norm2 = norm2;
    row.shape = std::min(1.0 / std::sqrt(ws.eps), 1.0 / std::sqrt(ws.eps * ts[k]));
    row.c_emp = norm2 / row.shape;
    rep.rows.push_back(row);
    all_max = std::max(all_max, row.c_emp);
    if (k % 2 == 0) coarse_max = std::max(coarse_max, row.c_emp);
  }
  rep.c_max = all_max;
  rep.stability_ratio = (coarse_max > 0.0) ? all_max / coarse_max : 1.0;
  return rep;
}

}  // namespace hlpt
