#include "hlpt/exact_formulas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>

#include "hlpt/fredholm.hpp"  // q_binomial, ConvergenceError

namespace hlpt {

namespace {

constexpr double kPi = std::numbers::pi;

double log_binom(long long n, long long k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

Cplx ipow(Cplx z, long long e) {
  if (e < 0) return 1.0 / ipow(z, -e);
  Cplx r = 1.0;
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

// All permutations of {0..n-1} with signs.
struct Perms {
  std::vector<std::vector<int>> perm;
  std::vector<double> sign;
};

Perms make_perms(int n) {
  Perms p;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (idx[i] > idx[j]) ++inversions;
    p.perm.push_back(idx);
    p.sign.push_back(inversions % 2 == 0 ? 1.0 : -1.0);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return p;
}

}  // namespace

double single_particle_pmf(double t, long long k, double b) {
  if (t < 0.0 || k < 0) throw std::invalid_argument("single_particle_pmf");
  if (k == 0) return std::exp(-t);
  if (t == 0.0) return 0.0;
  const double log_t = std::log(t);
  double sum = 0.0;
  for (long long n = 1; n <= k; ++n) {
    const double lg = -t + n * log_t - std::lgamma(static_cast<double>(n + 1)) +
                      log_binom(k - 1, n - 1) + n * std::log(1.0 - b) +
                      (k - n) * std::log(b);
    sum += std::exp(lg);
  }
  return sum;
}

// --- master equation ---------------------------------------------------------

namespace {

struct Generator {
  std::vector<std::vector<long long>> states;
  std::unordered_map<long long, int> index;
  std::vector<std::vector<std::pair<int, double>>> to;  // per-source arcs
  std::vector<double> leak_rate;
  long long bound;
  int n;

  long long key(const std::vector<long long>& s) const {
    long long k = 0;
    for (long long v : s) k = k * (bound + 1) + v;
    return k;
  }
};

Generator build_generator(int n, long long bound, double b) {
  Generator g;
  g.bound = bound;
  g.n = n;
  std::vector<long long> s(n);
  // Enumerate ordered tuples 0 <= s_0 < ... < s_{n-1} <= bound.
  auto rec = [&](auto&& self, int depth, long long lo) -> void {
    if (depth == n) {
      g.index.emplace(g.key(s), static_cast<int>(g.states.size()));
      g.states.push_back(s);
      return;
    }
    for (long long v = lo; v <= bound - (n - 1 - depth); ++v) {
      s[static_cast<std::size_t>(depth)] = v;
      self(self, depth + 1, v + 1);
    }
  };
  rec(rec, 0, 0);

  g.to.resize(g.states.size());
  g.leak_rate.assign(g.states.size(), 0.0);
  std::vector<long long> y;
  for (std::size_t si = 0; si < g.states.size(); ++si) {
    for (int m = 0; m < n; ++m) {
      // One cascade tree rooted at particle m.
      y = g.states[si];
      double pref = 1.0;
      int i = m;
      for (;;) {
        if (i + 1 < n) {
          const long long gap = y[i + 1] - y[i];
          double pj = (1.0 - b);  // (1-b) b^{j-1}
          const long long yi = y[i];
          for (long long j = 1; j < gap; ++j) {
            y[i] = yi + j;
            g.to[si].emplace_back(g.index.at(g.key(y)), pref * pj);
            pj *= b;
          }
          y[i] = y[i + 1];
          pref *= std::pow(b, static_cast<double>(gap - 1));
          ++i;
        } else {
          const long long room = g.bound - y[i];
          double pj = (1.0 - b);
          const long long yi = y[i];
          for (long long j = 1; j <= room; ++j) {
            y[i] = yi + j;
            g.to[si].emplace_back(g.index.at(g.key(y)), pref * pj);
            pj *= b;
          }
          y[i] = yi;
          g.leak_rate[si] += pref * std::pow(b, static_cast<double>(room));
          break;
        }
      }
    }
  }
  return g;
}

// Dormand-Prince 5(4) with PI-free step control; fine for this mildly sized
// non-stiff system.
void dp54(const std::function<void(const std::vector<double>&,
                                   std::vector<double>&)>& deriv,
          std::vector<double>& y, double t_end, double tol) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
      k7(dim), tmp(dim), y5(dim);
  double t = 0.0, h = std::min(0.05, t_end);
  while (t < t_end) {
    h = std::min(h, t_end - t);
    deriv(y, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    deriv(tmp, k3);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    deriv(tmp, k4);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    deriv(tmp, k5);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    deriv(tmp, k6);
    for (std::size_t i = 0; i < dim; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    deriv(y5, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e) / (tol + tol * std::abs(y5[i])));
    }
    if (err <= 1.0) {
      t += h;
      y.swap(y5);
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h = std::max(h * fac, 1e-9);
  }
}

}  // namespace

double MasterEquationResult::prob_of(const std::vector<long long>& state) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == state) return prob[i];
  return 0.0;
}

std::vector<double> MasterEquationResult::marginal(std::size_t particle) const {
  std::vector<double> m(static_cast<std::size_t>(bound) + 1, 0.0);
  for (std::size_t i = 0; i < states.size(); ++i)
    m[static_cast<std::size_t>(states[i][particle])] += prob[i];
  return m;
}

MasterEquationResult master_equation_pmf(const std::vector<long long>& init,
                                         double t, long long bound, double b,
                                         double leak_tol) {
  const int n = static_cast<int>(init.size());
  if (n < 1 || n > 3)
    throw std::invalid_argument("master_equation_pmf: N must be 1..3");
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("master_equation: b");
  for (int i = 0; i < n; ++i) {
    if (init[i] < 0 || (i > 0 && init[i] <= init[i - 1]))
      throw std::invalid_argument("master_equation: init not ordered");
  }
  if (init.back() > bound)
    throw std::invalid_argument("master_equation: init beyond bound");

  Generator g = build_generator(n, bound, b);
  std::vector<double> p(g.states.size() + 1, 0.0);  // last entry: leak
  p[static_cast<std::size_t>(g.index.at(g.key(init)))] = 1.0;

  if (t > 0.0) {
    auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
      std::fill(dy.begin(), dy.end(), 0.0);
      for (std::size_t s = 0; s < g.states.size(); ++s) {
        const double ps = y[s];
        if (ps == 0.0) continue;
        double out = g.leak_rate[s];
        for (const auto& [to, rate] : g.to[s]) {
          dy[static_cast<std::size_t>(to)] += rate * ps;
          out += rate;
        }
        dy[s] -= out * ps;
        dy.back() += g.leak_rate[s] * ps;
      }
    };
    dp54(deriv, p, t, 1e-12);
  }

  MasterEquationResult res;
  res.bound = bound;
  res.n_particles = static_cast<std::size_t>(n);
  res.states = std::move(g.states);
  res.leak = p.back();
  p.pop_back();
  res.prob = std::move(p);
  if (res.leak > leak_tol) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "master_equation_pmf: leaked mass %.3e exceeds tolerance "
                  "%.1e; retry with bound >= %lld",
                  res.leak, leak_tol, bound + bound / 2 + 8);
    throw BoundError(msg);
  }
  return res;
}

// --- Bethe eigenfunctions ------------------------------------------------------

void validate_bethe(const std::vector<Cplx>& z, double b) {
  for (const Cplx& zi : z)
    if (!(std::abs(b * zi) < 1.0))
      throw std::invalid_argument("BetheVector: |b z_i| must be < 1");
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j)
      if (i != j &&
          std::abs(1.0 - (1.0 + b) * z[i] + b * z[i] * z[j]) < 1e-10)
        throw std::invalid_argument(
            "BetheVector: A_sigma denominator vanishes within 1e-10");
}

Cplx bethe_phi(const std::vector<long long>& x, const std::vector<Cplx>& z,
               double b) {
  const int n = static_cast<int>(z.size());
  const Perms perms = make_perms(n);
  Cplx denom = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      denom *= 1.0 - (1.0 + b) * z[i] + b * z[i] * z[j];
  Cplx sum(0.0);
  for (std::size_t s = 0; s < perms.perm.size(); ++s) {
    const auto& sig = perms.perm[s];
    Cplx numer = 1.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        numer *= 1.0 - (1.0 + b) * z[sig[i]] + b * z[sig[i]] * z[sig[j]];
    Cplx mono = 1.0;
    for (int i = 0; i < n; ++i) mono *= ipow(z[sig[i]], x[i]);
    sum += perms.sign[s] * numer / denom * mono;
  }
  return sum;
}

ResidualResult eigenfunction_residual(const std::vector<Cplx>& z,
                                      const std::vector<long long>& x,
                                      double b, long long trunc) {
  validate_bethe(z, b);
  const int n = static_cast<int>(z.size());
  if (n < 1 || n > 3)
    throw std::invalid_argument("eigenfunction_residual: N must be 1..3");

  const Cplx phi_x = bethe_phi(x, z, b);
  Cplx lhs(0.0);
  double zm = 0.0;
  for (const Cplx& zi : z) zm = std::max(zm, std::abs(zi));
  double tail_bound = 0.0;

  // |Phi(y)| <= (sum |A_sigma|) zm^{sum y_i}; crude but enough for the
  // reported truncation bound (q = b zm < 1).
  const Perms perms = make_perms(n);
  double asum = 0.0;
  {
    Cplx denom = 1.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        denom *= 1.0 - (1.0 + b) * z[i] + b * z[i] * z[j];
    for (std::size_t s = 0; s < perms.perm.size(); ++s) {
      const auto& sig = perms.perm[s];
      Cplx numer = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          numer *= 1.0 - (1.0 + b) * z[sig[i]] + b * z[sig[i]] * z[sig[j]];
      asum += std::abs(numer / denom);
    }
  }

  std::vector<long long> y;
  for (int m = 0; m < n; ++m) {
    y = x;
    double pref = 1.0;
    int i = m;
    for (;;) {
      if (i + 1 < n) {
        const long long gap = y[i + 1] - y[i];
        double pj = (1.0 - b);
        const long long yi = y[i];
        for (long long j = 1; j < gap; ++j) {
          y[i] = yi + j;
          lhs += pref * pj * (bethe_phi(y, z, b) - phi_x);
          pj *= b;
        }
        y[i] = y[i + 1];
        pref *= std::pow(b, static_cast<double>(gap - 1));
        ++i;
      } else {
        double pj = (1.0 - b);
        const long long yi = y[i];
        for (long long j = 1; j <= trunc; ++j) {
          y[i] = yi + j;
          lhs += pref * pj * (bethe_phi(y, z, b) - phi_x);
          pj *= b;
        }
        y[i] = yi;
        // Dropped tail: sum_{j>trunc} (1-b) b^{j-1} (Phi(y_j) - Phi(x)).
        const double q = b * zm;
        double rest = 0.0;
        for (int d = 0; d < n; ++d)
          if (d != i) rest += static_cast<double>(y[d]);
        const double tail_prob = std::pow(b, static_cast<double>(trunc));
        double tail_phi = 0.0;
        if (q < 1.0 && zm > 0.0)
          tail_phi = asum * std::pow(zm, rest + static_cast<double>(yi)) *
                     (1.0 - b) * zm * std::pow(q, static_cast<double>(trunc)) /
                     (1.0 - q);
        tail_bound += pref * (tail_phi + tail_prob * std::abs(phi_x));
        break;
      }
    }
  }

  const Cplx eigenvalue = [&] {
    Cplx ev(0.0);
    for (const Cplx& zi : z) ev -= (1.0 - zi) / (1.0 - b * zi);
    return ev;
  }();
  ResidualResult r;
  r.residual = std::abs(lhs - eigenvalue * phi_x);
  r.truncation_bound = tail_bound;
  return r;
}

// --- contour transition formulas ----------------------------------------------

namespace {

struct CircleGrid {
  std::vector<Cplx> z;
  std::vector<Cplx> wt;  // dz/(2 pi i) weights
};

CircleGrid unit_grid(double radius, int m) {
  CircleGrid g;
  g.z.resize(m);
  g.wt.resize(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    const Cplx e(std::cos(th), std::sin(th));
    g.z[k] = radius * e;
    g.wt[k] = radius * e / static_cast<double>(m);  // includes 1/(2 pi i) * i dth
  }
  return g;
}

using Cld = std::complex<long double>;

Cld ipow_ld(Cld z, long long e) {
  if (e < 0) return Cld(1.0L) / ipow_ld(z, -e);
  Cld r(1.0L);
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

// Contour radii. The inner representation needs every singularity outside:
// r < 1/b always, and for N >= 2 the A'-denominator zero surface
// v = 1/((1+b) - b u) must stay clear of the torus, which caps
// r(1+b) + b r^2 < 1. The outer representation needs 0 and b inside; for
// N >= 2 the A''-surface is avoided on the band b < R < 1. Radii close to 1
// keep the power tables well conditioned (extraction error grows like
// machine-eps * r^{-displacement}).
double small_radius(int n, double b) {
  if (n == 1) return std::min(0.9, 0.8 / b);
  const double s = 1.0 + b;
  return 0.75 * (-s + std::sqrt(s * s + 4.0 * b)) / (2.0 * b);
}

double large_radius(int n, double b) {
  if (n == 1) return std::max(1.1, b + 0.3);
  // The A''-denominator surface |(1+b) - b/z| <= 1+b+b/R must sit inside:
  // the same side as in the m-th particle formula, fixed by the
  // master-equation cross-checks.
  return 0.5 * (1.0 + b + std::sqrt((1 + b) * (1 + b) + 4 * b)) + 0.5;
}

// Propositions' inversion formulas produce mass on rightward moves only when
// the sigma-summed powers carry the final state and the plain powers the
// initial one; the N=1 reduction and the master-equation cross-checks pin
// this reading.
Cplx transition_rep(const std::vector<long long>& x0,
                    const std::vector<long long>& x1, double t, double b,
                    bool small_circle, int m_nodes) {
  const int n = static_cast<int>(x0.size());
  const double radius = small_circle ? small_radius(n, b) : large_radius(n, b);
  const CircleGrid g = unit_grid(radius, m_nodes);
  const Perms perms = make_perms(n);
  const int m = m_nodes;

  // one_by_dim[i][node]: weight * z^{x0_i - 1} e^{-t(1-z)/(1-bz)}    (small)
  //                      weight * z^{-x0_i - 1} e^{-t(1-1/z)/(1-b/z)} (large)
  // perm_pow[i][node]:   z^{-x1_i}  (small)   z^{x1_i}  (large)
  std::vector<std::vector<Cld>> one(static_cast<std::size_t>(n)),
      ppow(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    one[i].resize(static_cast<std::size_t>(m));
    ppow[i].resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const Cplx z = g.z[k];
      const Cld zl(z.real(), z.imag());
      const Cld wt(g.wt[k].real(), g.wt[k].imag());
      const Cld tl(t), bl(b);
      if (small_circle) {
        one[i][k] = wt * std::exp(-tl * (Cld(1.0) - zl) / (Cld(1.0) - bl * zl)) *
                    ipow_ld(zl, x0[i] - 1);
        ppow[i][k] = ipow_ld(zl, -x1[i]);
      } else {
        one[i][k] = wt * std::exp(-tl * (zl - Cld(1.0)) / (zl - bl)) *
                    ipow_ld(zl, -x0[i] - 1);
        ppow[i][k] = ipow_ld(zl, x1[i]);
      }
    }
  }
  auto pair_fn = [b, small_circle](Cld u, Cld v) {
    // A'_sigma pair factor (small circles) resp. A''_sigma (large circles)
    const Cld one_l(1.0), bl(b);
    return small_circle ? one_l - (one_l + bl) * v + bl * u * v
                        : one_l - (one_l + one_l / bl) * u + u * v / bl;
  };
  if (n == 1) {
    Cld total(0.0);
    for (int k = 0; k < m; ++k) total += one[0][k] * ppow[0][k];
    return Cplx(static_cast<double>(total.real()),
                static_cast<double>(total.imag()));
  }
  std::vector<std::vector<Cld>> pair_tab(
      static_cast<std::size_t>(m), std::vector<Cld>(static_cast<std::size_t>(m)));
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c)
      pair_tab[a][c] = pair_fn(Cld(g.z[a].real(), g.z[a].imag()),
                               Cld(g.z[c].real(), g.z[c].imag()));
  Cld total(0.0);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Cld denom(1.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) denom *= pair_tab[idx[i]][idx[j]];
    Cld base(1.0);
    for (int i = 0; i < n; ++i) base *= one[i][idx[i]];
    Cld sum_sigma(0.0);
    for (std::size_t s = 0; s < perms.perm.size(); ++s) {
      const auto& sig = perms.perm[s];
      Cld numer(1.0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          numer *= pair_tab[idx[sig[i]]][idx[sig[j]]];
      Cld powp(1.0);
      for (int i = 0; i < n; ++i) powp *= ppow[i][idx[sig[i]]];
      sum_sigma += Cld(perms.sign[s]) * numer * powp;
    }
    total += sum_sigma * base / denom;
    int d = 0;
    while (d < n && ++idx[d] == m) idx[d++] = 0;
    if (d == n) break;
  }
  return Cplx(static_cast<double>(total.real()),
              static_cast<double>(total.imag()));
}

Cplx refine_nodes(const std::function<Cplx(int)>& eval, int m0, int m_max,
                  double tol, const char* what) {
  Cplx prev = eval(m0);
  for (int m = 2 * m0; m <= m_max; m *= 2) {
    const Cplx cur = eval(m);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw ConvergenceError(std::string(what) + ": quadrature did not converge");
}

}  // namespace

TransitionResult transition_pmf_contour(const std::vector<long long>& x0,
                                        const std::vector<long long>& x1,
                                        double t, double b,
                                        double mismatch_tol) {
  const int n = static_cast<int>(x0.size());
  if (n < 1 || n > 3 || x1.size() != x0.size())
    throw std::invalid_argument("transition_pmf_contour: N must be 1..3");
  const int m0 = (n == 1) ? 64 : (n == 2 ? 48 : 32);
  const int m_max = (n == 1) ? 1024 : (n == 2 ? 384 : 256);
  // Achievable precision: the integrand carries radius^{sum(x1-x0)+N}
  // magnitudes that cancel down to the pmf, so the floor scales with the
  // displacement (extended-precision epsilon times that factor).
  long long pow_sum = n;
  for (int i = 0; i < n; ++i) pow_sum += x1[i] - x0[i];
  const double scale = static_cast<double>(pow_sum) * std::exp(t);
  const double floor_small =
      1e-18 * scale * std::pow(1.0 / small_radius(n, b), static_cast<double>(pow_sum));
  const double floor_large =
      1e-18 * scale * std::pow(large_radius(n, b), static_cast<double>(pow_sum));
  const Cplx small = refine_nodes(
      [&](int m) { return transition_rep(x0, x1, t, b, true, m); }, m0, m_max,
      std::max(1e-10, floor_small), "transition_pmf_contour[small]");
  const Cplx large = refine_nodes(
      [&](int m) { return transition_rep(x0, x1, t, b, false, m); }, m0, m_max,
      std::max(1e-10, floor_large), "transition_pmf_contour[large]");
  TransitionResult r;
  r.value = small.real();
  r.disagreement = std::abs(small - large);
  if (r.disagreement > mismatch_tol + 20.0 * (floor_small + floor_large))
    throw ContourMismatchError(
        "transition_pmf_contour: representations disagree by " +
        std::to_string(r.disagreement) +
        "; check contour radii against the singularity layout");
  return r;
}

double mth_particle_pmf(const std::vector<long long>& y, int m, long long x,
                        double t, double b) {
  const int n = static_cast<int>(y.size());
  if (n < 1 || n > 3 || m < 1 || m > n)
    throw std::invalid_argument("mth_particle_pmf: need 1 <= m <= N <= 3");
  // Equal large circles with the A''-surface and the poles at 0, b, 1
  // inside. The integrand is O(R^{sum(x - y_i - 1)}) against an O(b^x)
  // answer, so the formula is usable for moderate displacements only (it is
  // an N <= 3 oracle); extended precision pushes the wall out.
  const double radius =
      0.5 * (1.0 + b + std::sqrt((1 + b) * (1 + b) + 4 * b)) + 0.5;

  auto eval = [&](int nodes) {
    const CircleGrid g = unit_grid(radius, nodes);
    Cld total(0.0);
    for (int mask = 1; mask < (1 << n); ++mask) {
      const int k = __builtin_popcount(static_cast<unsigned>(mask));
      if (k < m) continue;
      std::vector<int> elems;
      long long kappa = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) {
          elems.push_back(i);
          kappa += i + 1;
        }
      const double pref =
          std::pow(b, static_cast<double>(kappa - static_cast<long long>(m) * k -
                                          k * (k - 1) / 2)) *
          q_binomial(k - 1, m - 1, b);
      // k-fold tensor integral in extended precision: the power tables
      // carry R^{x-y-1} magnitudes that cancel down to pmf size.
      std::vector<std::vector<Cld>> one(static_cast<std::size_t>(k));
      for (int e = 0; e < k; ++e) {
        one[e].resize(g.z.size());
        for (std::size_t nd = 0; nd < g.z.size(); ++nd) {
          const Cld z(g.z[nd].real(), g.z[nd].imag());
          const Cld wt(g.wt[nd].real(), g.wt[nd].imag());
          one[e][nd] = wt *
                       std::exp(-Cld(t) * (z - Cld(1.0)) / (z - Cld(b))) *
                       ipow_ld(z, x - y[elems[e]] - 1) / (Cld(1.0) - z);
        }
      }
      Cld sub(0.0);
      std::vector<int> idx(static_cast<std::size_t>(k), 0);
      const int mm = static_cast<int>(g.z.size());
      for (;;) {
        Cld val(1.0);
        Cld prod_z(1.0);
        for (int e = 0; e < k; ++e) {
          const Cld z(g.z[idx[e]].real(), g.z[idx[e]].imag());
          val *= one[e][idx[e]];
          prod_z *= z;
        }
        Cld cross(1.0);
        for (int a = 0; a < k; ++a)
          for (int c = a + 1; c < k; ++c) {
            const Cld za(g.z[idx[a]].real(), g.z[idx[a]].imag());
            const Cld zc(g.z[idx[c]].real(), g.z[idx[c]].imag());
            cross *= (zc - za) /
                     (Cld(1.0) - (Cld(1.0) + Cld(1.0) / Cld(b)) * za +
                      za * zc / Cld(b));
          }
        sub += val * cross * (Cld(1.0) - prod_z);
        int d = 0;
        while (d < k && ++idx[d] == mm) idx[d++] = 0;
        if (d == k) break;
      }
      total += Cld(pref) * sub;
    }
    const double sign = (m - 1) % 2 == 0 ? 1.0 : -1.0;
    total *= Cld(sign * std::pow(b, static_cast<double>(m) * (m - 1) / 2.0));
    return Cplx(static_cast<double>(total.real()),
                static_cast<double>(total.imag()));
  };
  const Cplx v =
      refine_nodes(eval, 64, n == 3 ? 256 : 512, 1e-9, "mth_particle_pmf");
  return v.real();
}

}  // namespace hlpt
