#include "hlpt/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace hlpt {

namespace {

constexpr double kPi = std::numbers::pi;
const Cplx kTwoPiI(0.0, 2.0 * kPi);

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

// det(I + M) by complex LU with partial pivoting; `m` is overwritten.
Cplx det_i_plus(std::vector<Cplx>& m, int n) {
  for (int i = 0; i < n; ++i) m[i * n + i] += 1.0;
  Cplx det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(m[c * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double v = std::abs(m[r * n + c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != c) {
      for (int k = c; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
      det = -det;
    }
    det *= m[c * n + c];
    const Cplx inv = 1.0 / m[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const Cplx f = m[r * n + c] * inv;
      if (f == Cplx(0.0)) continue;
      for (int k = c + 1; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
    }
  }
  return det;
}

// Hadamard bound on |det(I+M)| computed in log space (Lemma A.2 shape).
double hadamard_log_bound(const std::vector<Cplx>& m, int n) {
  double lb = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      Cplx v = m[i * n + j];
      if (i == j) v += 1.0;
      s += std::norm(v);
    }
    lb += 0.5 * std::log(s);
  }
  return lb;
}

struct DetWithBound {
  Cplx det;
  double hadamard_bound;
};

DetWithBound guarded_det(std::vector<Cplx>& m, int n) {
  const double lb = hadamard_log_bound(m, n);
  const Cplx d = det_i_plus(m, n);
  const double bound = std::exp(std::min(lb, 700.0));
  if (!(std::abs(d) <= bound * (1.0 + 1e-8)))
    throw std::runtime_error("fredholm_det: Hadamard bound violated");
  return {d, bound};
}

// Truncation radius for integrands decaying like exp(-r^3/3 + |s| r) along a
// ray; generous across the s ranges used here.
double cubic_ray_radius(double s, double offset) {
  const double a = std::abs(s);
  for (double r = 4.0; r < 200.0; r += 0.5)
    if (r * r * r / 3.0 - a * (0.5 * r + offset + 1.0) > 46.0) return r;
  return 200.0;
}

double quad_ray_radius(double s, double delta) {
  const double a = std::abs(s);
  for (double r = 6.0; r < 400.0; r += 0.5)
    if (0.25 * r * r - delta * r - a * (r + delta) > 46.0) return r;
  return 400.0;
}

// Shared assembly for the three limiting kernels. Off-diagonal entries use
// the partial-fraction identity
//   int f(v)/((v-w)(v-w')) dv = (k(w)-k(w'))/(w-w'),
//   int f(v) v/((v-w)(v-w')) dv = (w k(w) - w' k(w'))/(w-w'),
// with k(u) = (1/2pi i) int f(v)/(v-u) dv, and the exact diagonal limits
// k'(u) resp. k(u) + u k'(u).
DetWithBound limit_kernel_det(const Contour& outer, const Contour& inner,
                              const std::function<Cplx(Cplx)>& log_numer_w,
                              const std::function<Cplx(Cplx)>& log_numer_v_inv,
                              bool v_over_w) {
  const int n = static_cast<int>(outer.nodes.size());
  const int m = static_cast<int>(inner.nodes.size());
  // The overall kernel sign is pinned by the Gaussian identity
  // det(1+K_G) = Phi(s): the inner integral enters with a minus (the
  // s(v-w)-exponential trick carries exp(s(v-w)) = -(v-w) int_s^inf ...).
  std::vector<Cplx> fv(m);
  for (int j = 0; j < m; ++j)
    fv[j] = -std::exp(log_numer_v_inv(inner.nodes[j])) * inner.weights[j] /
            kTwoPiI;
  std::vector<Cplx> k(n), kp(n), phi(n);
  for (int i = 0; i < n; ++i) {
    const Cplx w = outer.nodes[i];
    Cplx acc(0.0), accp(0.0);
    for (int j = 0; j < m; ++j) {
      const Cplx d = 1.0 / (inner.nodes[j] - w);
      acc += fv[j] * d;
      accp += fv[j] * d * d;
    }
    k[i] = acc;
    kp[i] = accp;
    phi[i] = std::exp(log_numer_w(w));
  }
  std::vector<Cplx> M(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const Cplx wi = outer.nodes[i];
    for (int j = 0; j < n; ++j) {
      Cplx inner_ij;
      if (i == j) {
        inner_ij = v_over_w ? (k[i] + wi * kp[i]) / wi : kp[i];
      } else {
        const Cplx wj = outer.nodes[j];
        inner_ij = v_over_w ? (wi * k[i] - wj * k[j]) / ((wi - wj) * wi)
                            : (k[i] - k[j]) / (wi - wj);
      }
      M[static_cast<std::size_t>(i) * n + j] =
          outer.weights[j] / kTwoPiI * phi[i] * inner_ij;
    }
  }
  return guarded_det(M, n);
}

double refine_limit_dist(const std::function<Cplx(int)>& eval_at_level,
                         const LimitDistOptions& opt, const char* what) {
  Cplx prev = eval_at_level(0);
  for (int level = 1; level <= opt.max_levels; ++level) {
    const Cplx cur = eval_at_level(level);
    if (std::abs(cur - prev) < opt.cauchy_tol) {
      if (std::abs(cur.imag()) > opt.im_tol)
        throw ConvergenceError(std::string(what) +
                               ": imaginary part above tolerance");
      return cur.real();
    }
    prev = cur;
  }
  throw ConvergenceError(std::string(what) +
                         ": node doubling did not reach the Cauchy criterion");
}

Cplx ipow(Cplx z, long long e) {
  Cplx r = 1.0;
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

}  // namespace

Cplx q_pochhammer(Cplx a, double q, long long n) {
  if (n < 0) throw std::invalid_argument("q_pochhammer: n < 0");
  Cplx prod = 1.0;
  Cplx aq = a;
  for (long long j = 0; j < n; ++j) {
    prod *= (1.0 - aq);
    aq *= q;
  }
  return prod;
}

Cplx q_pochhammer_inf(Cplx a, double q) {
  if (!(std::abs(q) < 1.0))
    throw std::invalid_argument("q_pochhammer_inf: |q| must be < 1");
  Cplx prod = 1.0;
  Cplx aq = a;
  for (int j = 0; j < 20000; ++j) {
    if (std::abs(aq) < 1e-17) break;
    prod *= (1.0 - aq);
    aq *= q;
  }
  return prod;
}

double q_binomial(long long n, long long k, double q) {
  if (k < 0 || k > n) return 0.0;
  const Cplx num = q_pochhammer(std::pow(q, static_cast<double>(n - k + 1)), q, k);
  const Cplx den = q_pochhammer(q, q, k);
  return (num / den).real();
}

Contour gl_path(const std::vector<Cplx>& points, int order_per_segment) {
  if (points.size() < 2) throw std::invalid_argument("gl_path: need >= 2 points");
  std::vector<double> x, w;
  gauss_legendre(order_per_segment, x, w);
  Contour c;
  c.nodes.reserve((points.size() - 1) * order_per_segment);
  c.weights.reserve(c.nodes.capacity());
  for (std::size_t s = 0; s + 1 < points.size(); ++s) {
    const Cplx a = points[s], b = points[s + 1];
    const Cplx half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < order_per_segment; ++i) {
      c.nodes.push_back(mid + half * x[i]);
      c.weights.push_back(half * w[i]);
    }
  }
  return c;
}

Contour circle_contour(Cplx center, double radius, int n) {
  Contour c;
  c.nodes.resize(n);
  c.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * kPi * k / n;
    const Cplx e(std::cos(th), std::sin(th));
    c.nodes[k] = center + radius * e;
    c.weights[k] = Cplx(0.0, 1.0) * radius * e * (2.0 * kPi / n);
  }
  return c;
}

NystromResult fredholm_det(const Kernel& kernel, const Contour& contour) {
  const int n = static_cast<int>(contour.nodes.size());
  std::vector<Cplx> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] =
          contour.weights[j] / kTwoPiI *
          kernel(contour.nodes[i], contour.nodes[j]);
  const DetWithBound d = guarded_det(m, n);
  return {d.det, d.hadamard_bound};
}

double f_gue(double s, double anchor, const LimitDistOptions& opt) {
  if (!(anchor < 0.0)) throw std::invalid_argument("f_gue: anchor must be < 0");
  const double t_out = cubic_ray_radius(s, 0.0);
  const double t_in = cubic_ray_radius(s, std::abs(anchor));
  auto eval = [&](int level) {
    const int order = opt.base_order << level;
    const Cplx wdir(0.5, std::sqrt(3.0) / 2.0);   // e^{i pi/3}
    const Cplx vdir(-0.5, std::sqrt(3.0) / 2.0);  // e^{2i pi/3}
    const Contour outer =
        gl_path({t_out * std::conj(wdir), Cplx(0.0), t_out * wdir}, order);
    const Contour inner = gl_path({anchor + t_in * std::conj(vdir), Cplx(anchor),
                                   anchor + t_in * vdir},
                                  order);
    return limit_kernel_det(
               outer, inner,
               [s](Cplx w) { return w * w * w / 3.0 - s * w; },
               [s](Cplx v) { return -(v * v * v / 3.0 - s * v); }, false)
        .det;
  };
  return refine_limit_dist(eval, opt, "f_gue");
}

double f_goe_sq(double s, double delta, const LimitDistOptions& opt) {
  if (!(delta > 0.0)) throw std::invalid_argument("f_goe_sq: delta must be > 0");
  const double t_out = cubic_ray_radius(s, delta);
  const double t_in = cubic_ray_radius(s, 2.0 * delta);
  auto eval = [&](int level) {
    const int order = opt.base_order << level;
    const Cplx wdir(0.5, std::sqrt(3.0) / 2.0);
    const Cplx vdir(-0.5, std::sqrt(3.0) / 2.0);
    const Cplx wc(-delta, 0.0), vc(-2.0 * delta, 0.0);
    const Contour outer =
        gl_path({wc + t_out * std::conj(wdir), wc, wc + t_out * wdir}, order);
    const Contour inner =
        gl_path({vc + t_in * std::conj(vdir), vc, vc + t_in * vdir}, order);
    return limit_kernel_det(
               outer, inner,
               [s](Cplx w) { return w * w * w / 3.0 - s * w; },
               [s](Cplx v) { return -(v * v * v / 3.0 - s * v); }, true)
        .det;
  };
  return refine_limit_dist(eval, opt, "f_goe_sq");
}

double gaussian_via_fredholm(double s, double delta,
                             const LimitDistOptions& opt) {
  if (!(delta > 0.0))
    throw std::invalid_argument("gaussian_via_fredholm: delta must be > 0");
  const double t_out = quad_ray_radius(s, delta);
  double t_in = 10.0;
  while (0.5 * t_in * t_in - 2.0 * delta * (2.0 * delta + std::abs(s)) < 46.0)
    t_in += 1.0;
  auto eval = [&](int level) {
    const int order = opt.base_order << level;
    const Cplx wdir(std::cos(kPi / 6.0), std::sin(kPi / 6.0));
    const Cplx wc(-delta, 0.0), vc(-2.0 * delta, 0.0);
    const Contour outer =
        gl_path({wc + t_out * std::conj(wdir), wc, wc + t_out * wdir}, order);
    const Contour inner =
        gl_path({vc - Cplx(0.0, t_in), vc, vc + Cplx(0.0, t_in)}, order);
    return limit_kernel_det(
               outer, inner,
               [s](Cplx w) { return -w * w / 2.0 - s * w; },
               [s](Cplx v) { return v * v / 2.0 + s * v; }, true)
        .det;
  };
  return refine_limit_dist(eval, opt, "gaussian_via_fredholm");
}

namespace {

// C_r for Theorem 3.7: centred on the negative real axis, containing 0 and
// -b, excluding b/alpha; bC_r sits inside C_r automatically once |center| <
// radius. Default (-0.6b, 0.9b) reproduces (-0.3, 0.45) at b=0.5; when the
// pole b/alpha comes too close, shrink towards the circumcircle of {0,-b}.
std::pair<Cplx, double> choose_qlaplace_circle(double b, double rho) {
  const double alpha = (1.0 - rho) / rho;
  const double pole = (alpha > 0.0) ? b / alpha : 1e300;
  double center = -0.6 * b, radius = 0.9 * b;
  if (pole - center <= 1.1 * radius) {
    center = -0.5 * b;
    radius = std::min(0.9 * b, (pole - center) / 1.15);
    if (radius <= 0.55 * b)
      throw CertificationError(
          "q_laplace_finite_t: no admissible circle found for (b, rho)");
  }
  return {Cplx(center, 0.0), radius};
}

}  // namespace

QLaplaceResult q_laplace_finite_t(long long x, double t, double b, double rho,
                                  Cplx zeta, const QLaplaceOptions& opt) {
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("q_laplace: b");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("q_laplace: rho");
  if (x < 0) throw std::invalid_argument("q_laplace: x < 0");
  if (zeta.imag() == 0.0 && zeta.real() >= 0.0)
    throw std::invalid_argument("q_laplace: zeta must avoid the ray [0,inf)");

  const double alpha = (1.0 - rho) / rho;
  const long long xf = x + 1;  // formula counts sites strictly left of x
  const double log_b = std::log(b);
  const Cplx log_minus_zeta = std::log(-zeta);

  Cplx center;
  double radius;
  if (opt.circle_center && opt.circle_radius) {
    center = *opt.circle_center;
    radius = *opt.circle_radius;
  } else {
    std::tie(center, radius) = choose_qlaplace_circle(b, rho);
  }

  const double R = opt.contour_R, d = opt.contour_d, del = opt.contour_delta;
  const double Y = opt.ray_im_max;
  const std::vector<Cplx> dpath = {
      Cplx(R, -Y), Cplx(R, -d), Cplx(del, -d), Cplx(del, d), Cplx(R, d),
      Cplx(R, Y)};

  // g(w)/g(b^s w) per the kernel's principal component; xf-shifted.
  auto g_ratio = [&](Cplx w, Cplx bs) {
    const Cplx rational = ipow((1.0 + bs * w / b) / (1.0 + w / b), xf);
    const Cplx expo = std::exp(t * w * (1.0 - bs) / (b * (1.0 - b)));
    Cplx poch = 1.0;
    if (alpha > 0.0)
      poch = q_pochhammer_inf(alpha / b * bs * w, b) /
             q_pochhammer_inf(alpha / b * w, b);
    return rational * expo * poch;
  };

  QLaplaceResult out;
  Cplx prev(0.0);
  bool have_prev = false;
  for (int level = 0; level <= opt.max_levels; ++level) {
    const int order = opt.base_order << level;
    const Contour circle = circle_contour(center, radius, 2 * order);
    const Contour dcont = gl_path(dpath, order);
    const int n = static_cast<int>(circle.nodes.size());
    const int m = static_cast<int>(dcont.nodes.size());

    // A(i,j) = ds_j (-zeta)^{s_j} / sin(pi s_j) * g(w_i)/g(b^{s_j} w_i) / 2pi i
    // B(i,j) = b^{s_j} w_i
    std::vector<Cplx> A(static_cast<std::size_t>(n) * m),
        B(static_cast<std::size_t>(n) * m);
    double min_sep = 1e300, max_ratio = 0.0;
    for (int j = 0; j < m; ++j) {
      const Cplx sj = dcont.nodes[j];
      const Cplx bs = std::exp(sj * log_b);
      // -pi/sin(pi s) = Gamma(-s)Gamma(1+s): the residues at s = 1,2,...
      // must reproduce - zeta^L g(w)/g(b^L w)/(b^L w - w'), which the t=0
      // closed form checks.
      const Cplx pref = dcont.weights[j] * std::exp(sj * log_minus_zeta) *
                        (kPi) / std::sin(kPi * sj) / kTwoPiI;
      for (int i = 0; i < n; ++i) {
        const Cplx w = circle.nodes[i];
        const Cplx gr = g_ratio(w, bs);
        max_ratio = std::max(max_ratio, std::abs(gr));
        A[static_cast<std::size_t>(i) * m + j] = pref * gr;
        B[static_cast<std::size_t>(i) * m + j] = bs * w;
      }
    }
    // Condition (A): inf |b^s w - w'| over the node grid.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const Cplx bsw = B[static_cast<std::size_t>(i) * m + j];
        for (int k = 0; k < n; ++k)
          min_sep = std::min(min_sep, std::abs(bsw - circle.nodes[k]));
      }
    out.min_separation = min_sep;
    out.max_g_ratio = max_ratio;
    if (min_sep < opt.min_separation || max_ratio > opt.max_g_ratio)
      throw CertificationError(
          "q_laplace_finite_t: contour certification failed (separation " +
          std::to_string(min_sep) + ", g-ratio " + std::to_string(max_ratio) +
          "); adjust circle or D parameters");

    std::vector<Cplx> M(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      const Cplx* Ai = &A[static_cast<std::size_t>(i) * m];
      const Cplx* Bi = &B[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < n; ++k) {
        Cplx acc(0.0);
        const Cplx wk = circle.nodes[k];
        for (int j = 0; j < m; ++j) acc += Ai[j] / (Bi[j] - wk);
        M[static_cast<std::size_t>(i) * n + k] =
            circle.weights[k] / kTwoPiI * acc;
      }
    }
    const Cplx det = guarded_det(M, n).det;
    out.levels_used = level;
    if (have_prev) {
      out.cauchy_gap = std::abs(det - prev);
      if (out.cauchy_gap < opt.cauchy_tol) {
        out.value = det;
        return out;
      }
    }
    prev = det;
    have_prev = true;
  }
  throw ConvergenceError(
      "q_laplace_finite_t: node doubling did not converge; last gap " +
      std::to_string(out.cauchy_gap));
}

namespace {

struct NestedCircles {
  std::vector<double> center, radius;
};

// Circles for Prop 3.5: each contains {0,-b}, excludes b/alpha, and for A<B
// the scaled copy b*circle_B stays clear of circle_A (pointwise, with
// margin). Circles grow with the index.
NestedCircles find_nested_circles(double b, double rho, int L) {
  const double alpha = (1.0 - rho) / rho;
  const double cap = (alpha > 0.0) ? b / alpha : 1e9;
  NestedCircles out;
  // Smallest clearance of (c,r) to its constraints; negative = inadmissible.
  auto clearance = [&](double c, double r) {
    double m = r - std::abs(c);                              // contains 0
    m = std::min(m, r - std::abs(-b - c));                   // contains -b
    if (alpha > 0.0) m = std::min(m, (cap - c) - r);         // excludes pole
    for (std::size_t a = 0; a < out.center.size(); ++a) {
      // previous (smaller) circle must stay clear of b * this circle
      const double dist = std::abs(std::abs(out.center[a] - b * c) - b * r);
      m = std::min(m, dist - out.radius[a]);
    }
    return m;
  };
  // Find the smallest feasible radius per level, then locally optimise the
  // clearance up to `fatten` times that radius: small circles keep
  // exp(t u / b) tame while fat clearances keep the u_A - b u_B denominators
  // quadrature-friendly. When the pole cap binds, fat early circles starve
  // the later levels, so retry with slimmer factors before giving up.
  const double want = 0.05 * b;
  for (double fatten : {1.7, 1.25, 1.0}) {
    out.center.clear();
    out.radius.clear();
    bool ok = true;
    for (int level = 0; level < L && ok; ++level) {
      double best_c = 0.0, best_r = -1.0, best_m = want;
      double r_feasible = -1.0;
      const double r_lo =
          out.radius.empty() ? 0.55 * b : 1.05 * out.radius.back();
      for (double r = r_lo; r < 400.0; r *= 1.05) {
        if (r_feasible > 0.0 && r > fatten * r_feasible) break;
        const double p_hi = std::min(cap * 0.95, 0.95 * r);
        for (double p = 0.01 * b; p <= p_hi;
             p += std::max(0.005 * b, p_hi / 80.0)) {
          const double m = clearance(p - r, r);
          if (m > best_m) {
            best_m = m;
            best_c = p - r;
            best_r = r;
            if (r_feasible < 0.0) r_feasible = r;
          }
        }
      }
      if (best_r < 0.0) {
        ok = false;
        break;
      }
      if (std::getenv("HLPT_DEBUG_CIRCLES"))
        std::fprintf(stderr, "circle %d: c=%.4f r=%.4f clearance=%.4f\n",
                     level, best_c, best_r, best_m);
      out.center.push_back(best_c);
      out.radius.push_back(best_r);
    }
    if (ok) return out;
  }
  throw NestingError(
      "moment_qL: no admissible nested circle family for these (b, rho, L)");
}

}  // namespace

double moment_qL(long long x, double t, double b, double rho, int L) {
  if (L < 1 || L > 3) throw std::invalid_argument("moment_qL: 1 <= L <= 3");
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("moment_qL: b");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("moment_qL: rho");
  if (x < 0) throw std::invalid_argument("moment_qL: x < 0");
  const double alpha = (1.0 - rho) / rho;
  const long long xf = x + 1;  // formula counts sites strictly left of x
  const NestedCircles circles = find_nested_circles(b, rho, L);

  auto f_times_w = [&](Cplx u, Cplx wt) {
    return wt * std::exp(t * u / b) * ipow((1.0 + u) / (1.0 + u / b), xf) /
           (u * (1.0 - alpha * u / b));
  };

  auto eval = [&](int order) {
    std::vector<Contour> cs(L);
    std::vector<std::vector<Cplx>> f(L);
    for (int a = 0; a < L; ++a) {
      cs[a] = circle_contour(Cplx(circles.center[a], 0.0), circles.radius[a],
                             order);
      f[a].resize(order);
      for (int i = 0; i < order; ++i)
        f[a][i] = f_times_w(cs[a].nodes[i], cs[a].weights[i]);
    }
    Cplx sum(0.0);
    if (L == 1) {
      for (int i = 0; i < order; ++i) sum += f[0][i];
    } else if (L == 2) {
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          const Cplx u1 = cs[0].nodes[i], u2 = cs[1].nodes[j];
          sum += f[0][i] * f[1][j] * (u1 - u2) / (u1 - b * u2);
        }
    } else {
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          const Cplx u1 = cs[0].nodes[i], u2 = cs[1].nodes[j];
          const Cplx c12 = f[0][i] * f[1][j] * (u1 - u2) / (u1 - b * u2);
          for (int k = 0; k < order; ++k) {
            const Cplx u3 = cs[2].nodes[k];
            sum += c12 * f[2][k] * (u1 - u3) / (u1 - b * u3) * (u2 - u3) /
                   (u2 - b * u3);
          }
        }
    }
    Cplx pref = std::pow(b, 0.5 * L * (L - 1));
    for (int a = 0; a < L; ++a) pref /= kTwoPiI;
    return pref * sum;
  };

  int order = 64;
  const int max_order = (L == 3) ? 384 : 1024;
  Cplx prev = eval(order);
  while (order < max_order) {
    order = std::min(2 * order, max_order);
    const Cplx cur = eval(order);
    if (std::abs(cur - prev) < 1e-9) {
      if (std::abs(cur.imag()) > 1e-8)
        throw ConvergenceError("moment_qL: imaginary part above tolerance");
      return cur.real();
    }
    prev = cur;
  }
  throw ConvergenceError("moment_qL: quadrature did not converge");
}

DistTable tabulate_distribution(LimitDist kind, const std::vector<double>& grid,
                                double delta) {
  DistTable table;
  table.s = grid;
  table.F.reserve(grid.size());
  for (double s : grid) {
    double v = 0.0;
    try {
      switch (kind) {
        case LimitDist::GUE: v = f_gue(s); break;
        case LimitDist::GOE2: v = f_goe_sq(s, delta); break;
        case LimitDist::Gauss: v = gaussian_via_fredholm(s, delta); break;
      }
    } catch (const ConvergenceError&) {
      table.all_certified = false;
      v = std::numeric_limits<double>::quiet_NaN();
    }
    table.F.push_back(v);
  }
  return table;
}

double interp_cdf(const DistTable& table, double s) {
  const auto& xs = table.s;
  const auto& fs = table.F;
  if (xs.empty()) throw std::invalid_argument("interp_cdf: empty table");
  if (s <= xs.front()) return std::max(0.0, fs.front());
  if (s >= xs.back()) return std::min(1.0, fs.back());
  const auto it = std::upper_bound(xs.begin(), xs.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (s - xs[i - 1]) / (xs[i] - xs[i - 1]);
  const double v = fs[i - 1] + w * (fs[i] - fs[i - 1]);
  return std::min(1.0, std::max(0.0, v));
}

double mean_from_table(const DistTable& table) {
  const auto& xs = table.s;
  const auto& fs = table.F;
  double mean = xs.front() * fs.front() + xs.back() * (1.0 - fs.back());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    mean += 0.5 * (xs[i] + xs[i + 1]) * (fs[i + 1] - fs[i]);
  return mean;
}

double quantile(const std::function<double(double)>& cdf, double p, double lo,
                double hi, double tol) {
  double flo = cdf(lo) - p, fhi = cdf(hi) - p;
  if (flo > 0.0 || fhi < 0.0)
    throw std::invalid_argument("quantile: root not bracketed");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) - p < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hlpt
