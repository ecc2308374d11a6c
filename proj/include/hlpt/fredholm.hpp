#pragma once
// Numerical Fredholm determinants on piecewise-linear complex contours via
// the Nystrom method, in the convention
//   det(I+K) = sum_n 1/(n! (2pi i)^n) int ... int det(K(z_i,z_j)) dz,
// so the discretised matrix is M_ij = w_j K(z_i,z_j)/(2 pi i) with complex
// contour weights w_j. Provides the q-special functions, the three limiting
// distributions (Tracy-Widom GUE via the Airy kernel, squared GOE, Gaussian),
// the finite-time q-Laplace determinant, and the nested-contour q-moment
// formula.

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hlpt {

using Cplx = std::complex<double>;

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NestingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- q-special functions ----------------------------------------------------

// (a;q)_n = prod_{j=1..n} (1 - a q^{j-1}).
Cplx q_pochhammer(Cplx a, double q, long long n);

// (a;q)_inf, |q| < 1; the product is truncated once |a q^j| < 1e-17, which
// bounds the dropped tail by |a q^j|/(1-|q|) in log-magnitude.
Cplx q_pochhammer_inf(Cplx a, double q);

// Gaussian binomial (q^{n-k+1};q)_k / (q;q)_k; returns 0 for k<0 or k>n.
double q_binomial(long long n, long long k, double q);

// --- contours and the Nystrom determinant -----------------------------------

struct Contour {
  std::vector<Cplx> nodes;
  std::vector<Cplx> weights;  // complex dz weights, direction included
};

// Gauss-Legendre rule of the given order on each segment of a piecewise
// linear path through `points`.
Contour gl_path(const std::vector<Cplx>& points, int order_per_segment);

// Positively oriented circle, uniform-angle trapezoid rule (spectrally
// accurate for periodic analytic integrands).
Contour circle_contour(Cplx center, double radius, int n);

using Kernel = std::function<Cplx(Cplx, Cplx)>;

struct NystromResult {
  Cplx det;
  double hadamard_bound = 0.0;  // Hadamard bound on |det(I+M)|
};

// det(I+M) for M_ij = w_j K(z_i,z_j)/(2 pi i); throws if the Hadamard
// inequality is violated by the computed value (it cannot be, short of NaNs).
NystromResult fredholm_det(const Kernel& kernel, const Contour& contour);

// --- limiting distributions -------------------------------------------------

struct LimitDistOptions {
  int base_order = 64;    // Gauss-Legendre order per segment at level 0
  int max_levels = 3;     // node count doubles per level
  double cauchy_tol = 1e-9;
  double im_tol = 1e-8;   // largest acceptable imaginary part
};

// F_GUE(s) = det(I + K_Ai) on the contour 0 -> infty e^{+-i pi/3}, with the
// Airy kernel's inner integral on the piecewise-linear contour through
// `anchor` (default -1) with rays at angles +-2pi/3.
double f_gue(double s, double anchor = -1.0, const LimitDistOptions& = {});

// F_GOE^2(s) = det(I + K_{GOE,2}) on the contour through -delta, inner
// contour through -2 delta, with the extra v/w factor.
double f_goe_sq(double s, double delta = 0.3, const LimitDistOptions& = {});

// det(1 + K_G) on the contour -delta + rays at +-pi/6, inner integral over
// the vertical line through -2 delta; equals the standard normal CDF.
double gaussian_via_fredholm(double s, double delta = 0.5,
                             const LimitDistOptions& = {});

// --- finite-time exact formulas ----------------------------------------------

struct QLaplaceOptions {
  double contour_R = 8.0;   // D_{R,d,delta} parameters
  double contour_d = 0.4;
  double contour_delta = 0.9;
  double ray_im_max = 16.0;                 // truncation of the vertical rays
  std::optional<Cplx> circle_center;        // C_r; searched if unset
  std::optional<double> circle_radius;
  int base_order = 64;
  int max_levels = 3;
  double cauchy_tol = 1e-9;
  double min_separation = 1e-3;             // condition (A) on nodes
  double max_g_ratio = 1e12;                // condition (B) on nodes
};

struct QLaplaceResult {
  Cplx value;                 // E[ 1/(zeta b^{N_x}; b)_inf ]
  double cauchy_gap = 0.0;
  double min_separation = 0.0;
  double max_g_ratio = 0.0;
  int levels_used = 0;
};

// E[1/(zeta b^{N_x(t)}; b)_inf] under step Bernoulli(rho) data, via the
// Fredholm determinant over the circle C_r with the Mellin-Barnes kernel on
// D_{R,d,delta}. zeta must avoid the non-negative reals. The height counts
// particles at sites <= x.
QLaplaceResult q_laplace_finite_t(long long x, double t, double b, double rho,
                                  Cplx zeta, const QLaplaceOptions& = {});

// E[b^{L N_x(t)}] under step Bernoulli(rho) data, via the L-fold nested
// contour integral; 1 <= L <= 3. Throws NestingError when no admissible
// family of nested circles exists for (b, rho, L).
double moment_qL(long long x, double t, double b, double rho, int L);

// --- tabulation --------------------------------------------------------------

enum class LimitDist { GUE, GOE2, Gauss };

struct DistTable {
  std::vector<double> s;
  std::vector<double> F;
  bool all_certified = true;
};

DistTable tabulate_distribution(LimitDist kind, const std::vector<double>& grid,
                                double delta = 0.3);

// Clamped monotone linear interpolation of a tabulated CDF.
double interp_cdf(const DistTable& table, double s);

// Mean of a CDF given by a table covering the support up to negligible tails.
double mean_from_table(const DistTable& table);

// Root of F(s)=p by bisection on a direct evaluator.
double quantile(const std::function<double(double)>& cdf, double p, double lo,
                double hi, double tol = 1e-6);

}  // namespace hlpt
