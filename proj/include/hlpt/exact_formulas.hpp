#pragma once
// Exact finite-N machinery: the compound-Poisson single-particle law, a
// truncated-generator master-equation oracle integrated with an adaptive
// Dormand-Prince stepper, Bethe eigenfunction residuals at generator level,
// and tensor-product contour quadrature of the N-particle transition
// formulas (N <= 3).

#include <complex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hlpt {

using Cplx = std::complex<double>;

struct BoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContourMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// P(x(t) - x(0) = k) for a lone particle:
//   e^{-t} 1{k=0} + sum_{n=1..k} e^{-t} t^n/n! C(k-1,n-1)(1-b)^n b^{k-n}.
double single_particle_pmf(double t, long long k, double b);

struct MasterEquationResult {
  long long bound = 0;
  std::size_t n_particles = 0;
  std::vector<std::vector<long long>> states;  // ordered tuples in [0,bound]
  std::vector<double> prob;                    // aligned with states
  double leak = 0.0;                           // mass lost past the bound

  double prob_of(const std::vector<long long>& state) const;
  // Marginal law of one particle's position, mass beyond bound excluded.
  std::vector<double> marginal(std::size_t particle) const;
};

// Integrates the forward equation of the generator truncated to ordered
// N-tuples in [0, bound] (N <= 3); cascade outcomes are enumerated exactly
// and geometric tails beyond the bound feed an absorbing leak state. Throws
// BoundError when the leaked mass exceeds leak_tol.
MasterEquationResult master_equation_pmf(const std::vector<long long>& init,
                                         double t, long long bound, double b,
                                         double leak_tol = 1e-10);

// Validates the Bethe spectral parameters: |b z_i| < 1 and the A_sigma
// denominators 1-(1+b)z_i+b z_i z_j bounded away from zero (tol 1e-10).
void validate_bethe(const std::vector<Cplx>& z, double b);

// Symmetrised Bethe eigenfunction Phi(x; z).
Cplx bethe_phi(const std::vector<long long>& x, const std::vector<Cplx>& z,
               double b);

struct ResidualResult {
  double residual = 0.0;          // |L Phi - lambda Phi|
  double truncation_bound = 0.0;  // bound on the dropped geometric tails
};

// Generator residual |L Phi(x;z) - (sum_i -(1-z_i)/(1-b z_i)) Phi(x;z)| with
// cascade sums truncated at `trunc` steps past the last particle.
ResidualResult eigenfunction_residual(const std::vector<Cplx>& z,
                                      const std::vector<long long>& x,
                                      double b, long long trunc = 200);

struct TransitionResult {
  double value = 0.0;         // small-circle representation
  double disagreement = 0.0;  // |small-circle - large-circle|
};

// T_t(x0 -> x1) by tensor-product trapezoid quadrature of both contour
// representations (small circles leaving all singularities outside, and
// large circles containing them); throws ContourMismatchError when the two
// values disagree beyond tolerance.
TransitionResult transition_pmf_contour(const std::vector<long long>& x0,
                                        const std::vector<long long>& x1,
                                        double t, double b,
                                        double mismatch_tol = 1e-6);

// P(x_m(t) = x) for N particles started at y, via the sum over subsets S of
// k-fold contour integrals with q-binomial weights (m-th particle formula).
double mth_particle_pmf(const std::vector<long long>& y, int m, long long x,
                        double t, double b);

}  // namespace hlpt
