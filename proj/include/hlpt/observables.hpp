#pragma once
// Closed-form scaling constants for the height-function fluctuation limits,
// KPZ scaling-theory quantities, regime classification, and empirical
// statistics (rescaled samples, empirical CDF, Kolmogorov-Smirnov distance).

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hlpt {

enum class Regime { GUE, GOE2, Gaussian, SubcriticalFan };

std::string to_string(Regime regime);

struct ScalingConstants {
  Regime regime = Regime::SubcriticalFan;
  double nu = 0.0, b = 0.0, rho = 1.0;
  double alpha = 0.0;  // (1-rho)/rho
  // Defined whenever nu(1-b) > 1; the t^{1/3} family.
  std::optional<double> m_nu, sigma_nu, varrho;
  // Defined in the Gaussian regime only (radicand of sigma_tilde < 0
  // elsewhere; reported as not-applicable, never NaN).
  std::optional<double> m_tilde, sigma_tilde;
};

// Classifies (nu, b, rho) against the critical density
// rho_c = 1 - (nu(1-b))^{-1/2} and fills the applicable constants:
//   m_nu    = (sqrt(nu(1-b)) - 1)^2 / (1-b)
//   sigma_nu= (sqrt(nu(1-b)) - 1)^{2/3} / ((1-b)^{1/2} nu^{1/6})
//   varrho  = b (sqrt(nu(1-b)) - 1)
//   m_tilde = nu/(1+alpha) - 1/(alpha(1-b))
//   sigma_tilde = sqrt((nu(1-b)(1-rho)^2 - 1) / (alpha (1-b)))
// Equality with rho_c is detected at absolute tolerance 1e-12; `force`
// overrides the classification for exact user-supplied criticality.
ScalingConstants classify_regime(double nu, double b, double rho,
                                 std::optional<Regime> force = std::nullopt);

// Law-of-large-numbers limit of N_{nu t}(t)/t: the limit shape value for
// nu > nu_0 = (1-b)^{-1}, zero in the rarefaction fan.
double limit_shape(double nu, double b);

struct KpzQuantities {
  double j_rho = 0.0;         // steady-state current rho/((1-rho)(1-b))
  double a_rho = 0.0;         // integrated covariance rho(1-rho)
  double lambda_rho = 0.0;    // -j''(rho) = -2 y^{3/2} (1-b)^{1/2}
  double sigma_check = 0.0;   // (-lambda A^2 / 2)^{1/3}
};

KpzQuantities kpz_quantities(double rho, double b);

// Centred and scaled height samples: (m t - N)/(sigma t^{1/3}) in the
// GUE/GOE2 regimes, (m~ t - N)/(sigma~ t^{1/2}) in the Gaussian regime.
std::vector<double> rescale_fluctuations(
    const std::vector<std::pair<double, long long>>& samples,
    const ScalingConstants& constants);

// Sup-norm distance between the empirical CDF of samples and cdf.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// Standard normal CDF.
double normal_cdf(double s);

}  // namespace hlpt
