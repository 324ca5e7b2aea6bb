#pragma once

#include <complex>
#include <vector>

#include "chargefcs/core.hpp"

namespace chargefcs::analytic {

using cplx = std::complex<double>;

/// omega(lambda) for a step of densities rho_L | rho_R.
cplx omega(double lambda, double rho_left, double rho_right);

/// F(omega) = -Li_{3/2}(-omega) / sqrt(pi). Uses the power series for |omega| <= 0.9 and
/// the Bose-Einstein integral representation beyond. Throws ConfigError on the branch
/// cut (omega real and < -1) and NumericalError if the quadrature misses its target.
cplx sep_F(cplx w);

/// Power series of F, summed until terms drop below tol relative to the running sum.
/// Requires |omega| < 1.
cplx sep_F_series(cplx w, double tol = 1e-16);

/// Integral representation F(w) = (2 w / pi) * int_0^inf sqrt(u) / (e^u + w) du,
/// evaluated after u = v^2. Valid off the cut.
cplx sep_F_integral(cplx w);

/// chi(lambda) ~ sqrt(t) F(omega(lambda)).
cplx sep_cgf(double lambda, double t, double rho_left, double rho_right);

/// C_m = (-i d/dlambda)^m chi at lambda = 0, from the Taylor coefficients of omega(lambda)
/// composed with the series of F. Orders 1..4.
double sep_cumulant(int order, double t, double rho_left, double rho_right);

/// The same cumulant from nine-point central differences of sep_cgf with step h.
/// Even orders use Re chi and odd orders Im chi, which keeps round-off relative.
double sep_cumulant_finite_difference(int order, double t, double rho_left, double rho_right, double h = 1e-2);

/// Equilibrium excess kurtosis at half filling: (4 - 3 sqrt 2) sqrt(pi) / (2 sqrt t).
double kurtosis_prediction(double t);

/// Spin-wave correction to the variance of the softened two-chain model,
/// a(d) tanh^2(mu/2) / (16 sqrt(pi t)); tanh^2 = 1 at mu = +-inf.
double spinwave_dc2(ChemicalPotential mu, double t, double d);

/// Linear-response third-cumulant correction 3 a(d) mu / (64 sqrt(pi t)).
/// Only meaningful for |mu| << 1; no check is made.
double spinwave_dc3(double mu, double t, double d);

/// Uniform grid of n points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int n);

/// Default counting-field grid: 101 points on [-3, 3].
std::vector<double> default_lambda_grid();

}  // namespace chargefcs::analytic
