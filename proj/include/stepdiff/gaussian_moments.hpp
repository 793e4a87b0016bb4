#pragma once

namespace stepdiff {

// Closed-form partial moments of Gaussian and chi-square laws. These back the
// conditional Lindeberg/tail oracles of the built-in array models.

double normal_pdf(double z);
double normal_cdf(double z);
/// 1 - Phi(z), accurate in the far tail (erfc-based).
double normal_sf(double z);

/// E[X^p 1{lo < X < hi}] for X ~ N(mu, sigma^2), p in {0,...,4}, sigma > 0.
/// lo/hi may be +-infinity.
double gaussian_partial_moment(double mu, double sigma, double lo, double hi, int p);

/// E[X^2 1{|X| > theta}] for X ~ N(mu, sigma^2). sigma == 0 degenerates to
/// the point mass at mu.
double gaussian_truncated_square(double mu, double sigma, double theta);

/// P(|X| > theta) for X ~ N(mu, sigma^2).
double gaussian_abs_tail(double mu, double sigma, double theta);

/// P(Q > x) for Q ~ chi^2 with dof degrees of freedom.
double chi_square_sf(double dof, double x);

/// E[Q 1{Q > x}] for Q ~ chi^2_dof (equals dof * P(chi^2_{dof+2} > x)).
double chi_square_partial_mean(double dof, double x);

/// First and second moments of X * rho(c|X|) for X ~ N(mu, sigma^2), where
/// rho is the radial ramp of a canonical truncation with constant K:
/// rho(r) = 1 for r <= 1/K, 0 for r >= K, linear in between. The scale c
/// arises when the ramp is evaluated along a line {a u : u real} with |a| = c.
struct RampMoments {
    double mean;    // E[X rho(c|X|)]
    double second;  // E[X^2 rho(c|X|)^2]
};
RampMoments gaussian_ramp_moments(double mu, double sigma, double K, double c);

/// Same moments for the point mass at v (sigma == 0 case).
RampMoments point_ramp_moments(double v, double K, double c);

}  // namespace stepdiff
