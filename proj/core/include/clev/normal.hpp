#pragma once

namespace clev {

// Standard normal density.
double norm_pdf(double x);

// Standard normal distribution function, accurate in both tails.
double norm_cdf(double x);

// Standard normal quantile, Wichura's AS241 (PPND16).  Accurate to
// ~1e-15 for p in (0,1); throws InvalidArgument outside.
double norm_quantile(double p);

// P(Z1 <= h, Z2 <= k) for a standard bivariate normal pair with
// correlation rho.  Evaluated as a one-dimensional integral of the
// conditional normal CDF with adaptive Gauss-Kronrod quadrature;
// absolute error below 1e-10.  |rho| > 1 throws InvalidArgument.
double bvn_cdf(double h, double k, double rho);

}  // namespace clev
