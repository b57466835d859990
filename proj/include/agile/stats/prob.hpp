#pragma once

namespace agile::stats {

// Upper tail P(X >= x) of the chi-squared distribution with df degrees of
// freedom, via the regularized incomplete gamma function.
double chi_squared_sf(double x, int df);

// Standard normal upper tail P(Z >= z) and CDF.
double normal_sf(double z);
double normal_cdf(double z);

}  // namespace agile::stats
