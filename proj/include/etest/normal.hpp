#pragma once

namespace etest {

double normal_cdf(double z);
double normal_sf(double z);
// log of the standard normal CDF, accurate far into the lower tail.
double log_normal_cdf(double z);
double normal_quantile(double p);

}  // namespace etest
