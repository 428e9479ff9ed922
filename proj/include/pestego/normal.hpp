#pragma once

namespace pestego::stat {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1). Rational approximation
/// (Acklam) followed by one Halley step against erfc; absolute error is
/// well below 1e-9 across the range. Throws InvalidParams outside (0, 1).
double normal_quantile(double p);

}  // namespace pestego::stat
