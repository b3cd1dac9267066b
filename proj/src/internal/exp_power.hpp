#pragma once

namespace gerf::special::detail {

// int_0^t exp(-s^p) ds for t >= 0, p > 0.
double exp_power_integral(double t, double p);

}  // namespace gerf::special::detail
