#ifndef NCT_PARAMS_HPP
#define NCT_PARAMS_HPP

#include <cmath>
#include <limits>

#include "nct/error.hpp"

namespace nct {

struct Params {
    double x = 0;
    double delta = 0;
    double n = 1;
    double y = 0;           // x^2/(n+x^2)
    double one_minus_y = 1; // n/(n+x^2), computed without cancellation
    double zeta = 0;        // delta^2 y / 2
    double eta_gamma = 0;   // (1-y)/y = n/x^2
    double xi = 0;          // x/sqrt(n)
    double sigma = 0;       // delta/sqrt(n)
    double z_scaled = 0;    // y sigma^2
    double rho = 0;         // 1/y
};

inline Params make_params(double x, double delta, double n)
{
    if (std::isnan(x) || std::isnan(delta) || std::isnan(n))
        throw invalid_argument("NaN parameter");
    if (!std::isfinite(x) || !std::isfinite(delta))
        throw invalid_argument("x and delta must be finite");
    if (!(n > 0) || !std::isfinite(n))
        throw invalid_argument("n must be positive and finite");
    Params p;
    p.x = x;
    p.delta = delta;
    p.n = n;
    double x2 = x * x;
    if (x2 >= n) {
        double r = n / x2;
        p.y = 1 / (1 + r);
        p.one_minus_y = r / (1 + r);
    } else {
        p.y = x2 / (n + x2);
        p.one_minus_y = n / (n + x2);
    }
    p.zeta = 0.5 * delta * delta * p.y;
    constexpr double inf = std::numeric_limits<double>::infinity();
    p.eta_gamma = x == 0 ? inf : n / x2;
    p.xi = x / std::sqrt(n);
    p.sigma = delta / std::sqrt(n);
    p.z_scaled = p.y * p.sigma * p.sigma;
    p.rho = x == 0 ? inf : 1 / p.y;
    return p;
}

} // namespace nct

#endif
