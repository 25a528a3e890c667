#ifndef NCT_DETAIL_MATH_HPP
#define NCT_DETAIL_MATH_HPP

#include <cmath>
#include <limits>
#include <numbers>

namespace nct::detail {

inline constexpr double eps_d = std::numeric_limits<double>::epsilon();
inline constexpr double ln_2pi = 1.8378770664093454835606594728112;
inline constexpr double ln_sqrt_2pi = 0.91893853320467274178032973640562;
inline constexpr double sqrt_2pi = 2.5066282746310005024157652848110;
inline constexpr double inv_sqrt_pi = 0.56418958354775628694807945156077;

// Compensated (Neumaier) running sum.
struct NeumaierSum {
    double s = 0;
    double c = 0;

    void add(double v) noexcept
    {
        double t = s + v;
        if (std::fabs(s) >= std::fabs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double value() const noexcept { return s + c; }
};

// log(1+x) - x without cancellation near 0.
inline double log1pmx(double x)
{
    if (std::fabs(x) < 0.25) {
        // -x^2/2 + x^3/3 - ...
        double term = x;
        double sum = 0;
        for (int k = 2; k < 60; ++k) {
            term *= -x;
            double add = term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum))
                break;
        }
        return sum;
    }
    return std::log1p(x) - x;
}

// exp(x) - 1 - x without cancellation near 0.
inline double expm1mx(double x)
{
    if (std::fabs(x) < 0.5) {
        double term = x;
        double sum = 0;
        for (int k = 2; k < 40; ++k) {
            term *= x / k;
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum))
                break;
        }
        return sum;
    }
    return std::expm1(x) - x;
}

// a*log(a/z) + z - a >= 0, the exponent deficit of z^a e^{-z} against its peak.
inline double bd0(double a, double z)
{
    double u = (z - a) / a;
    if (u > -0.5)
        return -a * log1pmx(u);
    return a * std::log(a / z) + z - a;
}

// log(1 + e^u)
inline double softplus(double u)
{
    if (u > 35)
        return u + std::exp(-u);
    return std::log1p(std::exp(u));
}

inline bool is_nonpositive_integer(double a)
{
    return a <= 0 && a == std::floor(a);
}

} // namespace nct::detail

#endif
