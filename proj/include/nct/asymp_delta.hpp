// Expansions of F for large delta: elementary (c_k) form and the
// incomplete-gamma forms, plus the leading estimate of R.
#ifndef NCT_ASYMP_DELTA_HPP
#define NCT_ASYMP_DELTA_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "nct/detail/math.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"
#include "nct/result.hpp"

namespace nct {

struct ElemCoeffs {
    std::vector<double> c;
    std::vector<double> a;
    double y_at_build = 0;
    double n_at_build = 0;
};

inline constexpr std::size_t large_delta_max_terms = 60;

// binomial((n-1)/2, k), k = 0..kmax
inline std::vector<double> half_binomials(double n, std::size_t kmax)
{
    std::vector<double> a(kmax + 1);
    a[0] = 1;
    double e = 0.5 * n - 0.5;
    for (std::size_t k = 1; k <= kmax; ++k)
        a[k] = a[k - 1] * (e + 1 - double(k)) / double(k);
    return a;
}

inline ElemCoeffs elem_coeffs(double n, double yv, std::size_t kmax)
{
    if (!(n > 0) || !(yv > 0 && yv < 1))
        throw invalid_argument("elem_coeffs: need n > 0 and 0 < y < 1");
    if (yv > 1 - 1e-3)
        throw unsupported_range("elem_coeffs: y too close to 1");
    ElemCoeffs out;
    out.a = half_binomials(n, kmax);
    out.c.resize(kmax + 1);
    double w = 1 / (1 - yv);
    out.c[0] = w;
    for (std::size_t k = 1; k <= kmax; ++k)
        out.c[k] = w * (out.a[k] + yv * out.c[k - 1]);
    out.y_at_build = yv;
    out.n_at_build = n;
    return out;
}

// With kmax the sum has kmax+1 terms; without it, it stops at the smallest term.
inline TailValue cdf_large_delta_elem(const Params& prm, std::optional<std::size_t> kmax = std::nullopt)
{
    if (!(prm.x > 0) || !(prm.delta > 0))
        throw unsupported_range("large_delta_elem: need x > 0 and delta > 0");
    double y = prm.y, n = prm.n, a = 0.5 * n, zeta = prm.zeta;
    std::size_t kcap = kmax ? *kmax : large_delta_max_terms;
    auto co = elem_coeffs(n, y, kcap + 1);
    double log_pre = -0.5 * prm.one_minus_y * prm.delta * prm.delta + 0.5 * std::log(y)
                   + a * std::log(prm.one_minus_y) + (a - 1) * std::log(zeta) - log_gamma(a);

    detail::NeumaierSum sum;
    double poch = 1; // (-1)^k (1 - n/2)_k / zeta^k
    double last = 0, omitted = 0;
    std::size_t used = 0;
    for (std::size_t k = 0; k <= kcap + 1; ++k) {
        if (k > 0)
            poch *= -(1 - a + double(k - 1)) / zeta;
        double t = poch * co.c[k];
        if (k == kcap + 1 || (!kmax && k > 0 && (t == 0 || std::fabs(t) > std::fabs(last)))) {
            omitted = t;
            break;
        }
        sum.add(t);
        last = t;
        used = k + 1;
        if (t == 0)
            break;
    }
    double s = sum.value();
    double v = std::exp(log_pre) * s;
    double est = s != 0 ? std::fabs((kmax ? last : omitted) / s) : 1.0;
    return from_primary(v, true, est, Method::large_delta_elem, used);
}

enum class GammaForm { q_form, p_form, automatic };

namespace detail {

struct GammaSum {
    double value;
    double est;
    std::size_t terms;
};

inline GammaSum gamma_form_sum(const Params& prm, bool q_form, std::optional<std::size_t> kmax)
{
    double n = prm.n, a = 0.5 * n;
    double eta = prm.eta_gamma;
    double z = eta * prm.zeta;
    std::size_t kcap = kmax ? *kmax : large_delta_max_terms;
    auto bin = half_binomials(n, kcap + 1);
    // odd n: the binomial terminates and the sum is exact, so no smallest-term stop
    double e = 0.5 * n - 0.5;
    bool finite = std::floor(e) == e && e <= double(kcap);
    NeumaierSum sum;
    double last = 0, omitted = 0, eta_k = 1;
    std::size_t used = 0;
    for (std::size_t k = 0; k <= kcap + 1; ++k) {
        if (k > 0)
            eta_k *= eta;
        double ak = a - double(k);
        double g = q_form ? upper_gamma_q(ak, z) : (ak > 0 ? reg_gamma(ak, z).p : 1 - upper_gamma_q(ak, z));
        double t = bin[k] * eta_k * g;
        if (k == kcap + 1 || (!kmax && !finite && k > 0 && std::fabs(t) > std::fabs(last))) {
            omitted = t;
            break;
        }
        sum.add(t);
        last = t;
        used = k + 1;
        // terms vanish from here on (odd n, or even n in the Q form)
        if (bin[k + 1] == 0 || (q_form && std::floor(a) == a && a <= double(k + 1))) {
            omitted = 0;
            break;
        }
        if (!kmax && t != 0 && std::fabs(t) <= 1e-17 * std::fabs(sum.value())) {
            omitted = t;
            break;
        }
    }
    double s = sum.value();
    double lead = std::exp((0.5 * n - 0.5) * std::log1p(-prm.one_minus_y));
    double est = s != 0 ? std::fabs(omitted / s) : 1.0;
    return {lead * s, est, used};
}

} // namespace detail

inline TailValue cdf_large_delta_gamma(const Params& prm, std::optional<std::size_t> kmax = std::nullopt,
                                       GammaForm form = GammaForm::automatic)
{
    if (!(prm.x > 0))
        throw unsupported_range("large_delta_gamma: need x > 0");
    bool q_form = form == GammaForm::q_form || (form == GammaForm::automatic && prm.x <= prm.delta);
    auto r = detail::gamma_form_sum(prm, q_form, kmax);
    double rounding = 8 * detail::eps_d;
    if (q_form)
        return from_primary(r.value, true, std::max(r.est, rounding), Method::large_delta_gamma, r.terms);
    return from_primary(r.value, false, std::max(r.est, rounding), Method::large_delta_gamma, r.terms);
}

// log of the leading large-delta behavior of R_n(x; delta).
inline double log_r_leading_estimate(const Params& prm)
{
    if (!(prm.delta > 0) || !(prm.zeta > 0))
        return -std::numeric_limits<double>::infinity();
    double a = 0.5 * prm.n;
    return -0.5 * prm.delta * prm.delta + 0.5 * std::log(prm.y) + a * std::log(prm.one_minus_y)
         + log_gamma(a + 0.5) - detail::ln_2pi - (a + 0.5) * std::log(prm.zeta);
}

inline double r_leading_estimate(const Params& prm)
{
    return std::exp(log_r_leading_estimate(prm));
}

} // namespace nct

#endif
