// Expansions of F and R for large n.
#ifndef NCT_ASYMP_N_HPP
#define NCT_ASYMP_N_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "nct/asymp_delta.hpp"
#include "nct/detail/math.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"
#include "nct/quadrature.hpp"
#include "nct/result.hpp"

namespace nct {

// Gamma*(n/2) ~ sum a_k / n^k and 1/Gamma*(n/2) ~ sum (-1)^k a_k / n^k.
inline constexpr std::array<double, 4> gamma_star_coeffs = {1.0, 1.0 / 6, 1.0 / 72, -139.0 / 6480};

struct BoundedNCoeffs {
    std::vector<double> b;     // b_0..b_2
    std::vector<double> astar; // a_0..a_3
    std::vector<double> c;     // c_0..c_2
    double bfactor = 0;
};

inline BoundedNCoeffs bounded_n_coeffs(double x, double d)
{
    BoundedNCoeffs k;
    double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x, x6 = x5 * x;
    double d2 = d * d, d3 = d2 * d;
    double b1 = (x * d - x2 - 1) / 8;
    double b2 = (3 * d3 * x3 - 9 * d2 * x4 + 9 * d * x5 - 3 * x6 - 2 * d2 * x2 - 5 * d * x3 + 7 * x4 + d * x + x2 - 1)
              / 192;
    k.b = {0, b1, b2};
    k.astar.assign(gamma_star_coeffs.begin(), gamma_star_coeffs.end());
    k.c = {0, b1, b2 - k.astar[1] * b1};
    k.bfactor = x * std::sqrt(2 / std::numbers::pi) * std::exp(-0.5 * (d - x) * (d - x));
    return k;
}

inline constexpr double bounded_cap_factor = 0.35;
inline constexpr double bounded_n_min = 50;

inline TailValue cdf_large_n_bounded(const Params& prm, std::size_t kmax = 2, double cap_factor = bounded_cap_factor,
                                     double n_min = bounded_n_min)
{
    double n = prm.n, x = prm.x, d = prm.delta;
    double cap = cap_factor * std::sqrt(n);
    if (n < n_min || std::fabs(x) > cap || std::fabs(d) > cap)
        throw reroute("large_n_bounded: outside the bounded-parameter box");
    if (kmax < 1 || kmax > 2)
        throw invalid_argument("large_n_bounded: kmax must be 1 or 2");
    auto k = bounded_n_coeffs(x, d);
    double corr = k.c[1] / n + (kmax == 2 ? k.c[2] / (n * n) : 0.0);
    // c_2^2/c_1 alone collapses where c_2 happens to vanish
    double a1 = std::fabs(k.c[1]), a2 = std::fabs(k.c[2]);
    double err = kmax == 1 ? a2 / (n * n)
                           : 10 * std::max(a1, a2) * std::max(1.0, a2 / std::max(a1, 1e-300)) / (n * n * n);
    err *= std::fabs(k.bfactor);
    double w = (d - x) / std::sqrt(2.0);
    // the smaller tail is computed directly
    if (w >= 0) {
        double v = 0.5 * erfc(w) + k.bfactor * corr;
        return from_primary(v, true, v > 0 ? std::max(err / v, 2 * detail::eps_d) : 1.0, Method::large_n_bounded,
                            kmax);
    }
    double g = 0.5 * erfc(-w) - k.bfactor * corr;
    return from_primary(g, false, g > 0 ? std::max(err / g, 2 * detail::eps_d) : 1.0, Method::large_n_bounded, kmax);
}

namespace detail {

// Truncated power series arithmetic.
using Series = std::vector<double>;

inline Series ps_mul(const Series& a, const Series& b, std::size_t order)
{
    Series r(order + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= order; ++i)
        for (std::size_t j = 0; j < b.size() && i + j <= order; ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

inline Series ps_inv(const Series& a, std::size_t order)
{
    Series r(order + 1, 0.0);
    r[0] = 1 / a[0];
    for (std::size_t k = 1; k <= order; ++k) {
        double s = 0;
        for (std::size_t j = 1; j <= k && j < a.size(); ++j)
            s += a[j] * r[k - j];
        r[k] = -s / a[0];
    }
    return r;
}

inline Series ps_sqrt(const Series& a, std::size_t order)
{
    Series r(order + 1, 0.0);
    r[0] = std::sqrt(a[0]);
    for (std::size_t k = 1; k <= order; ++k) {
        double s = k < a.size() ? a[k] : 0.0;
        for (std::size_t j = 1; j < k; ++j)
            s -= r[j] * r[k - j];
        r[k] = s / (2 * r[0]);
    }
    return r;
}

// f(g(s)) with g(0) = 0.
inline Series ps_compose(const Series& f, const Series& g, std::size_t order)
{
    Series r(order + 1, 0.0);
    for (std::size_t i = f.size(); i-- > 0;) {
        r = ps_mul(r, g, order);
        r[0] += f[i];
    }
    return r;
}

} // namespace detail

struct UniformSaddle {
    double z = 0;
    double t0 = 0;
    double t0m1 = 0;  // t0 - 1
    double rho = 0;   // 1/y
    double rhom1 = 0; // rho - 1
    double dist = 0;  // rho - t0
    double eta_u = 0;
    double eta_radius = 0; // convergence radius of the series in eta
    std::vector<double> tk; // tk[k] = t_k, tk[0] = t0
    std::vector<double> g;  // g_0, g_2
    std::vector<double> c;  // c_0, c_1
    bool small_eta_used = false;
    std::optional<double> c2_estimate;
};

inline constexpr double eta_switch_default = 0.1;
inline constexpr double eta_radius_fraction = 0.25;
inline constexpr std::size_t saddle_series_order = 24;

namespace detail {

// phi(t0+u) - phi(t0) = sum_{m>=2} phi_m u^m
inline Series phase_coeffs(double t0, double t0m1, std::size_t order)
{
    Series p(order + 1, 0.0);
    for (std::size_t m = 2; m <= order; ++m) {
        double sg = (m % 2 == 0) ? -1.0 : 1.0;
        // t0^-m - t0m1^-m without cancellation
        double dm = double(m);
        p[m] = sg / dm * std::pow(t0m1, -dm) * std::expm1(dm * std::log1p(-1 / t0));
    }
    return p;
}

// Coefficients t_1..t_K of t - t0 as a series in s, with phi(t) - phi(t0) = s^2.
inline Series revert_phase(const Series& phi, std::size_t order)
{
    // s = u h(u), h(u) = sqrt(sum phi_m u^{m-2})
    Series q(order + 1, 0.0);
    for (std::size_t m = 2; m < phi.size() && m - 2 <= order; ++m)
        q[m - 2] = phi[m];
    Series hinv = ps_inv(ps_sqrt(q, order), order);
    Series u(order + 1, 0.0);
    u[1] = hinv[0];
    for (std::size_t it = 0; it < order + 1; ++it) {
        Series r = ps_compose(hinv, u, order);
        Series nu(order + 1, 0.0);
        for (std::size_t k = 1; k <= order; ++k)
            nu[k] = r[k - 1];
        u = nu;
    }
    return u;
}

} // namespace detail

// Saddle point t0 and eta of the uniform expansion.
inline UniformSaddle saddle_eta(const Params& prm)
{
    if (!(prm.x > 0) || !(prm.delta > 0))
        throw invalid_argument("saddle_eta: need x > 0 and delta > 0");
    UniformSaddle s;
    s.z = prm.y * prm.delta * prm.delta / prm.n;
    if (!(s.z > 0) || !std::isfinite(s.z))
        throw invalid_argument("saddle_eta: z must be positive");
    double z = s.z;
    double r = std::sqrt(1 + 4 / z);
    s.t0m1 = 2 / (z * (1 + r));
    s.t0 = 1 + s.t0m1;
    s.rho = 1 + prm.eta_gamma;
    s.rhom1 = prm.eta_gamma;
    s.dist = prm.eta_gamma - s.t0m1;
    double d = s.dist;
    double eta2;
    if (std::fabs(d) < 0.5 * s.t0m1) {
        auto phi = detail::phase_coeffs(s.t0, s.t0m1, 64);
        double p = d * d;
        detail::NeumaierSum acc;
        for (std::size_t m = 2; m <= 64; ++m, p *= d)
            acc.add(phi[m] * p);
        eta2 = acc.value();
    } else {
        eta2 = z * d + std::log1p(d / s.t0) - std::log1p(d / s.t0m1);
    }
    s.eta_u = std::copysign(std::sqrt(std::max(eta2, 0.0)), d);
    // the negative saddle limits t(s)
    double tn = (z - std::sqrt(z * (z + 4))) / (2 * z);
    double phin = z * tn + std::log(tn / (tn - 1));
    double phi0 = z * s.t0 + std::log(s.t0 / s.t0m1);
    s.eta_radius = std::sqrt(std::fabs(phin - phi0));
    return s;
}

// t_k and the coefficients g_0, g_2, c_0, c_1.
inline UniformSaddle uniform_coeffs(UniformSaddle s, double eta_switch = eta_switch_default)
{
    double t0 = s.t0, tm = s.t0m1, rho = s.rho, eta = s.eta_u;
    double w = 2 * t0 - 1;
    double t1 = std::sqrt(2.0) * t0 * tm / std::sqrt(w);
    double t2 = t1 * t1 * (3 * t0 * t0 - 3 * t0 + 1) / (3 * t0 * tm * w);
    double t3 = t1 * t1 * t1 * (18 * std::pow(t0, 4) - 36 * std::pow(t0, 3) + 24 * t0 * t0 - 6 * t0 + 1)
              / (36 * t0 * t0 * w * w * tm * tm);
    double t4 = -std::pow(t1, 4) * (9 * t0 * t0 - 9 * t0 + 1) / (270 * std::pow(t0, 3) * std::pow(w, 3) * std::pow(tm, 3));
    s.tk = {t0, t1, t2, t3, t4};
    double g0 = 0, g2 = 0;
    bool small = std::fabs(eta) < eta_switch && std::fabs(eta) < eta_radius_fraction * s.eta_radius;
    s.small_eta_used = small;
    if (std::fabs(eta) < 2 * eta_radius_fraction * s.eta_radius) {
        // g(s) = (N(s) - 1)/(eta - s) with N = sqrt(rho/t) t' / Q and rho - t(s) = (eta - s) Q(s)
        const std::size_t K = saddle_series_order;
        auto u = detail::revert_phase(detail::phase_coeffs(t0, tm, K + 2), K + 1);
        detail::Series t(K + 1), dt(K + 1, 0.0), q(K + 1, 0.0);
        t[0] = t0;
        for (std::size_t k = 1; k <= K; ++k)
            t[k] = u[k];
        for (std::size_t k = 1; k <= K + 1; ++k)
            dt[k - 1] = double(k) * u[k];
        for (std::size_t i = 0; i <= K; ++i) {
            double acc = 0, e = 1;
            for (std::size_t k = i + 1; k <= K + 1; ++k, e *= eta)
                acc += u[k] * e;
            q[i] = acc;
        }
        auto ratio = detail::ps_inv(t, K);
        for (double& v : ratio)
            v *= rho;
        auto nser = detail::ps_mul(detail::ps_mul(detail::ps_sqrt(ratio, K), dt, K), detail::ps_inv(q, K), K);
        auto gi = [&](std::size_t i) {
            double acc = 0, e = 1;
            for (std::size_t j = i + 1; j <= K; ++j, e *= eta)
                acc += nser[j] * e;
            return -acc;
        };
        if (small) {
            g0 = gi(0);
            g2 = gi(2);
        }
        // only for the size of the first omitted term: c_2 = 3 g_4
        s.c2_estimate = 3 * gi(4);
    }
    if (!small) {
        double d = s.dist;
        double sq = std::sqrt(rho / t0);
        g0 = sq * t1 / d - 1 / eta;
        // the a_0..a_5 polynomial, re-expanded about rho = t0 = 1 (it vanishes there)
        double r = s.rhom1, u = tm;
        double pol = 2 * r * r - 3 * r * r * u * u
                   + u * u * (2 + u * (12 + u * (33 + 24 * u)))
                   + r * u * (20 + u * (132 + u * (282 + u * (264 + 96 * u))));
        g2 = sq * t1 * t1 * t1 * pol / (24 * t0 * t0 * tm * tm * w * w * d * d * d) - 1 / (eta * eta * eta);
    }
    s.g = {g0, g2};
    s.c = {g0, -g2};
    return s;
}

struct RSaddle {
    double tp = 0;
    std::vector<double> rk; // r_1, r_2
    std::vector<double> d;  // d_0, d_1
    double psi_at_tp = 0;
};

inline constexpr double r_saddle_guard = 1e-3;

inline RSaddle r_saddle(const Params& prm)
{
    if (!(prm.x > 0) || !(prm.delta > 0))
        throw invalid_argument("r_saddle: need x > 0 and delta > 0");
    RSaddle s;
    double z = prm.y * prm.delta * prm.delta / prm.n;
    double y = prm.y;
    double tp = 2 / (z * (1 + std::sqrt(1 + 4 / z)));
    s.tp = tp;
    s.psi_at_tp = z * tp - std::log(tp) + std::log1p(tp);
    double w = 2 * tp + 1;
    double r1 = std::sqrt(2.0) * tp * (tp + 1) / std::sqrt(w);
    double r2 = r1 * r1 * (3 * tp * tp + 3 * tp + 1) / (3 * tp * (tp + 1) * w);
    s.rk = {r1, r2};
    double d0 = r1 / (std::sqrt(tp) * (1 + y * tp));
    double b0 = -1, b1 = -14 * y - 6, b2 = 11 * y * y - 84 * y - 3, b3 = 6 * y * (11 * y - 31),
           b4 = 3 * y * (43 * y - 72), b5 = 24 * y * (3 * y - 4);
    double pol = b0 + tp * (b1 + tp * (b2 + tp * (b3 + tp * (b4 + tp * b5))));
    double d1 = r1 * r1 * r1 * pol
              / (24 * std::pow(tp, 2.5) * (tp + 1) * (tp + 1) * w * w * std::pow(tp * y + 1, 3));
    s.d = {d0, d1};
    return s;
}

// R_n(x; delta) for large n; kmax = 0 keeps d_0 only.
inline double r_large_n(const Params& prm, std::size_t kmax = 1)
{
    auto s = r_saddle(prm);
    if (s.tp < r_saddle_guard)
        throw reroute("r_large_n: saddle point too close to the origin");
    double n = prm.n;
    double l = -0.5 * prm.delta * prm.delta + 0.5 * std::log(prm.y) + 0.5 * n * std::log(prm.one_minus_y)
             - 0.5 * std::log(2 * std::numbers::pi * n) - 0.5 * n * s.psi_at_tp;
    double sum = s.d[0] + (kmax >= 1 ? s.d[1] / n : 0.0);
    return std::exp(l) * sum;
}

inline constexpr double uniform_n_min = 30;

// F from twice the uniform expansion. Checked against the series, the doubled
// expansion already tracks F itself (adding R makes it worse once R is
// visible), so R is not added here. With delta < x the complement is
// computed directly.
inline TailValue cdf_large_n_uniform(const Params& prm, std::size_t kmax = 1, double n_min = uniform_n_min,
                                     double eta_switch = eta_switch_default)
{
    if (prm.n < n_min)
        throw reroute("large_n_uniform: n below threshold");
    if (!(prm.x > 0) || !(prm.delta > 0))
        throw reroute("large_n_uniform: need x > 0 and delta > 0");
    if (kmax > 1)
        throw invalid_argument("large_n_uniform: only c_0 and c_1 are available");
    double n = prm.n;
    auto s = uniform_coeffs(saddle_eta(prm), eta_switch);
    double eta = s.eta_u;
    double lb = -0.5 * n * eta * eta - 0.5 * std::log(2 * std::numbers::pi * n);
    double sum = s.c[0] + (kmax >= 1 ? s.c[1] / n : 0.0);
    double bracket = std::exp(lb) * sum;
    double c1n = std::fabs(s.c[1] / n);
    double next = c1n;
    if (kmax >= 1)
        next = s.c2_estimate ? std::fabs(*s.c2_estimate) / (n * n)
                             : c1n * std::max(c1n / std::max(std::fabs(s.c[0]), 1e-300), 1 / n);
    double err_abs = 10 * std::exp(lb) * next;
    bool upper = prm.delta < prm.x; // F near 1
    double v = upper ? 0.5 * erfc(-eta * std::sqrt(0.5 * n)) - bracket : 0.5 * erfc(eta * std::sqrt(0.5 * n)) + bracket;
    double est = v > 0 ? std::max(err_abs / v, 2 * detail::eps_d) : 1.0;
    return from_primary(v, !upper, est, Method::large_n_uniform, kmax + 1);
}

} // namespace nct

#endif
