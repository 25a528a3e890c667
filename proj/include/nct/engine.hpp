// Public evaluation API: route dispatch, reflection, density and quantile.
#ifndef NCT_ENGINE_HPP
#define NCT_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nct/asymp_delta.hpp"
#include "nct/asymp_n.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"
#include "nct/quadrature.hpp"
#include "nct/result.hpp"
#include "nct/series.hpp"

namespace nct {

struct MethodConfig {
    double tol = 1e-13;
    std::optional<double> zeta_min; // unset: max(30, 2n)
    double n_min_uniform = uniform_n_min;
    double n_min_bounded = bounded_n_min;
    double x_cap_factor = bounded_cap_factor;
    double eta_switch = eta_switch_default;
    std::size_t max_terms = 1000000;
    std::optional<Method> force_method;

    void validate() const
    {
        if (!(tol > 1e-16 && tol < 1e-2))
            throw invalid_argument("tol must lie in (1e-16, 1e-2)");
        if ((zeta_min && !(*zeta_min > 0)) || !(n_min_uniform > 0) || !(n_min_bounded > 0) || !(x_cap_factor > 0)
            || !(eta_switch > 0) || max_terms == 0)
            throw invalid_argument("thresholds must be positive");
    }
    double zeta_threshold(double n) const { return zeta_min ? *zeta_min : std::max(30.0, 2 * n); }
};

namespace detail {

// rounding seen against a high-precision oracle reaches ~110 eps
inline constexpr double series_floor = 256 * eps_d;

inline TailValue closed_form_x0(double delta)
{
    double f = 0.5 * erfc(delta / std::sqrt(2.0));
    double g = 0.5 * erfc(-delta / std::sqrt(2.0));
    bool fp = f <= g;
    TailValue t = from_primary(fp ? f : g, fp, 4 * eps_d, Method::series, 1);
    return t;
}

// Student's t, x > 0: G = I_{n/(n+x^2)}(n/2, 1/2)/2
inline TailValue central(const Params& prm)
{
    double g = 0.5 * inc_beta_pair(prm.one_minus_y, prm.y, 0.5 * prm.n, 0.5).i;
    return from_primary(g, false, series_floor, Method::series, 1);
}

// delta < 0 < x: G(x; delta) = R(x; |delta|)
inline TailValue via_r(const Params& prm, const MethodConfig& cfg)
{
    auto q = make_params(prm.x, -prm.delta, prm.n);
    std::optional<TailValue> s;
    if (q.delta < series_delta_limit) {
        try {
            auto r = r_series(q, 1e-16, cfg.max_terms);
            double est = std::max(r.truncation_bound + r.rounding_bound, series_floor);
            s = from_primary(r.value, false, est, Method::series, r.terms_used);
            if (est <= cfg.tol)
                return *s;
        } catch (const reroute&) {
        } catch (const capacity_error&) {
        }
    }
    // the alternating series cancels; the Laplace form does not
    auto t = r_laplace(q, std::max(1e-15, 0.01 * cfg.tol));
    TailValue out = from_primary(t.value, false, t.est_rel_err, Method::trapezoid, t.terms_used);
    out.underflow = t.underflow;
    if (s && s->est_rel_err < out.est_rel_err)
        return *s;
    return out;
}

inline double primary_of(const TailValue& t) { return t.primary_is_value ? t.value : t.complement; }

inline TailValue run_route_raw(Method m, const Params& prm, const MethodConfig& cfg);

// One route at x > 0, delta > 0. Throws reroute when it does not apply or
// carries no accuracy at all.
inline TailValue run_route(Method m, const Params& prm, const MethodConfig& cfg)
{
    auto t = run_route_raw(m, prm, cfg);
    if (!(t.est_rel_err < 1))
        throw reroute(std::string(method_name(m)) + ": no accuracy at these parameters");
    return t;
}

inline TailValue run_route_raw(Method m, const Params& prm, const MethodConfig& cfg)
{
    bool upper = prm.delta < prm.x;
    switch (m) {
    case Method::series: {
        detail::check_series_domain(prm);
        if (start_index(0.5 * prm.delta * prm.delta, 1e-16) > cfg.max_terms)
            throw reroute("series: start index above term cap");
        auto r = upper ? g_series(prm, 1e-16, cfg.max_terms) : f_series(prm, 1e-16, cfg.max_terms);
        double est = std::max(r.truncation_bound + r.rounding_bound, series_floor);
        return from_primary(r.value, !upper, est, Method::series, r.terms_used);
    }
    case Method::trapezoid: {
        // value of tail_trapezoid is the requested tail
        auto t = tail_trapezoid(prm, upper, std::nullopt, std::max(1e-15, 0.01 * cfg.tol));
        return upper ? swapped(t) : t;
    }
    case Method::large_delta_elem:
    case Method::large_delta_gamma: {
        auto t = m == Method::large_delta_elem ? cdf_large_delta_elem(prm) : cdf_large_delta_gamma(prm);
        // R is not part of these expansions
        double p = primary_of(t);
        double r = r_leading_estimate(prm);
        t.est_rel_err = 10 * t.est_rel_err + (p > 0 ? r / p : 0.0);
        return t;
    }
    case Method::large_n_bounded:
        return cdf_large_n_bounded(prm, 2, cfg.x_cap_factor, cfg.n_min_bounded);
    case Method::large_n_uniform:
        return cdf_large_n_uniform(prm, 1, cfg.n_min_uniform, cfg.eta_switch);
    }
    throw reroute("unknown route");
}

inline bool route_has_r(Method m) { return m != Method::large_delta_elem && m != Method::large_delta_gamma; }

inline void mark_r(TailValue& t, const Params& prm, double tol)
{
    double lr = log_r_leading_estimate(prm);
    t.r_term_included = route_has_r(t.method) && t.value > 0 && lr > std::log(tol * t.value);
}

// Routes tried for x > 0, delta > 0, in order of precedence.
inline std::vector<Method> candidate_routes(const Params& prm, const MethodConfig& cfg)
{
    std::vector<Method> out;
    if (prm.zeta >= cfg.zeta_threshold(prm.n))
        out.push_back(Method::large_delta_gamma);
    if (prm.n >= cfg.n_min_uniform)
        out.push_back(Method::large_n_uniform);
    double cap = cfg.x_cap_factor * std::sqrt(prm.n);
    if (prm.n >= cfg.n_min_bounded && prm.x <= cap && prm.delta <= cap)
        out.push_back(Method::large_n_bounded);
    if (prm.delta < series_delta_limit)
        out.push_back(Method::series);
    out.push_back(Method::trapezoid);
    return out;
}

inline TailValue dispatch_positive(const Params& prm, const MethodConfig& cfg)
{
    if (cfg.force_method) {
        try {
            auto t = run_route(*cfg.force_method, prm, cfg);
            mark_r(t, prm, cfg.tol);
            return t;
        } catch (const reroute& e) {
            throw evaluation_failure(std::string(method_name(*cfg.force_method)) + " not applicable: " + e.what());
        } catch (const capacity_error& e) {
            throw evaluation_failure(std::string(method_name(*cfg.force_method)) + ": " + e.what());
        }
    }
    std::optional<TailValue> best;
    std::string notes;
    for (Method m : candidate_routes(prm, cfg)) {
        try {
            auto t = run_route(m, prm, cfg);
            if (!std::isfinite(t.value) || t.value < 0 || t.value > 1)
                throw reroute("value out of range");
            if (t.est_rel_err <= cfg.tol) {
                mark_r(t, prm, cfg.tol);
                return t;
            }
            if (!best || t.est_rel_err < best->est_rel_err)
                best = t;
        } catch (const reroute& e) {
            notes += std::string(method_name(m)) + ": " + e.what() + "; ";
        } catch (const capacity_error& e) {
            notes += std::string(method_name(m)) + ": " + e.what() + "; ";
        }
    }
    if (!best)
        throw evaluation_failure("no route could evaluate F: " + notes);
    mark_r(*best, prm, cfg.tol);
    return *best;
}

} // namespace detail

// F_n(x; delta) with its complement.
inline TailValue cdf(double x, double delta, double n, const MethodConfig& cfg = {})
{
    cfg.validate();
    auto prm = make_params(x, delta, n);
    if (x < 0)
        return swapped(cdf(-x, -delta, n, cfg));
    if (x == 0)
        return detail::closed_form_x0(delta);
    if (delta == 0 && !cfg.force_method)
        return detail::central(prm);
    if (delta < 0 && !cfg.force_method)
        return detail::via_r(prm, cfg);
    if (delta <= 0)
        throw evaluation_failure("forced routes need delta > 0");
    return detail::dispatch_positive(prm, cfg);
}

// G_n = 1 - F_n; value and complement exchanged.
inline TailValue sf(double x, double delta, double n, const MethodConfig& cfg = {})
{
    return swapped(cdf(x, delta, n, cfg));
}

inline double pdf(double x, double delta, double n, const MethodConfig& cfg = {})
{
    cfg.validate();
    auto prm = make_params(x, delta, n);
    return pdf_quadrature(prm, std::max(1e-15, 0.01 * cfg.tol));
}

// x with F_n(x; delta) = p.
inline double quantile(double p, double delta, double n, const MethodConfig& cfg = {})
{
    cfg.validate();
    if (!(p > 1e-300 && p < 1 - 1e-16))
        throw invalid_argument("quantile: p must lie in (1e-300, 1 - 1e-16)");
    make_params(0, delta, n);
    bool lower = p <= 0.5;
    // signed residual F(x) - p in the smaller tail
    auto resid = [&](double x) {
        auto t = cdf(x, delta, n, cfg);
        return lower ? t.value - p : (1 - p) - t.complement;
    };
    double target = 10 * cfg.tol * std::min(p, 1 - p);

    // first guess from the erfc leading term
    double w = erfc_inv(2 * p);
    double x0 = delta - std::sqrt(2.0) * w;
    if (n >= cfg.n_min_uniform && delta > 0) {
        double eta = std::sqrt(2 / n) * w;
        // eta decreases in x; solve eta(x) = eta on x > 0 by bisection in log x
        auto eta_of = [&](double x) { return saddle_eta(make_params(x, delta, n)).eta_u; };
        double lo = 1e-3 * delta, hi = 1e3 * delta;
        if (eta_of(lo) > eta && eta_of(hi) < eta) {
            for (int i = 0; i < 200 && hi / lo > 1 + 1e-12; ++i) {
                double mid = std::sqrt(lo * hi);
                (eta_of(mid) > eta ? lo : hi) = mid;
            }
            x0 = std::sqrt(lo * hi);
        }
    }

    // bracket
    double f0 = resid(x0);
    if (std::fabs(f0) <= target)
        return x0;
    double step = std::max(1.0, 0.1 * std::fabs(x0));
    double a = x0, b = x0, fa = f0, fb = f0;
    for (int i = 0; i < 200; ++i) {
        if (f0 < 0) {
            a = b;
            fa = fb;
            b = b + step;
            fb = resid(b);
            if (fb >= 0)
                break;
        } else {
            b = a;
            fb = fa;
            a = a - step;
            fa = resid(a);
            if (fa <= 0)
                break;
        }
        step *= 2;
    }
    if (!(fa <= 0 && fb >= 0))
        throw evaluation_failure("quantile: could not bracket the root", a, b);

    bool use_a = std::fabs(fa) < std::fabs(fb);
    double x = use_a ? a : b, fx = use_a ? fa : fb;
    for (int it = 0; it < 100; ++it) {
        if (std::fabs(fx) <= target)
            return x;
        if (fx < 0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a <= 4 * detail::eps_d * std::max(std::fabs(a), std::fabs(b)))
            return std::fabs(fa) < std::fabs(fb) ? a : b;
        double d = pdf(x, delta, n, cfg);
        double xn = d > 0 ? x - fx / d : a - 1;
        if (!(xn > a && xn < b))
            xn = 0.5 * (a + b);
        x = xn;
        fx = resid(x);
    }
    throw evaluation_failure("quantile: no convergence after 100 iterations", a, b);
}

} // namespace nct

#endif
