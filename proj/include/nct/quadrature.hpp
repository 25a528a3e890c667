// Trapezoidal rule on exp-transformed integrals: F and G from the erfc
// integral, R from its Laplace form, and the density.
#ifndef NCT_QUADRATURE_HPP
#define NCT_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

#include "nct/detail/math.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"
#include "nct/result.hpp"

namespace nct {

struct QuadratureSpec {
    double s_min = 0;
    double s_max = 0;
    double step = 0;
    std::size_t nodes = 0;
};

inline QuadratureSpec make_spec(double s_min, double s_max, double step)
{
    if (!(s_min < s_max) || !(step > 0))
        throw invalid_argument("quadrature spec: need s_min < s_max and step > 0");
    QuadratureSpec q{s_min, s_max, step, 0};
    q.nodes = static_cast<std::size_t>(std::floor((s_max - s_min) / step + 1e-9)) + 1;
    return q;
}

// log of A_n = (n/2)^{n/2}/Gamma(n/2), and of A_n e^{-n/2}.
struct NormConst {
    double log_a_n;
    double log_a_n_scaled;
};

inline NormConst norm_const(double n)
{
    double a = 0.5 * n;
    double scaled = 0.5 * std::log(a / (2 * std::numbers::pi)) - log_gamma_star(a);
    return {scaled + a, scaled};
}

namespace detail {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

struct Window {
    double lo, hi;
    double peak_s, peak_log;
    double width;
};

// Largest d in (0, dmax] with f(d) above target, found by doubling then bisection.
template <class F>
double reach(F&& above, double d0, double dmax)
{
    double d = d0;
    double inside = 0;
    while (d < dmax && above(d)) {
        inside = d;
        d *= 2;
    }
    if (d >= dmax && above(dmax))
        return dmax;
    d = std::min(d, dmax);
    for (int it = 0; it < 60 && d - inside > 1e-12 * d; ++it) {
        double mid = 0.5 * (inside + d);
        if (above(mid))
            inside = mid;
        else
            d = mid;
    }
    return d;
}

template <class L>
std::pair<double, double> locate_peak(L& logf, double lo, double hi)
{
    constexpr int grid = 2000;
    for (int attempt = 0; attempt < 40; ++attempt) {
        double h = (hi - lo) / grid;
        int best = 0;
        double bestv = neg_inf;
        for (int i = 0; i <= grid; ++i) {
            double v = logf(lo + i * h);
            if (v > bestv) {
                bestv = v;
                best = i;
            }
        }
        if (bestv == neg_inf)
            throw reroute("quadrature: integrand vanishes on the search window");
        double w = hi - lo;
        if (best == 0) {
            hi = lo + 2 * h;
            lo -= w;
            continue;
        }
        if (best == grid) {
            lo = hi - 2 * h;
            hi += w;
            continue;
        }
        double a = lo + (best - 1) * h, b = lo + (best + 1) * h;
        const double g = 0.5 * (std::sqrt(5.0) - 1);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = logf(c), fd = logf(d);
        for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::fabs(a)); ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = logf(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = logf(d);
            }
        }
        double s = 0.5 * (a + b);
        double v = logf(s);
        if (bestv > v) {
            s = lo + best * h;
            v = bestv;
        }
        return {s, v};
    }
    throw reroute("quadrature: no interior peak found");
}

// Interval where logf exceeds peak + log_eps - 2.
template <class L>
Window find_window(L& logf, double scan_lo, double scan_hi, double log_eps,
                   std::optional<double> force = std::nullopt)
{
    auto [ps, pv] = locate_peak(logf, scan_lo, scan_hi);
    double half = pv - 0.5;
    double wl = reach([&](double d) { return logf(ps - d) > half; }, 1e-8, 1e3);
    double wr = reach([&](double d) { return logf(ps + d) > half; }, 1e-8, 1e3);
    double width = std::min(wl, wr);
    double cut = pv + log_eps - 2;
    double dl = reach([&](double d) { return logf(ps - d) > cut; }, width, 1e4);
    double dr = reach([&](double d) { return logf(ps + d) > cut; }, width, 1e4);
    // two widths of margin past the cut on each side
    Window w{ps - dl - 2 * width, ps + dr + 2 * width, ps, pv, width};
    if (force) {
        w.lo = std::min(w.lo, *force - width);
        w.hi = std::max(w.hi, *force + width);
    }
    return w;
}

template <class L>
double node_sum(L& logf, double s0, double h, std::size_t count, double shift)
{
    NeumaierSum acc;
    for (std::size_t i = 0; i < count; ++i) {
        double v = logf(s0 + i * h) - shift;
        if (v > -745)
            acc.add(std::exp(v));
    }
    return acc.value();
}

struct TrapOutcome {
    double log_scale = 0; // integral = exp(log_scale) * scaled
    double scaled = 0;
    double est_rel_err = 0;
    QuadratureSpec spec;
    std::size_t evaluations = 0;

    double value() const { return scaled > 0 ? std::exp(log_scale + std::log(scaled)) : 0; }
};

// node rounding (exp of logs in the hundreds) reaches ~40 eps
inline constexpr double trapezoid_floor = 128 * eps_d;

// Step-halving trapezoid on a window until successive sums agree to eps.
template <class L>
TrapOutcome trapezoid_auto(L& logf, const Window& w, double eps, std::size_t max_nodes = 1000000)
{
    double span = w.hi - w.lo;
    double h = std::min(0.5 * w.width, span / 16);
    std::size_t count = static_cast<std::size_t>(std::ceil(span / h)) + 1;
    double shift = w.peak_log;
    double t = h * node_sum(logf, w.lo, h, count, shift);
    std::size_t evals = count;
    double tol = std::max(eps, 4 * eps_d);
    double diff_rel = 1;
    for (int level = 0; level < 30; ++level) {
        std::size_t mids = count - 1;
        if (evals + mids > max_nodes)
            break;
        double m = node_sum(logf, w.lo + 0.5 * h, h, mids, shift);
        evals += mids;
        double t2 = 0.5 * t + 0.5 * h * m;
        diff_rel = t2 > 0 ? std::fabs(t2 - t) / t2 : 0;
        t = t2;
        h *= 0.5;
        count += mids;
        if (diff_rel <= tol && level >= 1)
            break;
    }
    TrapOutcome out;
    out.log_scale = shift;
    out.scaled = t;
    out.est_rel_err = std::max(diff_rel, trapezoid_floor);
    out.spec = QuadratureSpec{w.lo, w.lo + (count - 1) * h, h, count};
    out.evaluations = evals;
    return out;
}

// Trapezoid on a fixed grid; the error estimate compares against the halved step.
template <class L>
TrapOutcome trapezoid_fixed(L& logf, const QuadratureSpec& spec, double shift)
{
    double h = spec.step;
    double t = h * node_sum(logf, spec.s_min, h, spec.nodes, shift);
    double m = node_sum(logf, spec.s_min + 0.5 * h, h, spec.nodes - 1, shift);
    double t2 = 0.5 * t + 0.5 * h * m;
    TrapOutcome out;
    out.log_scale = shift;
    out.scaled = t;
    out.est_rel_err = t > 0 ? std::max(std::fabs(t2 - t) / t, trapezoid_floor) : 0;
    out.spec = spec;
    out.evaluations = 2 * spec.nodes - 1;
    return out;
}

// log of the erfc-integral integrand for F (upper = false) or G (upper = true).
struct ErfcIntegrand {
    double x, delta, a, log_c;
    bool upper;

    double operator()(double s) const
    {
        double xe = x * std::exp(s);
        double w = upper ? (xe - delta) : (delta - xe);
        double e = expm1mx(2 * s);
        if (std::isinf(e))
            return neg_inf;
        return log_c + log_erfc(w / std::sqrt(2.0)) - a * e;
    }
};

inline ErfcIntegrand erfc_integrand(const Params& prm, bool upper)
{
    return ErfcIntegrand{prm.x, prm.delta, 0.5 * prm.n, norm_const(prm.n).log_a_n_scaled, upper};
}

inline std::pair<double, double> erfc_scan_window(const Params& prm)
{
    double c = prm.delta > 0 ? std::log(prm.delta / prm.x) : 0.0;
    return {std::min(0.0, c) - 4, std::max(0.0, c) + 4};
}

inline std::optional<double> transition_point(const Params& prm)
{
    if (prm.delta > 0)
        return std::log(prm.delta / prm.x);
    return std::nullopt;
}

} // namespace detail

// QuadratureSpec that resolves the erfc integral of F to relative accuracy eps.
inline QuadratureSpec auto_range(const Params& prm, double eps)
{
    if (!(prm.x > 0))
        throw invalid_argument("auto_range: x must be positive");
    auto f = detail::erfc_integrand(prm, false);
    auto [lo, hi] = detail::erfc_scan_window(prm);
    auto w = detail::find_window(f, lo, hi, std::log(eps), detail::transition_point(prm));
    return detail::trapezoid_auto(f, w, eps).spec;
}

// F (upper = false) or G (upper = true) by the trapezoidal rule. With a spec
// the grid is used as given; otherwise the range and step are chosen here.
inline TailValue tail_trapezoid(const Params& prm, bool upper, std::optional<QuadratureSpec> spec = std::nullopt,
                                double eps = 1e-15)
{
    if (!(prm.x > 0))
        throw invalid_argument("trapezoid: x must be positive");
    auto f = detail::erfc_integrand(prm, upper);
    detail::TrapOutcome o;
    if (spec) {
        if (spec->nodes > 1000000)
            throw capacity_error("trapezoid: node count exceeds cap");
        auto [lo, hi] = detail::erfc_scan_window(prm);
        auto peak = detail::locate_peak(f, lo, hi);
        o = detail::trapezoid_fixed(f, *spec, peak.second);
    } else {
        auto [lo, hi] = detail::erfc_scan_window(prm);
        auto w = detail::find_window(f, lo, hi, std::log(eps), detail::transition_point(prm));
        // below the smallest subnormal even at the peak times the width
        if (w.peak_log + std::log(w.hi - w.lo) < -745.2) {
            TailValue t = from_primary(0, true, 0, Method::trapezoid, 0);
            t.underflow = true;
            return t;
        }
        o = detail::trapezoid_auto(f, w, eps);
    }
    double v = std::clamp(o.value(), 0.0, 1.0);
    TailValue t = from_primary(v, true, o.est_rel_err, Method::trapezoid, o.evaluations);
    if (v == 0 && o.scaled > 0)
        t.underflow = true;
    return t;
}

inline TailValue cdf_trapezoid(const Params& prm, std::optional<QuadratureSpec> spec = std::nullopt,
                               double eps = 1e-15)
{
    return tail_trapezoid(prm, false, spec, eps);
}

// R_n(x; delta), delta > 0, from its Laplace integral with t = e^u.
inline TailValue r_laplace(const Params& prm, double eps = 1e-15)
{
    if (!(prm.delta > 0) || !(prm.x > 0))
        throw invalid_argument("r_laplace: need x > 0 and delta > 0");
    double a = 0.5 * prm.n;
    double y = prm.y;
    double zeta = prm.zeta;
    double log_pre = -0.5 * prm.delta * prm.delta + 0.5 * std::log(y) + a * std::log(prm.one_minus_y)
                   - detail::ln_2pi;
    auto f = [=](double u) {
        double eu = std::exp(u);
        if (std::isinf(eu))
            return detail::neg_inf;
        return -zeta * eu + (a + 0.5) * u - a * detail::softplus(u) - std::log1p(y * eu);
    };
    double u1 = std::log((a + 0.5) / zeta);
    double u2 = std::log(0.5 / zeta);
    auto w = detail::find_window(f, std::min(u1, u2) - 6, std::max(u1, u2) + 6, std::log(eps));
    TailValue t;
    t.method = Method::trapezoid;
    double log_total_max = log_pre + w.peak_log + std::log(w.hi - w.lo);
    if (log_total_max < std::log(1e-300)) {
        t.value = 0;
        t.complement = 1;
        t.underflow = true;
        return t;
    }
    auto o = detail::trapezoid_auto(f, w, eps);
    double r = o.scaled > 0 ? std::exp(log_pre + o.log_scale + std::log(o.scaled)) : 0;
    t = from_primary(r, true, o.est_rel_err, Method::trapezoid, o.evaluations);
    t.underflow = r == 0;
    return t;
}

// Density dF/dx.
inline double pdf_quadrature(const Params& prm, double eps = 1e-15)
{
    if (prm.x < 0)
        return pdf_quadrature(make_params(-prm.x, -prm.delta, prm.n), eps);
    double n = prm.n, x = prm.x, d = prm.delta, a = 0.5 * n;
    double log_c = norm_const(n).log_a_n_scaled + 0.5 * std::log(2 / std::numbers::pi);
    auto f = [=](double s) {
        double e = detail::expm1mx(2 * s);
        if (std::isinf(e))
            return detail::neg_inf;
        double r = d - x * std::exp(s);
        return log_c + s - a * e - 0.5 * r * r;
    };
    double u = (x * d + std::sqrt(x * x * d * d + 4 * (n + x * x) * (n + 1))) / (2 * (n + x * x));
    double s0 = std::log(u);
    auto w = detail::find_window(f, s0 - 2, s0 + 2, std::log(eps));
    auto o = detail::trapezoid_auto(f, w, eps);
    return o.value();
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth)
{
    double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double both = left + right;
    if (depth <= 0 || std::fabs(both - whole) <= 15 * tol)
        return both + (both - whole) / 15;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol)
{
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    // coarse pass to set an absolute tolerance
    double coarse = 0;
    for (int i = 0; i < 64; ++i) {
        double s = a + (b - a) * (i + 0.5) / 64;
        coarse += std::fabs(f(s));
    }
    coarse *= (b - a) / 64;
    return simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * std::max(coarse, 1e-300), 48);
}

inline void check_kummer_range(const Params& prm)
{
    if (prm.delta * prm.delta * prm.y > 500 || prm.n > 500)
        throw unsupported_range("kummer check: parameters outside the supported range");
    if (prm.x < 0)
        throw invalid_argument("kummer check: x must be nonnegative");
}

} // namespace detail

// (P_n, Q_n) from the Kummer-function integrals over [0, y].
inline std::pair<double, double> pq_kummer_check(const Params& prm)
{
    detail::check_kummer_range(prm);
    double n = prm.n, a = 0.5 * n, z = 0.5 * prm.delta * prm.delta;
    if (prm.x == 0)
        return {0, 0};
    double lb = log_gamma(0.5) + log_gamma(a) - log_gamma(a + 0.5);
    auto fp = [&](double u) {
        double t = u * u;
        return 2 * std::exp(-z + (a - 1) * std::log1p(-t) - lb) * kummer_1f1(a + 0.5, 0.5, z * t);
    };
    double p = 0.5 * detail::adaptive_simpson(fp, 0, std::sqrt(prm.y), 1e-14);
    double q = 0;
    if (prm.delta != 0) {
        auto fq = [&](double t) {
            return std::exp(-z + (a - 1) * std::log1p(-t)) * kummer_1f1(a + 1, 1.5, z * t);
        };
        q = 0.5 * prm.delta * n / detail::sqrt_2pi * detail::adaptive_simpson(fq, 0, prm.y, 1e-14);
    }
    return {p, q};
}

// (P_n, Q_n) from the complementary integrals over [0, 1-y].
inline std::pair<double, double> pq_kummer_check_complement(const Params& prm)
{
    detail::check_kummer_range(prm);
    double n = prm.n, a = 0.5 * n, z = 0.5 * prm.delta * prm.delta;
    double lb = log_gamma(0.5) + log_gamma(a) - log_gamma(a + 0.5);
    double umax = std::pow(prm.one_minus_y, a);
    // t = u^{2/n} removes the t^{n/2-1} endpoint behavior
    auto tof = [&](double u) { return std::pow(u, 2 / n); };
    auto fp = [&](double u) {
        double t = tof(u);
        return (2 / n) * std::exp(-z - 0.5 * std::log1p(-t) - lb) * kummer_1f1(a + 0.5, 0.5, z * (1 - t));
    };
    double p = 0.5 - 0.5 * detail::adaptive_simpson(fp, 0, umax, 1e-14);
    double q = 0;
    if (prm.delta != 0) {
        auto fq = [&](double u) {
            double t = tof(u);
            return (2 / n) * std::exp(-z) * kummer_1f1(a + 1, 1.5, z * (1 - t));
        };
        q = 0.5 * erf(prm.delta / std::sqrt(2.0))
          - prm.delta * n / (2 * detail::sqrt_2pi) * detail::adaptive_simpson(fq, 0, umax, 1e-14);
    }
    return {p, q};
}

} // namespace nct

#endif
