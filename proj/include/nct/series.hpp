// Defining series of F, G, P, Q and R.
#ifndef NCT_SERIES_HPP
#define NCT_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nct/detail/math.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"

namespace nct {

struct SeriesResult {
    double value = 0;
    std::size_t terms_used = 1;
    double truncation_bound = 0; // neglected tail relative to the partial sum
    double rounding_bound = 0;   // relative, from cancellation in alternating sums
    bool cap_reached = false;    // summation ran past start_index
};

struct PQResult {
    SeriesResult p;
    SeriesResult q;
};

inline constexpr std::size_t backward_recurrence_cap = 1000000;
inline constexpr double series_delta_limit = 60;

// f_j = I_y(p+j, q), j = 0..jmax, downward from an exact f_jmax using
// f_j = f_{j+1} + y^{p+j} (1-y)^q / ((p+j) B(p+j, q)). Every added term is
// positive. The increments follow their own two-term recurrence and are
// recomputed exactly every 64 steps.
inline std::vector<double> inc_beta_backward(double y, double one_minus_y, double p, double q,
                                             std::size_t jmax)
{
    if (!(y > 0 && y < 1) || !(p > 0) || !(q > 0))
        throw invalid_argument("inc_beta_backward: need 0 < y < 1, p > 0, q > 0");
    if (jmax < 1)
        throw invalid_argument("inc_beta_backward: jmax must be at least 1");
    if (jmax > backward_recurrence_cap)
        throw capacity_error("inc_beta_backward: jmax exceeds cap");

    std::vector<double> f(jmax + 1);
    detail::NeumaierSum acc;
    acc.add(inc_beta_pair(y, one_minus_y, p + jmax, q).i);
    f[jmax] = acc.value();
    double d = 0;
    for (std::size_t j = jmax; j-- > 0;) {
        double a = p + j;
        if ((jmax - 1 - j) % 64 == 0)
            d = detail::beta_prefix(y, one_minus_y, a, q) / a;
        else
            d *= (a + 1) / (y * (a + q));
        acc.add(d);
        f[j] = std::min(acc.value(), 1.0);
    }
    return f;
}

inline std::vector<double> inc_beta_backward(double y, double p, double q, std::size_t jmax)
{
    return inc_beta_backward(y, 1 - y, p, q, jmax);
}

// Smallest integer j > z with e^{-z} z^j / (e^{-j} j^j) <= eps.
inline std::size_t start_index(double z, double eps)
{
    if (!(z > 0) || !std::isfinite(z))
        throw invalid_argument("start_index: z must be positive");
    if (!(eps > 0 && eps < 1))
        throw invalid_argument("start_index: eps must lie in (0,1)");
    double target = -std::log(eps);
    auto ok = [&](double j) { return detail::bd0(j, z) >= target; };
    double j0 = std::floor(z) + 1;
    if (ok(j0))
        return static_cast<std::size_t>(j0);
    double lo = j0, step = 1, hi = j0 + step;
    while (!ok(hi)) {
        lo = hi;
        step *= 2;
        hi = j0 + step;
    }
    while (hi - lo > 1) {
        double mid = std::floor(0.5 * (lo + hi));
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return static_cast<std::size_t>(hi);
}

namespace detail {

// log(e^{-z} z^a / Gamma(a+1)), a >= 0, z > 0.
inline double log_poisson_weight(double a, double z)
{
    if (a == 0)
        return -z;
    return log_gamma_prefix(a, z);
}

// Tracks the two-consecutive small-term stopping rule.
struct StopRule {
    double eps;
    int hits = 0;
    bool done = false;
    double last = 0, prev = 0;

    void feed(double term, double partial, bool eligible)
    {
        prev = last;
        last = std::fabs(term);
        if (eligible && last <= eps * std::fabs(partial))
            ++hits;
        else
            hits = 0;
        if (hits >= 2)
            done = true;
    }
    double tail_bound(double partial) const
    {
        if (partial == 0)
            return 0;
        double r = prev > 0 ? last / prev : 0;
        double rel = last / std::fabs(partial);
        return r < 1 ? rel * r / (1 - r) : rel;
    }
};

inline void check_series_domain(const Params& prm)
{
    if (prm.x < 0)
        throw invalid_argument("series: x must be nonnegative");
    if (std::fabs(prm.delta) >= series_delta_limit)
        throw reroute("series: |delta| too large, e^{-delta^2/2} underflows");
}

// 1/2 e^{-z} sum_j s^j (|delta|/sqrt2)^j / Gamma(j/2+1) I_{1-y}(n/2, 1/2 + j/2), s = +-1.
inline SeriesResult half_step_series(const Params& prm, double s, double eps, std::size_t max_terms)
{
    double z = 0.5 * prm.delta * prm.delta;
    double a = 0.5 * prm.n;
    SeriesResult out;
    if (z == 0) {
        out.value = 0.5 * inc_beta_pair(prm.one_minus_y, prm.y, a, 0.5).i;
        return out;
    }
    std::size_t cap = start_index(z, eps) * 2;
    NeumaierSum sum;
    double abs_sum = 0;
    StopRule stop{eps};
    std::size_t j = 0;
    for (;; ++j) {
        if (j >= max_terms)
            throw capacity_error("series: term cap reached");
        double h = 0.5 * j;
        double w = std::exp(log_poisson_weight(h, z));
        double ib = inc_beta_pair(prm.one_minus_y, prm.y, a, 0.5 + h).i;
        double t = 0.5 * w * ib;
        if (s < 0 && (j % 2) == 1)
            t = -t;
        sum.add(t);
        abs_sum += std::fabs(t);
        stop.feed(t, sum.value(), h > z);
        if (stop.done)
            break;
    }
    out.value = sum.value();
    out.terms_used = j + 1;
    out.cap_reached = j > cap;
    out.truncation_bound = stop.tail_bound(out.value);
    double v = std::fabs(out.value);
    out.rounding_bound = v > 0 ? 4 * eps_d * abs_sum / v : (abs_sum > 0 ? 1.0 : 0.0);
    return out;
}

} // namespace detail

// P_n and Q_n by their defining series; Q carries the sign of delta.
inline PQResult pq_series(const Params& prm, double eps, std::size_t max_terms = 1000000)
{
    detail::check_series_domain(prm);
    PQResult out;
    if (prm.x == 0)
        return out;
    double z = 0.5 * prm.delta * prm.delta;
    double b = 0.5 * prm.n;
    if (z == 0) {
        out.p.value = 0.5 * inc_beta_pair(prm.y, prm.one_minus_y, 0.5, b).i;
        return out;
    }
    std::size_t j0 = start_index(z, eps);
    if (j0 > max_terms)
        throw capacity_error("pq_series: start index exceeds term cap");
    auto fp = inc_beta_backward(prm.y, prm.one_minus_y, 0.5, b, j0);
    auto fq = inc_beta_backward(prm.y, prm.one_minus_y, 1.0, b, j0);

    detail::NeumaierSum sp, sq;
    detail::StopRule stp{eps}, stq{eps};
    std::size_t np = 0, nq = 0;
    bool cap = false;
    for (std::size_t j = 0; !(stp.done && stq.done); ++j) {
        if (j >= max_terms)
            throw capacity_error("pq_series: term cap reached");
        double ip, iq;
        if (j <= j0) {
            ip = fp[j];
            iq = fq[j];
        } else {
            cap = true;
            ip = inc_beta_pair(prm.y, prm.one_minus_y, 0.5 + j, b).i;
            iq = inc_beta_pair(prm.y, prm.one_minus_y, 1.0 + j, b).i;
        }
        bool eligible = j > z;
        if (!stp.done) {
            double t = 0.5 * std::exp(detail::log_poisson_weight(double(j), z)) * ip;
            sp.add(t);
            stp.feed(t, sp.value(), eligible);
            np = j + 1;
        }
        if (!stq.done) {
            double t = 0.5 * std::exp(detail::log_poisson_weight(j + 0.5, z)) * iq;
            sq.add(t);
            stq.feed(t, sq.value(), eligible);
            nq = j + 1;
        }
    }
    out.p.value = sp.value();
    out.p.terms_used = np;
    out.p.truncation_bound = stp.tail_bound(out.p.value);
    out.p.cap_reached = cap && np > j0 + 1;
    out.q.value = std::copysign(sq.value(), prm.delta);
    out.q.terms_used = nq;
    out.q.truncation_bound = stq.tail_bound(sq.value());
    out.q.cap_reached = cap && nq > j0 + 1;
    return out;
}

// G_n = 1 - F_n by its own series. For delta < 0 the series alternates.
inline SeriesResult g_series(const Params& prm, double eps, std::size_t max_terms = 1000000,
                             double cancel_tol = 1e-6)
{
    detail::check_series_domain(prm);
    if (prm.x == 0) {
        SeriesResult r;
        r.value = 0.5 * erfc(-prm.delta / std::sqrt(2.0));
        return r;
    }
    auto r = detail::half_step_series(prm, prm.delta < 0 ? -1.0 : 1.0, eps, max_terms);
    if (r.rounding_bound > cancel_tol)
        throw reroute("g_series: cancellation in alternating sum");
    return r;
}

// R_n(x; delta), delta >= 0, by the alternating series.
inline SeriesResult r_series(const Params& prm, double eps, std::size_t max_terms = 1000000,
                             double cancel_tol = 1e-6)
{
    detail::check_series_domain(prm);
    if (prm.delta < 0)
        throw invalid_argument("r_series: delta must be nonnegative");
    if (prm.x == 0) {
        SeriesResult r;
        r.value = 0.5 * erfc(prm.delta / std::sqrt(2.0));
        return r;
    }
    auto r = detail::half_step_series(prm, -1.0, eps, max_terms);
    if (r.rounding_bound > cancel_tol)
        throw reroute("r_series: cancellation in alternating sum");
    r.value = std::max(r.value, 0.0);
    return r;
}

// F = erfc(delta/sqrt2)/2 + P + Q for delta >= 0 (all terms nonnegative).
inline SeriesResult f_series(const Params& prm, double eps, std::size_t max_terms = 1000000)
{
    auto pq = pq_series(prm, eps, max_terms);
    SeriesResult r;
    detail::NeumaierSum s;
    s.add(0.5 * erfc(prm.delta / std::sqrt(2.0)));
    s.add(pq.p.value);
    s.add(pq.q.value);
    r.value = std::clamp(s.value(), 0.0, 1.0);
    r.terms_used = std::max(pq.p.terms_used, pq.q.terms_used);
    r.truncation_bound = std::max(pq.p.truncation_bound, pq.q.truncation_bound);
    r.cap_reached = pq.p.cap_reached || pq.q.cap_reached;
    double mag = 0.5 * erfc(prm.delta / std::sqrt(2.0)) + pq.p.value + std::fabs(pq.q.value);
    r.rounding_bound = r.value > 0 ? 4 * detail::eps_d * mag / r.value : 0;
    return r;
}

} // namespace nct

#endif
