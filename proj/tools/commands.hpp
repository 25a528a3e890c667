// Command implementations behind nct_cli. Each returns the exit status and
// writes to the given stream, so tests can drive them without a process.
#ifndef NCT_TOOLS_COMMANDS_HPP
#define NCT_TOOLS_COMMANDS_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nct/nct.hpp"

namespace nct::cli {

enum Exit { ok = 0, gate_failed = 1, bad_args = 2, eval_failed = 3 };

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// F with its complement: series checked against the trapezoid, trapezoid alone
// where the series does not apply.
inline TailValue consensus(double x, double delta, double n)
{
    MethodConfig cfg;
    cfg.tol = 1e-15;
    if (x <= 0 || delta <= 0)
        return cdf(x, delta, n, cfg);
    auto prm = make_params(x, delta, n);
    auto trap = detail::run_route_raw(Method::trapezoid, prm, cfg);
    std::optional<TailValue> ser;
    try {
        ser = detail::run_route_raw(Method::series, prm, cfg);
    } catch (const reroute&) {
    } catch (const capacity_error&) {
    }
    if (!ser)
        return trap;
    double allowed = ser->est_rel_err * detail::primary_of(*ser) + trap.est_rel_err * detail::primary_of(trap)
                   + 4 * detail::eps_d * std::min(ser->value, ser->complement);
    if (std::fabs(ser->value - trap.value) > std::max(allowed, 1e-14 * std::min(ser->value, ser->complement)))
        throw evaluation_failure("series and trapezoid disagree at x=" + num(x) + " delta=" + num(delta)
                                 + " n=" + num(n));
    // the series is independent of every other route, so it is the reference
    return *ser;
}

// relative error of t against ref in the smaller tail of ref
inline double tail_rel_err(const TailValue& t, const TailValue& ref)
{
    bool lower = ref.value <= ref.complement;
    double got = lower ? t.value : t.complement, want = lower ? ref.value : ref.complement;
    return want != 0 ? std::fabs(got / want - 1) : std::fabs(got);
}

// ---- eval

struct EvalRequest {
    double x = 0, delta = 0, n = 0;
    bool sf = false, pdf = false;
    std::optional<double> quantile;
    MethodConfig cfg;
};

inline std::string eval_line(const TailValue& t)
{
    std::string s = "value=" + num(t.value) + " complement=" + num(t.complement) + " est_rel_err="
                  + num(t.est_rel_err) + " method=" + std::string(method_name(t.method))
                  + " terms_used=" + std::to_string(t.terms_used);
    s += std::string(" primary=") + (t.primary_is_value ? "value" : "complement");
    s += std::string(" r_term_included=") + (t.r_term_included ? "1" : "0");
    if (t.underflow)
        s += " underflow=1";
    return s;
}

inline int cmd_eval(const EvalRequest& r, std::ostream& out, std::ostream& err)
{
    try {
        if (r.quantile) {
            out << "x=" << num(quantile(*r.quantile, r.delta, r.n, r.cfg)) << "\n";
            return ok;
        }
        if (r.pdf) {
            out << "pdf=" << num(pdf(r.x, r.delta, r.n, r.cfg)) << "\n";
            return ok;
        }
        auto t = r.sf ? sf(r.x, r.delta, r.n, r.cfg) : cdf(r.x, r.delta, r.n, r.cfg);
        out << eval_line(t) << "\n";
        return ok;
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
    } catch (const evaluation_failure& e) {
        err << "evaluation failed: " << e.what() << "\n";
        return eval_failed;
    }
}

// ---- table

struct TableRow {
    std::string label;
    double computed = 0;
    double reference = 0;
    double achieved = 0;
    double reported = 0;                // published error
    std::optional<double> extra_report; // Table 4 six-term column, not gated
    double gate = 0;
    bool pass() const { return achieved <= gate; }
};

struct TableReport {
    std::string id;
    std::string method;
    std::vector<TableRow> rows;
    bool pass() const
    {
        for (const auto& r : rows)
            if (!r.pass())
                return false;
        return true;
    }
};

inline const std::vector<std::string_view>& table_ids()
{
    static const std::vector<std::string_view> ids{"T1", "T2", "T3", "T4", "EX1", "TRAP"};
    return ids;
}

inline TableRow row_against(std::string label, const TailValue& got, const TailValue& ref, double reported,
                            double gate)
{
    TableRow r;
    r.label = std::move(label);
    r.computed = got.value;
    r.reference = ref.value;
    r.achieved = tail_rel_err(got, ref);
    r.reported = reported;
    r.gate = gate;
    return r;
}

inline TableReport run_table(std::string_view id)
{
    TableReport rep;
    rep.id = std::string(id);
    if (id == "T1" || id == "T2") {
        const double xs[] = {5, 8, 11, 14, 17, 20};
        const double t1[] = {0.20e-13, 0.40e-12, 0.12e-9, 0.11e-7, 0.41e-6, 0.82e-5};
        const double t2[] = {0.10e-13, 0.32e-14, 0.97e-14, 0.69e-14, 0.70e-14, 0.50e-14};
        bool one = id == "T1";
        rep.method = one ? "large_delta_elem, 11 terms" : "large_delta_gamma Q form, 6 terms";
        for (int i = 0; i < 6; ++i) {
            auto prm = make_params(xs[i], 20, 10.3);
            auto got = one ? cdf_large_delta_elem(prm, 10) : cdf_large_delta_gamma(prm, 5, GammaForm::q_form);
            // sixteen-digit runs cannot show errors below ~1e-13 reliably
            double gate = one ? 10 * t1[i] : std::max(10 * t2[i], 1e-12);
            rep.rows.push_back(row_against("x=" + num(xs[i]), got, consensus(xs[i], 20, 10.3), one ? t1[i] : t2[i],
                                           gate));
        }
    } else if (id == "T3") {
        const double xs[] = {1, 2.5, 5, 7.5, 10, 12.5};
        const double rp[] = {0.78e-14, 0.31e-11, 0.15e-10, 0.17e-11, 0.21e-10, 0.63e-10};
        rep.method = "large_n_bounded, c1 and c2";
        for (int i = 0; i < 6; ++i) {
            auto got = cdf_large_n_bounded(make_params(xs[i], 10, 1000), 2, 1.0);
            rep.rows.push_back(row_against("x=" + num(xs[i]), got, consensus(xs[i], 10, 1000), rp[i], 10 * rp[i]));
        }
    } else if (id == "T4") {
        struct P { double x, n, d, three, six; };
        const P ps[] = {{50, 100, 75, 1.26e-8, 6.38e-9},
                        {500, 100, 510, 7.45e-10, 4.54e-12},
                        {100, 1000, 105, 6.94e-13, 3.00e-15},
                        {1000, 1000, 1010, 2.65e-13, 3.00e-15}};
        rep.method = "large_n_uniform, c0 and c1";
        for (const auto& p : ps) {
            auto got = cdf_large_n_uniform(make_params(p.x, p.d, p.n), 1);
            auto r = row_against("x=" + num(p.x) + " n=" + num(p.n) + " delta=" + num(p.d), got,
                                 consensus(p.x, p.d, p.n), p.three, 10 * p.three);
            r.extra_report = p.six;
            rep.rows.push_back(r);
        }
    } else if (id == "EX1") {
        rep.method = "large_n_uniform, c0 only";
        auto a = cdf_large_n_uniform(make_params(1000, 1010, 1000), 0);
        rep.rows.push_back(row_against("x=1000 n=1000 delta=1010", a, consensus(1000, 1010, 1000), 1.96e-7, 5e-7));
        auto b = cdf_large_n_uniform(make_params(500, 510, 100), 0);
        rep.rows.push_back(row_against("x=500 n=100 delta=510", b, consensus(500, 510, 100), 5.51e-6, 2e-5));
    } else if (id == "TRAP") {
        rep.method = "trapezoid, h=0.075 on [-3.975, 1.35]";
        auto prm = make_params(1, 5, 10);
        // the printed 16 digits are sharper than the series reference here
        auto ref = from_primary(0.00004347252856505909, true, 0, Method::series, 0);
        consensus(1, 5, 10);
        auto fixed = cdf_trapezoid(prm, make_spec(-3.975, 1.35, 0.075));
        rep.rows.push_back(row_against("fixed grid", fixed, ref, 2.0e-15, 2.0e-14));
        auto aut = cdf_trapezoid(prm);
        rep.rows.push_back(row_against("automatic grid", aut, ref, 2.0e-15, 2.0e-14));
    } else {
        throw invalid_argument("unknown table id: " + std::string(id));
    }
    return rep;
}

inline void print_table(const TableReport& rep, std::ostream& out, bool csv)
{
    if (csv) {
        out << "table,row,computed,reference,achieved_rel_err,reported_rel_err,gate,status\n";
        for (const auto& r : rep.rows)
            out << rep.id << ",\"" << r.label << "\"," << num(r.computed) << "," << num(r.reference) << ","
                << num(r.achieved) << "," << num(r.reported) << "," << num(r.gate) << ","
                << (r.pass() ? "PASS" : "FAIL") << "\n";
        return;
    }
    out << rep.id << ": " << rep.method << "\n";
    for (const auto& r : rep.rows) {
        out << "  " << r.label << " computed=" << num(r.computed) << " reference=" << num(r.reference)
            << " achieved=" << num(r.achieved) << " reported=" << num(r.reported);
        if (r.extra_report)
            out << " reported_6_terms=" << num(*r.extra_report);
        out << " " << (r.pass() ? "PASS" : "FAIL") << "\n";
    }
    out << rep.id << " " << (rep.pass() ? "PASS" : "FAIL") << "\n";
}

inline int cmd_table(std::string_view id, bool csv, std::ostream& out, std::ostream& err)
{
    try {
        auto rep = run_table(id);
        print_table(rep, out, csv);
        return rep.pass() ? ok : gate_failed;
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
    } catch (const std::exception& e) {
        err << "evaluation failed: " << e.what() << "\n";
        return eval_failed;
    }
}

// ---- sweep

struct SweepRequest {
    std::string var; // x, delta or n
    double from = 0, to = 0;
    int count = 0;
    double x = 0, delta = 0, n = 0;
    bool sf = false;
    MethodConfig cfg;
};

inline int cmd_sweep(const SweepRequest& r, std::ostream& out, std::ostream& err)
{
    if ((r.var != "x" && r.var != "delta" && r.var != "n") || r.count < 1 || !(r.from <= r.to)
        || (r.count == 1 && r.from != r.to) || !std::isfinite(r.from) || !std::isfinite(r.to)) {
        err << "error: sweep needs --var x|delta|n, --from <= --to, --count >= 1 (count 1 needs from == to)\n";
        return bad_args;
    }
    if (r.var == "n" && !(r.from > 0)) {
        err << "error: n must stay positive\n";
        return bad_args;
    }
    std::string body;
    try {
        for (int i = 0; i < r.count; ++i) {
            double v = r.count == 1 ? r.from : r.from + (r.to - r.from) * i / (r.count - 1);
            double x = r.var == "x" ? v : r.x, d = r.var == "delta" ? v : r.delta, n = r.var == "n" ? v : r.n;
            auto t = r.sf ? sf(x, d, n, r.cfg) : cdf(x, d, n, r.cfg);
            body += num(v) + "," + num(t.value) + "," + num(t.complement) + "," + num(t.est_rel_err) + ","
                  + std::string(method_name(t.method)) + "\n";
        }
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
    } catch (const evaluation_failure& e) {
        err << "evaluation failed: " << e.what() << "\n";
        return eval_failed;
    }
    out << "var,value,complement,est_rel_err,method\n" << body;
    return ok;
}

// ---- compare

struct RouteReport {
    Method method;
    bool ran = false;
    std::string note; // reason when skipped
    TailValue t;
    double deviation = 0;
    bool exceeds = false;
};

struct PointReport {
    double x, delta, n;
    TailValue reference;
    TailValue chosen;
    std::vector<RouteReport> routes;
};

inline PointReport compare_point(double x, double delta, double n, const MethodConfig& cfg)
{
    PointReport p{x, delta, n, consensus(x, delta, n), cdf(x, delta, n, cfg), {}};
    if (!(x > 0 && delta > 0))
        return p;
    auto prm = make_params(x, delta, n);
    const Method all[] = {Method::series,          Method::trapezoid,       Method::large_delta_elem,
                          Method::large_delta_gamma, Method::large_n_bounded, Method::large_n_uniform};
    for (Method m : all) {
        RouteReport rr{m};
        try {
            rr.t = detail::run_route_raw(m, prm, cfg);
            rr.ran = true;
        } catch (const std::exception& e) {
            rr.note = e.what();
        }
        if (rr.ran) {
            rr.deviation = tail_rel_err(rr.t, p.reference);
            double allowed = rr.t.est_rel_err * detail::primary_of(rr.t)
                           + p.reference.est_rel_err * detail::primary_of(p.reference)
                           + 4 * detail::eps_d * std::min(p.reference.value, p.reference.complement);
            rr.exceeds = std::fabs(rr.t.value - p.reference.value) > allowed;
        }
        p.routes.push_back(rr);
    }
    return p;
}

inline void print_point(const PointReport& p, std::ostream& out)
{
    out << "point x=" << num(p.x) << " delta=" << num(p.delta) << " n=" << num(p.n)
        << " reference=" << num(p.reference.value) << " reference_complement=" << num(p.reference.complement)
        << " chosen=" << method_name(p.chosen.method) << "\n";
    for (const auto& r : p.routes) {
        out << "  route=" << method_name(r.method);
        if (!r.ran) {
            out << " status=skipped reason=\"" << r.note << "\"\n";
            continue;
        }
        out << " value=" << num(r.t.value) << " complement=" << num(r.t.complement)
            << " deviation=" << num(r.deviation) << " est_rel_err=" << num(r.t.est_rel_err)
            << " status=" << (r.exceeds ? "EXCEEDS" : "ok") << "\n";
    }
}

struct CompareRequest {
    std::vector<double> x, delta, n;
    MethodConfig cfg;
};

inline int cmd_compare(const CompareRequest& r, std::ostream& out, std::ostream& err)
{
    try {
        for (double n : r.n)
            for (double d : r.delta)
                for (double x : r.x)
                    print_point(compare_point(x, d, n, r.cfg), out);
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return bad_args;
    } catch (const std::exception& e) {
        err << "evaluation failed: " << e.what() << "\n";
        return eval_failed;
    }
    return ok;
}

} // namespace nct::cli

#endif
