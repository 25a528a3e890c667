#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

struct Common {
    double tol = 1e-13;
    std::optional<double> zeta_min;
    std::optional<double> n_min_uniform, n_min_bounded, x_cap_factor, eta_switch;
    std::optional<std::size_t> max_terms;
    std::string method;

    void add(CLI::App& app)
    {
        app.add_option("--tol", tol, "target relative error");
        app.add_option("--zeta-min", zeta_min, "large-delta threshold (default max(30, 2n))");
        app.add_option("--n-min-uniform", n_min_uniform);
        app.add_option("--n-min-bounded", n_min_bounded);
        app.add_option("--x-cap-factor", x_cap_factor);
        app.add_option("--eta-switch", eta_switch);
        app.add_option("--max-terms", max_terms);
        app.add_option("--method", method, "force one route");
    }

    nct::MethodConfig config() const
    {
        nct::MethodConfig c;
        c.tol = tol;
        c.zeta_min = zeta_min;
        if (n_min_uniform)
            c.n_min_uniform = *n_min_uniform;
        if (n_min_bounded)
            c.n_min_bounded = *n_min_bounded;
        if (x_cap_factor)
            c.x_cap_factor = *x_cap_factor;
        if (eta_switch)
            c.eta_switch = *eta_switch;
        if (max_terms)
            c.max_terms = *max_terms;
        if (!method.empty()) {
            nct::Method m;
            if (!nct::parse_method(method, m))
                throw nct::invalid_argument("unknown method: " + method);
            c.force_method = m;
        }
        c.validate();
        return c;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"noncentral t distribution: evaluation, reference tables, sweeps"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "nct.conf", "key=value file with defaults");
    Common common;
    common.add(app);

    auto* eval = app.add_subcommand("eval", "one value of F (or G, the density, a quantile)");
    nct::cli::EvalRequest er;
    eval->add_option("--x", er.x);
    eval->add_option("--delta", er.delta)->required();
    eval->add_option("--n", er.n)->required();
    eval->add_flag("--sf", er.sf, "print G = 1 - F as value");
    eval->add_flag("--pdf", er.pdf, "print the density");
    eval->add_option("--quantile", er.quantile, "solve F(x) = p for x");

    auto* table = app.add_subcommand("table", "recompute a reference table");
    std::string table_id;
    std::string format = "text";
    table->add_option("id", table_id)->required()->check(CLI::IsMember({"T1", "T2", "T3", "T4", "EX1", "TRAP"}));
    table->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));

    auto* sweep = app.add_subcommand("sweep", "CSV over one variable");
    nct::cli::SweepRequest sr;
    sweep->add_option("--var", sr.var)->required()->check(CLI::IsMember({"x", "delta", "n"}));
    sweep->add_option("--from", sr.from)->required();
    sweep->add_option("--to", sr.to)->required();
    sweep->add_option("--count", sr.count)->required();
    sweep->add_option("--x", sr.x);
    sweep->add_option("--delta", sr.delta);
    sweep->add_option("--n", sr.n);
    sweep->add_flag("--sf", sr.sf);

    auto* compare = app.add_subcommand("compare", "every applicable route against the reference");
    nct::cli::CompareRequest cr;
    compare->add_option("--x", cr.x)->required()->delimiter(',');
    compare->add_option("--delta", cr.delta)->required()->delimiter(',');
    compare->add_option("--n", cr.n)->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return nct::cli::bad_args;
    }

    nct::MethodConfig cfg;
    try {
        cfg = common.config();
    } catch (const nct::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nct::cli::bad_args;
    }

    if (*eval) {
        if (!er.quantile && eval->count("--x") == 0) {
            std::cerr << "error: --x is required\n";
            return nct::cli::bad_args;
        }
        er.cfg = cfg;
        return nct::cli::cmd_eval(er, std::cout, std::cerr);
    }
    if (*table)
        return nct::cli::cmd_table(table_id, format == "csv", std::cout, std::cerr);
    if (*sweep) {
        sr.cfg = cfg;
        return nct::cli::cmd_sweep(sr, std::cout, std::cerr);
    }
    cr.cfg = cfg;
    return nct::cli::cmd_compare(cr, std::cout, std::cerr);
}
