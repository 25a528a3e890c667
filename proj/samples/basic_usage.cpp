#include <cstdio>

#include "nct/nct.hpp"

int main()
{
    // lower tail, complement kept separately
    auto t = nct::cdf(1.0, 5.0, 10.0);
    std::printf("F(1; 5, 10)   = %.16g  (G = %.16g, %s, est %.1e)\n", t.value, t.complement,
                std::string(nct::method_name(t.method)).c_str(), t.est_rel_err);

    // far upper tail: ask for G directly, tiny F survives in complement
    auto g = nct::sf(5.0, 20.0, 10.3);
    std::printf("F(5; 20, 10.3) = %.16g via %s\n", g.complement, std::string(nct::method_name(g.method)).c_str());

    // large n and delta
    auto big = nct::cdf(1000.0, 1010.0, 1000.0);
    std::printf("F(1000; 1010, 1000) = %.16g via %s\n", big.value, std::string(nct::method_name(big.method)).c_str());

    // density and quantile
    std::printf("pdf(1; 5, 10) = %.16g\n", nct::pdf(1.0, 5.0, 10.0));
    std::printf("median(5, 10) = %.16g\n", nct::quantile(0.5, 5.0, 10.0));

    // pin one route
    nct::MethodConfig cfg;
    cfg.force_method = nct::Method::trapezoid;
    std::printf("trapezoid only: %.16g\n", nct::cdf(1.0, 5.0, 10.0, cfg).value);

    try {
        nct::cdf(1.0, 5.0, -2.0);
    } catch (const nct::invalid_argument& e) {
        std::printf("rejected: %s\n", e.what());
    }
}
