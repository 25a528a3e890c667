#ifndef NCT_RESULT_HPP
#define NCT_RESULT_HPP

#include <cstddef>
#include <string_view>

namespace nct {

enum class Method {
    series,
    trapezoid,
    large_delta_elem,
    large_delta_gamma,
    large_n_bounded,
    large_n_uniform,
};

inline std::string_view method_name(Method m)
{
    switch (m) {
    case Method::series: return "series";
    case Method::trapezoid: return "trapezoid";
    case Method::large_delta_elem: return "large_delta_elem";
    case Method::large_delta_gamma: return "large_delta_gamma";
    case Method::large_n_bounded: return "large_n_bounded";
    case Method::large_n_uniform: return "large_n_uniform";
    }
    return "unknown";
}

inline bool parse_method(std::string_view s, Method& out)
{
    for (Method m : {Method::series, Method::trapezoid, Method::large_delta_elem, Method::large_delta_gamma,
                     Method::large_n_bounded, Method::large_n_uniform})
        if (method_name(m) == s) {
            out = m;
            return true;
        }
    return false;
}

// value is the requested tail, complement = 1 - value. Whichever is smaller
// was computed directly.
struct TailValue {
    double value = 0;
    double complement = 1;
    double est_rel_err = 0;
    Method method = Method::series;
    std::size_t terms_used = 0;
    bool r_term_included = false;
    bool underflow = false;
    bool primary_is_value = true; // value (not complement) was computed directly
};

inline TailValue swapped(TailValue t)
{
    std::swap(t.value, t.complement);
    t.primary_is_value = !t.primary_is_value;
    return t;
}

// Builds a TailValue from a directly computed primary quantity.
inline TailValue from_primary(double primary, bool primary_is_value, double est, Method m,
                              std::size_t terms)
{
    TailValue t;
    if (primary_is_value) {
        t.value = primary;
        t.complement = 1 - primary;
    } else {
        t.complement = primary;
        t.value = 1 - primary;
    }
    t.est_rel_err = est;
    t.method = m;
    t.terms_used = terms;
    t.primary_is_value = primary_is_value;
    return t;
}

} // namespace nct

#endif
