#ifndef NCT_NCT_HPP
#define NCT_NCT_HPP

#include "nct/asymp_delta.hpp"
#include "nct/asymp_n.hpp"
#include "nct/engine.hpp"
#include "nct/error.hpp"
#include "nct/kernels.hpp"
#include "nct/params.hpp"
#include "nct/quadrature.hpp"
#include "nct/result.hpp"
#include "nct/series.hpp"

#endif
