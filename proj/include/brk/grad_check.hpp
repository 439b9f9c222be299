#pragma once

#include <functional>
#include <map>
#include <string>

#include "brk/param_store.hpp"

namespace bnews {

struct GradCheckOptions {
    double eps = 1e-5;
    double tol = 1e-4;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::map<std::string, double> per_param;  // max relative error per parameter
    bool passed = false;
    std::string failure;  // set when a probe produced a non-finite value
};

using ScalarFn = std::function<double(const ParamStore&)>;

/// Compares the gradients stored in `params` (the analytic side) against
/// central differences of `fn`. Relative error per entry is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-12).
GradCheckReport grad_check(const ScalarFn& fn, const ParamStore& params,
                           const GradCheckOptions& opts = {});

}  // namespace bnews
