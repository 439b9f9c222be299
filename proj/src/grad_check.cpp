#include "brk/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bnews {

GradCheckReport grad_check(const ScalarFn& fn, const ParamStore& params,
                           const GradCheckOptions& opts) {
    if (!(opts.eps > 0.0)) throw std::invalid_argument("grad_check: eps must be > 0");
    GradCheckReport report;
    ParamStore probe = params;

    if (!std::isfinite(fn(probe))) {
        report.failure = "non-finite value at the unperturbed point";
        return report;
    }

    for (const auto& name : params.names()) {
        const Matrix& analytic = params.grad(name);
        double worst = 0.0;
        auto values = probe.value(name).data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double orig = values[i];
            values[i] = orig + opts.eps;
            const double up = fn(probe);
            values[i] = orig - opts.eps;
            const double down = fn(probe);
            values[i] = orig;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                report.failure = "non-finite value probing '" + name + "'";
                report.per_param[name] = INFINITY;
                report.max_rel_error = INFINITY;
                return report;
            }
            const double numeric = (up - down) / (2.0 * opts.eps);
            const double a = analytic.data()[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
        report.per_param[name] = worst;
        report.max_rel_error = std::max(report.max_rel_error, worst);
    }
    report.passed = report.max_rel_error <= opts.tol;
    return report;
}

}  // namespace bnews
