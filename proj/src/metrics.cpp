#include "brk/metrics.hpp"

#include <array>
#include <stdexcept>

namespace bnews {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

MetricsReport evaluate_metrics(std::span<const double> probs, std::span<const int> labels,
                               double threshold) {
    if (probs.empty() || probs.size() != labels.size())
        throw std::invalid_argument("evaluate_metrics: need equal, non-empty inputs");

    // confusion[truth][predicted]
    std::array<std::array<double, 2>, 2> confusion{};
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw std::invalid_argument("evaluate_metrics: label not 0/1");
        const int pred = probs[i] >= threshold ? 1 : 0;
        confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(pred)] += 1.0;
    }
    const double total = static_cast<double>(probs.size());

    MetricsReport r;
    r.accuracy = (confusion[0][0] + confusion[1][1]) / total;
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t o = 1 - c;
        const double tp = confusion[c][c];
        const double fp = confusion[o][c];
        const double fn = confusion[c][o];
        const double support = tp + fn;
        const double p = ratio(tp, tp + fp);
        const double rc = ratio(tp, tp + fn);
        const double f = ratio(2.0 * p * rc, p + rc);
        const double w = support / total;
        r.precision += w * p;
        r.recall += w * rc;
        r.f1 += w * f;
    }
    return r;
}

}  // namespace bnews
