#pragma once

#include <span>

namespace bnews {

/// Support-weighted two-class scores. Accuracy is the plain fraction correct.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Predicts class 1 when prob >= threshold. Ratios with a zero denominator are 0.
MetricsReport evaluate_metrics(std::span<const double> probs, std::span<const int> labels,
                               double threshold = 0.5);

}  // namespace bnews
