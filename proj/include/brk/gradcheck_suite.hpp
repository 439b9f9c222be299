#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brk/grad_check.hpp"

namespace bnews {

struct NamedGradCheck {
    std::string name;
    GradCheckReport report;
};

/// Central-difference checks of every differentiable operation of the
/// denoising and encoder stages plus the composed model loss (all ablations,
/// with and without an image node), on a 3-node article at d = 8, h = 4.
std::vector<NamedGradCheck> run_gradcheck_suite(std::uint64_t seed = 2024,
                                                const GradCheckOptions& opts = {});

}  // namespace bnews
