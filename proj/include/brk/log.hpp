#pragma once

#include <spdlog/spdlog.h>

namespace bnews {

// Applies BREAK_LOG (quiet | info | debug; default info) to the default
// spdlog logger. Safe to call repeatedly; only the first call reads the env.
void init_logging();

}  // namespace bnews
