#include "brk/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace bnews {

void init_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("brk");
        logger->set_pattern("[%l] %v");
        const char* env = std::getenv("BREAK_LOG");
        const std::string_view level = env ? env : "info";
        if (level == "quiet") logger->set_level(spdlog::level::warn);
        else if (level == "debug") logger->set_level(spdlog::level::debug);
        else logger->set_level(spdlog::level::info);
        spdlog::set_default_logger(logger);
    });
}

}  // namespace bnews
