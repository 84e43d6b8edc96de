// SPDX-License-Identifier: Apache-2.0

#include "isac/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace isac {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ISAC_LOG");
        if (env == nullptr) return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::Error;
        if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log_message(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static std::mutex mtx;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mtx);
    std::fprintf(stderr, "[isac %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace isac
