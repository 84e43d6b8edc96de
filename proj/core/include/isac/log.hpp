// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_LOG_HPP
#define ISAC_LOG_HPP

#include <string>

namespace isac {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Active level, parsed once from the ISAC_LOG environment variable
/// (error|warn|info|debug, default warn).
LogLevel log_level();

void log_message(LogLevel level, const std::string& msg);

inline void log_error(const std::string& m) { log_message(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_message(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_message(LogLevel::Debug, m); }

}  // namespace isac

#endif
