// Copyright 2026 The WFA Hedge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wfa_hedge/logging.h"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include "absl/strings/ascii.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace wfa_hedge {
namespace {

constexpr char kLoggerName[] = "wfa_hedge";

spdlog::level::level_enum ToSpd(LogLevel level) {
  switch (level) {
    case LogLevel::kTrace:
      return spdlog::level::trace;
    case LogLevel::kDebug:
      return spdlog::level::debug;
    case LogLevel::kInfo:
      return spdlog::level::info;
    case LogLevel::kWarn:
      return spdlog::level::warn;
    case LogLevel::kError:
      return spdlog::level::err;
    case LogLevel::kOff:
      return spdlog::level::off;
  }
  return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> Logger() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt(kLoggerName);
    logger->set_pattern("[%l] %v");
    const char* env = std::getenv("WFA_HEDGE_LOG");
    logger->set_level(ToSpd(env ? ParseLogLevel(env) : LogLevel::kWarn));
  });
  return spdlog::get(kLoggerName);
}

}  // namespace

LogLevel ParseLogLevel(std::string_view name) {
  std::string lower(name);
  absl::AsciiStrToLower(&lower);
  if (lower == "trace") return LogLevel::kTrace;
  if (lower == "debug") return LogLevel::kDebug;
  if (lower == "info") return LogLevel::kInfo;
  if (lower == "error") return LogLevel::kError;
  if (lower == "off") return LogLevel::kOff;
  return LogLevel::kWarn;
}

void InitLogging() { Logger(); }

void SetLogLevel(LogLevel level) { Logger()->set_level(ToSpd(level)); }

void LogInfo(std::string_view message) { Logger()->info(message); }
void LogDebug(std::string_view message) { Logger()->debug(message); }
void LogWarning(std::string_view message) { Logger()->warn(message); }

}  // namespace wfa_hedge
