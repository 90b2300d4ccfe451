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

// Diagnostics go to stderr so that reports on stdout stay clean. The level is
// read from the WFA_HEDGE_LOG environment variable: off, error, warn
// (default), info, debug or trace.

#ifndef WFA_HEDGE_LOGGING_H_
#define WFA_HEDGE_LOGGING_H_

#include <string_view>

namespace wfa_hedge {

enum class LogLevel { kTrace, kDebug, kInfo, kWarn, kError, kOff };

// Parses a level name; unknown names map to kWarn.
LogLevel ParseLogLevel(std::string_view name);

// Installs the stderr logger with the level from WFA_HEDGE_LOG. Idempotent.
void InitLogging();

void SetLogLevel(LogLevel level);

void LogInfo(std::string_view message);
void LogDebug(std::string_view message);
void LogWarning(std::string_view message);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_LOGGING_H_
