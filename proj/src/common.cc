// src/common.cc

// Copyright 2026  splda-vb authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "splda/common.h"

#include <atomic>
#include <iostream>

namespace splda {

namespace {
std::atomic<int> g_log_level{static_cast<int>(LogLevel::kWarning)};
}

void SetLogLevel(LogLevel level) { g_log_level = static_cast<int>(level); }

LogLevel GetLogLevel() { return static_cast<LogLevel>(g_log_level.load()); }

void LogMessage(LogLevel level, const std::string &msg) {
  if (static_cast<int>(level) > g_log_level.load()) return;
  std::cerr << (level == LogLevel::kWarning ? "WARNING: " : "LOG: ") << msg
            << '\n';
}

}  // namespace splda
