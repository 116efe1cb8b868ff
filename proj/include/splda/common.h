// include/splda/common.h

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

#ifndef SPLDA_COMMON_H_
#define SPLDA_COMMON_H_

#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace splda {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Every precondition or numerical failure in the library surfaces as this
/// exception; the message names the operation and the offending quantity.
class SpldaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {
class MessageBuilder {
 public:
  template <typename T>
  MessageBuilder &operator<<(const T &value) {
    os_ << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};
}  // namespace internal

enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };

/// Global verbosity for messages printed to stderr.  Warnings that matter to
/// a caller are also returned in result structs; this is only for humans.
void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();
void LogMessage(LogLevel level, const std::string &msg);

}  // namespace splda

#define SPLDA_ERR(msg) \
  throw ::splda::SpldaError((::splda::internal::MessageBuilder() << msg).str())

#define SPLDA_CHECK(cond, msg) \
  do {                         \
    if (!(cond)) SPLDA_ERR(msg); \
  } while (0)

#define SPLDA_WARN(msg)                                 \
  ::splda::LogMessage(::splda::LogLevel::kWarning,      \
                      (::splda::internal::MessageBuilder() << msg).str())

#define SPLDA_LOG(msg)                               \
  ::splda::LogMessage(::splda::LogLevel::kInfo,      \
                      (::splda::internal::MessageBuilder() << msg).str())

#endif  // SPLDA_COMMON_H_
