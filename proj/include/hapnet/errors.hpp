// SPDX-License-Identifier: Apache-2.0
/**
 * @file   errors.hpp
 * @brief  Exception hierarchy shared by every hapnet module.
 *
 * Each error carries a stable machine-readable kind so the CLI can print
 * `error: <kind>: <message>` on a single line.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace hapnet {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

#define HAPNET_DEFINE_ERROR(Name, tag)                                         \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
    const char *kind() const noexcept override { return tag; }                 \
  }

/// Malformed layer/graph/config description.
HAPNET_DEFINE_ERROR(InvalidSpec, "invalid-spec");
/// Data that violates an operation's precondition.
HAPNET_DEFINE_ERROR(InvalidInput, "invalid-input");
HAPNET_DEFINE_ERROR(UnsupportedFormat, "unsupported-format");
HAPNET_DEFINE_ERROR(PlateNotFound, "plate-not-found");
HAPNET_DEFINE_ERROR(InfeasibleSplit, "infeasible-split");
HAPNET_DEFINE_ERROR(UndefinedAuc, "undefined-auc");
HAPNET_DEFINE_ERROR(LeakageDetected, "leakage-detected");
HAPNET_DEFINE_ERROR(IoError, "io-error");

#undef HAPNET_DEFINE_ERROR

} // namespace hapnet
