// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace aim {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input files or config: the caller gave us something unusable.
struct ParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Data that parses but violates cross-record consistency.
struct IntegrityError : Error {
  using Error::Error;
};

// Computational failures: the request was well-formed but cannot be answered.
struct EmptyControlError : Error {
  using Error::Error;
};
struct UnstableDenominatorError : Error {
  using Error::Error;
};
struct InfeasibleError : Error {
  using Error::Error;
};
struct SizeError : Error {
  using Error::Error;
};
struct InsufficientDataError : Error {
  using Error::Error;
};

}  // namespace aim
