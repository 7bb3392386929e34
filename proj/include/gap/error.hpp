// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gap {

enum class ErrorCode {
  DanglingReference,
  EmptyGraph,
  SlotOverflow,
  DuplicateId,
  UnreferencedComponent,
  EmptyLabel,
  IndexOutOfRange,
  EmptyCorpus,
  TokenizationEmpty,
  ShapeMismatch,
  EmptySpans,
  UnknownType,
  LengthOverflow,
  AllPadTarget,
  EmptyInput,
  ParseError,
  ValidationError,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Dataset errors carry the 1-based line number of the offending record.
class LineError : public Error {
 public:
  LineError(ErrorCode code, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gap
