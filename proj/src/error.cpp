// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/error.hpp"

namespace gap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::SlotOverflow: return "SlotOverflow";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnreferencedComponent: return "UnreferencedComponent";
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TokenizationEmpty: return "TokenizationEmpty";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySpans: return "EmptySpans";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::LengthOverflow: return "LengthOverflow";
    case ErrorCode::AllPadTarget: return "AllPadTarget";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

LineError::LineError(ErrorCode code, std::size_t line, const std::string& message)
    : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace gap
