#pragma once

#include <stdexcept>
#include <string>

namespace ttno {

enum class ErrorCode {
  ParseError,
  UnknownSite,
  DuplicateFactor,
  UnassignedSymbol,
  MixedSymbols,
  CycleDetected,
  Disconnected,
  DuplicateId,
  UnknownBond,
  BadParams,
  SiteMismatch,
  MatchingNotMaximum,
  DimensionTooLarge,
  UnknownLabel,
  FileNotFound,
};

const char *error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace ttno
