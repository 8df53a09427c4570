#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace altbd {

enum class ErrorKind {
  kInvalidArgument,
  kConfig,
  kParse,
  kNegativeRate,
  kNonFinite,
  kZeroRate,
  kOutOfSupport,
  kDegenerateDenominator,
  kMissingCertificate,
  kCertificateViolated,
  kSingularSystem,
  kNumericalBreakdown,
  kDeadState,
  kUnstable,
  kControlInvalid,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the rate-expression parser. `offset` is a byte offset into the
/// source text; `expected` lists the token classes that would have been
/// accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& detail);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace altbd
