#include "altbd/error.hpp"

namespace altbd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kNegativeRate: return "NegativeRate";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kZeroRate: return "ZeroRate";
    case ErrorKind::kOutOfSupport: return "OutOfSupport";
    case ErrorKind::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::kMissingCertificate: return "MissingCertificate";
    case ErrorKind::kCertificateViolated: return "CertificateViolated";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kNumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::kDeadState: return "DeadState";
    case ErrorKind::kUnstable: return "Unstable";
    case ErrorKind::kControlInvalid: return "ControlInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string describe_parse_error(std::size_t offset, const std::vector<std::string>& expected,
                                 const std::string& detail) {
  std::string msg = detail + " at byte " + std::to_string(offset);
  if (!expected.empty()) {
    msg += "; expected one of:";
    for (const auto& tok : expected) msg += " " + tok;
  }
  return msg;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& detail)
    : Error(ErrorKind::kParse, describe_parse_error(offset, expected, detail)),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace altbd
