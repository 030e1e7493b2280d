#pragma once

#include <stdexcept>
#include <string>

namespace covel {

enum class ErrorCode {
  too_few_observations,
  dimension_mismatch,
  bad_bandwidth,
  empty_corner,
  bad_split,
  bad_probability,
  negative_statistic,
  bad_args,
  degenerate_moments,
  not_psd,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code);

/// Exception carrying one of the library's error categories. Every
/// validation failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::too_few_observations: return "TooFewObservations";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::bad_bandwidth: return "BadBandwidth";
    case ErrorCode::empty_corner: return "EmptyCorner";
    case ErrorCode::bad_split: return "BadSplit";
    case ErrorCode::bad_probability: return "BadProbability";
    case ErrorCode::negative_statistic: return "NegativeStatistic";
    case ErrorCode::bad_args: return "BadArgs";
    case ErrorCode::degenerate_moments: return "DegenerateMoments";
    case ErrorCode::not_psd: return "NotPSD";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IOError";
  }
  return "Unknown";
}

}  // namespace covel
