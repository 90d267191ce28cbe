#include "emosens/error.hpp"

namespace emosens {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    case ErrorKind::UnsupportedRate: return "UnsupportedRate";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::LabelError: return "LabelError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NoBeatsDetected: return "NoBeatsDetected";
    case ErrorKind::InsufficientSignal: return "InsufficientSignal";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InsufficientSpan: return "InsufficientSpan";
    case ErrorKind::EmptyFit: return "EmptyFit";
    case ErrorKind::EmptyTrain: return "EmptyTrain";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InvalidHyperParam: return "InvalidHyperParam";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::TooManyFolds: return "TooManyFolds";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FormatError:
    case ErrorKind::LabelError:
    case ErrorKind::SchemaError:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidHyperParam:
    case ErrorKind::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace emosens
