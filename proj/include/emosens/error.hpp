#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emosens {

enum class ErrorKind {
  // signal_io
  InvalidSchedule,
  UnsupportedRate,
  IoError,
  FormatError,
  LabelError,
  SchemaError,
  ParseError,
  // qrs_detect / hrv_features
  NoBeatsDetected,
  InsufficientSignal,
  InsufficientData,
  InsufficientSpan,
  EmptyFit,
  // classifiers
  EmptyTrain,
  NonFiniteGradient,
  InvalidK,
  InvalidHyperParam,
  ShapeError,
  // eval_harness
  TooManyFolds,
  EmptyGrid,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

// True for errors caused by malformed input files or configuration, as
// opposed to failures inside a computation.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace emosens
