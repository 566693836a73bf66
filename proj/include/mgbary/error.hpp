#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mgbary {

enum class ErrorCode {
  kFileNotFound,
  kParseError,
  kInvalidGraph,
  kInvalidMeasure,
  kInvalidArgument,
  kNonMinimizingEdge,
  kSupportCapExceeded,
  kSolverError,
};

// Stable machine-readable name, used in CLI error objects.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Distinguishes the reasons build_graph rejects a description.
enum class GraphDefect {
  kNonPositiveLength,
  kSelfLoop,
  kDisconnected,
  kIsolatedVertex,
  kUnknownVertex,
  kDuplicateId,
  kEmpty,
};

class GraphError : public Error {
 public:
  GraphError(GraphDefect defect, const std::string& detail)
      : Error(ErrorCode::kInvalidGraph, detail), defect_(defect) {}

  GraphDefect defect() const noexcept { return defect_; }

 private:
  GraphDefect defect_;
};

}  // namespace mgbary
