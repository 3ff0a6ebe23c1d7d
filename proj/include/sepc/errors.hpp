#pragma once

#include <stdexcept>
#include <string>

namespace sepc {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SEPC_ERROR_TYPE(Name)                                       \
  struct Name : Error {                                             \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

SEPC_ERROR_TYPE(DimensionMismatch);
SEPC_ERROR_TYPE(RankDeficient);
SEPC_ERROR_TYPE(TooFewPoints);
SEPC_ERROR_TYPE(NonConvergence);
SEPC_ERROR_TYPE(InfeasibleD);
SEPC_ERROR_TYPE(InvalidCounts);
SEPC_ERROR_TYPE(InvalidParam);
SEPC_ERROR_TYPE(EmptyInput);
SEPC_ERROR_TYPE(EmptyModel);
SEPC_ERROR_TYPE(ParseError);
SEPC_ERROR_TYPE(MissingLabel);
SEPC_ERROR_TYPE(EmptyFile);
SEPC_ERROR_TYPE(ClassTooSmall);
SEPC_ERROR_TYPE(IoError);
SEPC_ERROR_TYPE(VersionMismatch);
SEPC_ERROR_TYPE(CorruptModel);
SEPC_ERROR_TYPE(PlotDimension);

#undef SEPC_ERROR_TYPE

}  // namespace sepc
