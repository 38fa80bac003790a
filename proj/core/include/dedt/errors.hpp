#ifndef DEDT_ERRORS_HPP
#define DEDT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dedt {

// Precondition/contract breaches on the in-process API.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Fatal problems with input files (missing frame, corrupt raster, bad CSV).
struct IngestionError : std::runtime_error {
    explicit IngestionError(const std::string& what) : std::runtime_error(what) {}
};

// Fatal tracking failures (degenerate initialization and the like).
struct TrackingError : std::runtime_error {
    explicit TrackingError(const std::string& what) : std::runtime_error(what) {}
};

// A committee member queried before it holds at least k exemplars.
struct UntrainedMember : std::logic_error {
    explicit UntrainedMember(const std::string& what) : std::logic_error(what) {}
};

// The auxiliary classifier queried before its first training pass.
struct UninitializedAuxiliary : std::logic_error {
    explicit UninitializedAuxiliary(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dedt

#endif
