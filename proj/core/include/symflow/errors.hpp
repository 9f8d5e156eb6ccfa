#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symflow {

/// Point or state outside the chart domain of a geometry.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested (geometry, order) pair has no registered data.
class UnsupportedGeometryError : public std::runtime_error {
public:
    explicit UnsupportedGeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value produced by an integrator, network or gradient sweep.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double t) : std::runtime_error(what), t_offending(t) {}
    explicit NumericError(const std::string& what) : std::runtime_error(what), t_offending(0.0) {}
    double t_offending;
};

/// An integration left the chart domain mid-flow. Carries the trajectory
/// integrated so far (times/states up to the failing step).
class FlowLeftChartError : public std::runtime_error {
public:
    FlowLeftChartError(const std::string& what,
                       std::vector<double> partial_times,
                       std::vector<std::vector<double>> partial_states)
        : std::runtime_error(what),
          times(std::move(partial_times)),
          states(std::move(partial_states)) {}
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};

/// Iterative solve (numeric inverse) failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

/// Bad file contents (checkpoint schema mismatch, parse failure).
class CheckpointError : public std::runtime_error {
public:
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symflow
