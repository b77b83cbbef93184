#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emubench {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes, channel counts or grids that do not fit together.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid user input: unknown scenario ids, bad keys, out-of-range options.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values where finite ones are required, or degenerate inputs
/// (for example a zero-norm target of a normalized metric).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A rollout produced NaN/Inf. `last_valid_step` is the index of the last
/// finite snapshot; `sample` is set by dataset generation (-1 otherwise).
class DivergenceError : public NumericError {
public:
    DivergenceError(const std::string& what, int last_valid_step, int sample = -1)
        : NumericError(what), last_valid_step_(last_valid_step), sample_(sample) {}

    [[nodiscard]] int last_valid_step() const noexcept { return last_valid_step_; }
    [[nodiscard]] int sample() const noexcept { return sample_; }

private:
    int last_valid_step_;
    int sample_;
};

/// Newton's method ran out of iterations or hit a non-finite objective.
class OptimizationError : public NumericError {
public:
    OptimizationError(const std::string& what, std::vector<double> best_params)
        : NumericError(what), best_params_(std::move(best_params)) {}

    [[nodiscard]] const std::vector<double>& best_params() const noexcept { return best_params_; }

private:
    std::vector<double> best_params_;
};

}  // namespace emubench
