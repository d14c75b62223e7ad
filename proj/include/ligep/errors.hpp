#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ligep {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linear solve hit a pivot below the singularity threshold, or an
/// assembled system turned out inconsistent. Carries the time-step index
/// when raised from inside a stepper.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what,
                                 std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(step ? what + " (time step " + std::to_string(*step) + ")" : what),
          step_(step) {}

    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    std::optional<std::size_t> step_;
};

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_same_size(std::ptrdiff_t lhs, std::ptrdiff_t rhs, const char* what) {
    if (lhs != rhs) {
        throw DimensionError(std::string(what) + ": size mismatch (" + std::to_string(lhs) +
                             " vs " + std::to_string(rhs) + ")");
    }
}

}  // namespace detail
}  // namespace ligep
