#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace brinkman {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Error type thrown on contract violations (bad domains, non-monotone
/// inputs, solver breakdowns). Carries a human-readable message.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace brinkman
