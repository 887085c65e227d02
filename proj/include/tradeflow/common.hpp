#pragma once

#include <stdexcept>
#include <string>

namespace tradeflow {

inline constexpr const char* kVersion = "0.1.0";

/// Error type thrown for contract violations (bad inputs, broken invariants).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(message);
}

} // namespace tradeflow
