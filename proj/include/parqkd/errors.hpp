#pragma once

#include <stdexcept>
#include <string>

namespace parqkd {

// Argument outside the documented domain of an operation.
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// An enumeration guard was exceeded.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A strategy or state violates its structural invariants.
struct malformed_strategy_error : std::runtime_error {
    explicit malformed_strategy_error(const std::string& what) : std::runtime_error(what) {}
};

// Bound requested outside the hypothesis it was proved under.
struct theorem_inapplicable_error : std::runtime_error {
    explicit theorem_inapplicable_error(const std::string& what) : std::runtime_error(what) {}
};

// Two artifacts that must describe the same configuration do not.
struct consistency_error : std::runtime_error {
    explicit consistency_error(const std::string& what) : std::runtime_error(what) {}
};

// A statistic was requested from an empty or fully-censored sample.
struct degenerate_statistics_error : std::runtime_error {
    explicit degenerate_statistics_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace parqkd
