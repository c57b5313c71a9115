// Exception types shared across the library. Plain domain violations use
// std::domain_error / std::invalid_argument directly; these cover the rest.
#pragma once

#include <stdexcept>
#include <string>

namespace dimspec {

// A computation would exceed a configured cap (enumeration depth, node
// budgets, moment order, word counts). Distinct from invalid input: the
// request is well-formed but too large for the configured limits.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// An estimator or accessor was given too little data: fewer than two scales,
// a word or sequence shorter than the indices a formula needs, a horizon
// shorter than the requested window.
class insufficient_data_error : public std::invalid_argument {
public:
    explicit insufficient_data_error(const std::string& what) : std::invalid_argument(what) {}
};

// A caller-supplied covering oracle violated its contract (for example a zero
// box count for a center inside the set).
class oracle_error : public std::logic_error {
public:
    explicit oracle_error(const std::string& what) : std::logic_error(what) {}
};

// Every Monte-Carlo trial died out, so there is no surviving sample to
// estimate from. The message reports the observed survival fraction.
class extinction_error : public std::runtime_error {
public:
    explicit extinction_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dimspec
