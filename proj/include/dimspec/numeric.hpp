// Shared numeric helpers: counter-based deterministic randomness, integer
// powers, and least-squares line fitting.
#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace dimspec {

// ---- keyed randomness ------------------------------------------------------

// SplitMix64 finalizer. All randomized code derives draws from keys built out
// of (seed, path) data, so every draw is a pure function of its coordinates
// and independent of traversal order or thread schedule.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child key from a parent key and a branch value.
inline std::uint64_t key_combine(std::uint64_t key, std::uint64_t value) {
    return splitmix64(key ^ (value + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2)));
}

// Uniform double in [0,1) from a key.
inline double unit_double(std::uint64_t key) {
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

// A tiny sequential generator over the keyed primitive, for code that wants a
// stream (bootstrap resampling, random word draws). Still deterministic.
class KeyedStream {
public:
    explicit KeyedStream(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_ + 0x9e3779b97f4a7c15ULL);
        return state_;
    }

    double next_unit() { return unit_double(next()); }

    // Uniform integer in [0, bound) by rejection-free multiply-shift.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(next_unit() * static_cast<double>(bound)) % bound;
    }

private:
    std::uint64_t state_ = 0;
};

// ---- integer powers --------------------------------------------------------

// Exact base^exp in 64-bit arithmetic; throws when the result would overflow.
inline std::int64_t ipow(std::int64_t base, int exp) {
    if (base < 0 || exp < 0) throw std::domain_error("ipow: negative base or exponent");
    std::int64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > (std::int64_t{1} << 62) / base)
            throw resource_error("ipow: result exceeds 2^62");
        out *= base;
    }
    return out;
}

// ---- regression ------------------------------------------------------------

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares for y against x. Needs at least two distinct x.
inline LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: length mismatch");
    if (x.size() < 2) throw insufficient_data_error("linear_fit: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (!(std::fabs(den) > 0))
        throw insufficient_data_error("linear_fit: x values are all equal");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

// Sample standard deviation (denominator n-1); 0 for fewer than two values.
inline double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace dimspec
