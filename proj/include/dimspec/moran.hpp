// Homogeneous Moran constructions: level-k contraction ratios c(k) with a
// uniform positive floor, and branching given either per level (uniformly
// homogeneous) or by an explicit finite tree of per-vertex child counts.
//
// The spectra come from window counts. With S_k = -log prod_{i<=k} c(i),
// the depth l(theta,k) is the largest l with S_l <= S_k/theta, and the
// Assouad partial at k is
//   log(max_v N(v, l-k)) / ((1/theta - 1) S_k),
// the lower partial the same with min; limsup/liminf are approximated by
// sup/inf over a tail window of the truncated partials.
//
// The dyadic {1,2}-sequence calculus specializes this to c = 1/2, where box
// dimensions are asymptotic densities of the 2s, Assouad/lower dimensions
// are Banach densities, and inverting 1 <-> 2 swaps the two spectra against
// 1. The (t, lambda) block recipe realizes any prescribed density t in
// sparse blocks [f(k), floor(lambda f(k))], giving closed-form curves
//   min((t/lambda)(lambda-1)/(1-theta), t)
// with the phase transition at theta = 1/lambda.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "spectrum.hpp"
#include "truncated_limit.hpp"

namespace dimspec {

// ---- specifications -----------------------------------------------------------

struct MoranTree {
    // counts[k][v] = children of vertex v at level k, vertices in level order;
    // counts[0] describes the root level (one vertex)
    std::vector<std::vector<int>> counts;

    int depth() const { return static_cast<int>(counts.size()); }
};

struct MoranSpec {
    std::vector<double> c;       // c(1), c(2), ... up to the declared horizon
    double c_floor = 0.0;
    std::vector<int> branching;  // uniform N(1), N(2), ...; ignored when tree present
    MoranTree tree;
    int ambient_dim = 1;

    bool uses_tree() const { return !tree.counts.empty(); }

    void validate() const {
        if (c.empty()) throw std::invalid_argument("MoranSpec: empty contraction sequence");
        if (!(c_floor > 0.0)) throw std::domain_error("MoranSpec: c_floor must be positive");
        for (double value : c)
            if (!(value >= c_floor && value < 1.0))
                throw std::domain_error("MoranSpec: c(k) must lie in [c_floor, 1)");
        if (ambient_dim < 1) throw std::domain_error("MoranSpec: ambient_dim must be >= 1");
        if (uses_tree()) {
            if (tree.counts[0].size() != 1)
                throw std::invalid_argument("MoranSpec: tree must start from a single root");
            std::size_t width = 1;
            for (const auto& level : tree.counts) {
                if (level.size() != width)
                    throw std::invalid_argument("MoranSpec: tree level width mismatch");
                std::size_t next = 0;
                for (int count : level) {
                    if (count < 1) throw std::domain_error("MoranSpec: every vertex needs a child");
                    next += static_cast<std::size_t>(count);
                }
                width = next;
            }
        } else {
            if (branching.empty())
                throw std::invalid_argument("MoranSpec: need branching counts or a tree");
            for (int count : branching)
                if (count < 1) throw std::domain_error("MoranSpec: every vertex needs a child");
        }
    }
};

// Interval/cube packing feasibility: N(k) children of size c(k+1) fit in a
// unit cell only when N(k) <= floor(1/c(k+1))^d. The spectra consume tree
// data alone, so violations warn instead of failing.
inline std::vector<std::string> feasibility_warnings(const MoranSpec& spec) {
    spec.validate();
    std::vector<std::string> warnings;
    const std::size_t horizon =
        spec.uses_tree() ? spec.tree.counts.size() : spec.branching.size();
    for (std::size_t k = 0; k + 1 < spec.c.size() && k < horizon; ++k) {
        int n_k = 0;
        if (spec.uses_tree())
            for (int count : spec.tree.counts[k]) n_k = std::max(n_k, count);
        else
            n_k = spec.branching[k];
        double capacity = 1.0;
        for (int i = 0; i < spec.ambient_dim; ++i)
            capacity *= std::floor(1.0 / spec.c[k + 1]);
        if (static_cast<double>(n_k) > capacity) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "level %zu: N = %d exceeds packing capacity %.0f for c(%zu) = %g",
                          k + 1, n_k, capacity, k + 2, spec.c[k + 1]);
            warnings.push_back(buf);
        }
    }
    return warnings;
}

// ---- window depth ---------------------------------------------------------------

namespace detail {

// prefix sums of -log c, 1-based; S[0] = 0. Compensated summation keeps the
// relative error near machine epsilon independent of the horizon, so the
// boundary slack below can stay tiny.
inline std::vector<double> neglog_prefix(const std::vector<double>& c) {
    std::vector<double> s(c.size() + 1, 0.0);
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double term = -std::log(c[i]) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
        s[i + 1] = sum;
    }
    return s;
}

// exact-power boundaries (k/theta integral for constant c) must land on the
// inclusive side, so targets get a slack proportional to their magnitude
inline double inclusive_target(double target) {
    return target + 1e-13 * std::max(1.0, target);
}

// largest l with S_l <= target, scanning upward from hint; the horizon must
// reach one step past the answer to certify maximality
inline long resolve_depth(const std::vector<double>& s, double target, long hint) {
    long l = hint;
    while (true) {
        if (static_cast<std::size_t>(l + 1) >= s.size())
            throw insufficient_data_error(
                "l_theta_k: contraction horizon too short to resolve the window depth");
        if (s[static_cast<std::size_t>(l + 1)] > target) return l;
        ++l;
    }
}

} // namespace detail

// Largest l with prod_{i<=l} c(i) >= (prod_{i<=k} c(i))^{1/theta}, compared
// in -log space with a relative slack so exact-power boundaries land on the
// inclusive side. Always >= k.
inline long l_theta_k(const std::vector<double>& c, double theta, long k) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("l_theta_k: theta must lie in (0,1)");
    if (k < 1) throw std::domain_error("l_theta_k: k must be >= 1");
    if (static_cast<std::size_t>(k) > c.size())
        throw insufficient_data_error("l_theta_k: k beyond the contraction horizon");
    const std::vector<double> s = detail::neglog_prefix(c);
    return detail::resolve_depth(
        s, detail::inclusive_target(s[static_cast<std::size_t>(k)] / theta), k);
}

inline long l_theta_k(const MoranSpec& spec, double theta, long k) {
    spec.validate();
    return l_theta_k(spec.c, theta, k);
}

// ---- truncated spectra ------------------------------------------------------------

namespace detail {

// prefix ranges through the tree: descendants of one level-k vertex occupy a
// contiguous index range on each deeper level
struct TreeRanges {
    std::vector<std::vector<std::size_t>> offsets;  // offsets[k][v] = first child index

    explicit TreeRanges(const MoranTree& tree) {
        offsets.reserve(tree.counts.size());
        for (const auto& level : tree.counts) {
            std::vector<std::size_t> off(level.size() + 1, 0);
            for (std::size_t v = 0; v < level.size(); ++v)
                off[v + 1] = off[v] + static_cast<std::size_t>(level[v]);
            offsets.push_back(std::move(off));
        }
    }

    std::size_t level_width(long k) const {
        if (k == 0) return 1;
        return offsets[static_cast<std::size_t>(k - 1)].back();
    }

    // extreme descendant counts at level l over all vertices at level k
    std::pair<std::size_t, std::size_t> descendant_extremes(long k, long l) const {
        std::size_t best_max = 0, best_min = SIZE_MAX;
        const std::size_t width = level_width(k);
        for (std::size_t v = 0; v < width; ++v) {
            std::size_t lo = v, hi = v + 1;
            for (long level = k; level < l; ++level) {
                lo = offsets[static_cast<std::size_t>(level)][lo];
                hi = offsets[static_cast<std::size_t>(level)][hi];
            }
            best_max = std::max(best_max, hi - lo);
            best_min = std::min(best_min, hi - lo);
        }
        return {best_min, best_max};
    }
};

enum class Extremum { maximum, minimum };

inline TruncatedLimit moran_spectrum_trunc(const MoranSpec& spec, double theta, long K,
                                           Extremum which, double tail_fraction) {
    spec.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("spectrum_trunc: theta must lie in (0,1)");
    if (K < 1) throw std::invalid_argument("spectrum_trunc: K must be >= 1");
    if (static_cast<std::size_t>(K) > spec.c.size())
        throw insufficient_data_error("spectrum_trunc: contraction horizon shorter than K");

    const std::vector<double> s = neglog_prefix(spec.c);
    std::vector<double> log_n_prefix;
    if (!spec.uses_tree()) {
        log_n_prefix.assign(spec.branching.size() + 1, 0.0);
        double sum = 0.0, carry = 0.0;
        for (std::size_t i = 0; i < spec.branching.size(); ++i) {
            const double term = std::log(static_cast<double>(spec.branching[i])) - carry;
            const double next = sum + term;
            carry = (next - sum) - term;
            sum = next;
            log_n_prefix[i + 1] = sum;
        }
    }
    const TreeRanges ranges{spec.uses_tree() ? spec.tree : MoranTree{}};

    std::vector<std::pair<long, double>> partials;
    partials.reserve(static_cast<std::size_t>(K));
    long l = 1;
    for (long k = 1; k <= K; ++k) {
        l = resolve_depth(s, inclusive_target(s[static_cast<std::size_t>(k)] / theta),
                          std::max(l, k));
        double log_count = 0.0;
        if (spec.uses_tree()) {
            if (l > spec.tree.depth())
                throw insufficient_data_error("spectrum_trunc: tree shallower than l(theta,k)");
            const auto [cmin, cmax] = ranges.descendant_extremes(k, l);
            log_count = std::log(static_cast<double>(which == Extremum::maximum ? cmax : cmin));
        } else {
            if (static_cast<std::size_t>(l) >= log_n_prefix.size())
                throw insufficient_data_error("spectrum_trunc: branching horizon shorter than l(theta,k)");
            log_count = log_n_prefix[static_cast<std::size_t>(l)] -
                        log_n_prefix[static_cast<std::size_t>(k)];
        }
        const double denom = (1.0 / theta - 1.0) * s[static_cast<std::size_t>(k)];
        partials.emplace_back(k, log_count / denom);
    }
    return TruncatedLimit::from_partials(partials, tail_fraction);
}

} // namespace detail

inline TruncatedLimit assouad_spectrum_trunc(const MoranSpec& spec, double theta, long K,
                                             double tail_fraction = 0.2) {
    return detail::moran_spectrum_trunc(spec, theta, K, detail::Extremum::maximum, tail_fraction);
}

inline TruncatedLimit lower_spectrum_trunc(const MoranSpec& spec, double theta, long K,
                                           double tail_fraction = 0.2) {
    return detail::moran_spectrum_trunc(spec, theta, K, detail::Extremum::minimum, tail_fraction);
}

inline TruncatedLimit uniform_spectrum_trunc(const std::vector<double>& c_seq,
                                             const std::vector<int>& n_seq, double theta, long K,
                                             double tail_fraction = 0.2) {
    MoranSpec spec;
    spec.c = c_seq;
    spec.c_floor = c_seq.empty() ? 0.0 : *std::min_element(c_seq.begin(), c_seq.end());
    spec.branching = n_seq;
    return assouad_spectrum_trunc(spec, theta, K, tail_fraction);
}

// ---- dyadic {1,2} sequences --------------------------------------------------------

struct DyadicSequence {
    std::vector<int> values;  // values[i] = N(i+1), each 1 or 2

    void validate() const {
        if (values.empty()) throw std::invalid_argument("DyadicSequence: empty sequence");
        for (int value : values)
            if (value != 1 && value != 2)
                throw std::domain_error("DyadicSequence: values must be 1 or 2");
    }

    long horizon() const { return static_cast<long>(values.size()); }
};

inline DyadicSequence invert(const DyadicSequence& seq) {
    seq.validate();
    DyadicSequence out = seq;
    for (int& value : out.values) value = 3 - value;
    return out;
}

// number of 2s at positions from..to, 1-based inclusive; the integer that
// makes the inversion duality exact: count(invert) = length - count(orig)
inline long dyadic_window_count(const DyadicSequence& seq, long from, long to) {
    seq.validate();
    if (from < 1 || to > seq.horizon() || from > to)
        throw std::invalid_argument("dyadic_window_count: bad window");
    long count = 0;
    for (long i = from; i <= to; ++i)
        if (seq.values[static_cast<std::size_t>(i - 1)] == 2) ++count;
    return count;
}

inline TruncatedLimit dyadic_spectrum_trunc(const DyadicSequence& seq, double theta, long K,
                                            double tail_fraction = 0.2) {
    seq.validate();
    return uniform_spectrum_trunc(std::vector<double>(seq.values.size(), 0.5), seq.values, theta,
                                  K, tail_fraction);
}

struct DyadicDensities {
    double upper_box = 0.0;  // upper asymptotic density of the 2s
    double lower_box = 0.0;
    double assouad = 0.0;    // upper Banach density
    double lower = 0.0;      // lower Banach density
};

// Asymptotic densities from prefix counts (sup/inf over the tail window) and
// Banach densities from the sweep of windows of length exactly min_window,
// the finite-scale extremes that bracket the true Banach densities.
inline DyadicDensities dyadic_densities(const DyadicSequence& seq, long K, long min_window = 2,
                                        double tail_fraction = 0.2) {
    seq.validate();
    if (K < 1 || K > seq.horizon())
        throw std::invalid_argument("dyadic_densities: K outside the sequence horizon");
    if (min_window < 1 || min_window > K)
        throw std::invalid_argument("dyadic_densities: bad window length");

    std::vector<std::pair<long, double>> prefix;
    prefix.reserve(static_cast<std::size_t>(K));
    long twos = 0;
    for (long k = 1; k <= K; ++k) {
        if (seq.values[static_cast<std::size_t>(k - 1)] == 2) ++twos;
        prefix.emplace_back(k, static_cast<double>(twos) / static_cast<double>(k));
    }
    const TruncatedLimit asym = TruncatedLimit::from_partials(prefix, tail_fraction);

    long window = 0;
    long best_max = 0, best_min = min_window;
    for (long k = 1; k <= K; ++k) {
        if (seq.values[static_cast<std::size_t>(k - 1)] == 2) ++window;
        if (k > min_window && seq.values[static_cast<std::size_t>(k - min_window - 1)] == 2)
            --window;
        if (k >= min_window) {
            best_max = std::max(best_max, window);
            best_min = std::min(best_min, window);
        }
    }

    DyadicDensities out;
    out.upper_box = asym.sup_tail;
    out.lower_box = asym.inf_tail;
    out.assouad = static_cast<double>(best_max) / static_cast<double>(min_window);
    out.lower = static_cast<double>(best_min) / static_cast<double>(min_window);
    return out;
}

// ---- block recipe --------------------------------------------------------------------

// 2s distributed with density t inside the sparse blocks [f(k), floor(lambda
// f(k))] with f(k) = f_base^k, 1s elsewhere; blocks must stay disjoint.
inline DyadicSequence recipe_sequence(double t, double lambda, long K, long f_base = 4) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("recipe_sequence: t must lie in [0,1]");
    if (!(lambda > 1.0)) throw std::domain_error("recipe_sequence: lambda must exceed 1");
    if (K < 1) throw std::invalid_argument("recipe_sequence: K must be >= 1");
    if (f_base < 2) throw std::domain_error("recipe_sequence: f_base must be >= 2");

    DyadicSequence seq;
    seq.values.assign(static_cast<std::size_t>(K), 1);
    __int128 f = f_base;
    __int128 prev_end = 0;
    while (f <= K) {
        const __int128 start = f;
        const __int128 end = static_cast<__int128>(lambda * static_cast<double>(start));
        if (start <= prev_end)
            throw std::invalid_argument("recipe_sequence: blocks overlap, need [lambda f(k)] < f(k+1)");
        const __int128 length = end - start + 1;
        const __int128 count = static_cast<__int128>(t * static_cast<double>(length));
        for (__int128 j = 0; j < count; ++j) {
            const __int128 position = start + (j * length) / count;
            if (position <= K) seq.values[static_cast<std::size_t>(position - 1)] = 2;
        }
        prev_end = end;
        f *= f_base;
    }
    return seq;
}

// Closed-form Assouad spectrum of the recipe: box dimension (t/lambda)(lambda-1),
// full dimension t, transition at theta = 1/lambda.
inline SpectrumCurve recipe_curve(double t, double lambda, const ThetaGrid& grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("recipe_curve: t must lie in [0,1]");
    if (!(lambda > 1.0)) throw std::domain_error("recipe_curve: lambda must exceed 1");
    const double box = (t / lambda) * (lambda - 1.0);
    auto curve = sample_curve(grid, SpectrumKind::assouad, 1, [&](double theta) {
        return std::min(box / (1.0 - theta), t);
    });
    char buf[128];
    if (t > 0.0) {
        curve.transitions = {1.0 / lambda};
        std::snprintf(buf, sizeof buf, "min(%.12g/(1 - theta), %.12g); transition at %.12g", box,
                      t, 1.0 / lambda);
    } else {
        std::snprintf(buf, sizeof buf, "constant 0");
    }
    curve.closed_form = buf;
    return curve;
}

// Spectrum of the inverted sequence: values reflect through 1 and the kind
// swaps, transitions surviving in place.
inline SpectrumCurve invert_curve(const SpectrumCurve& curve) {
    curve.validate();
    SpectrumCurve out = curve;
    out.kind = curve.kind == SpectrumKind::assouad ? SpectrumKind::lower : SpectrumKind::assouad;
    for (double& value : out.values) value = 1.0 - value;
    out.closed_form = curve.closed_form.empty() ? "" : "1 - (" + curve.closed_form + ")";
    return out;
}

// The sharpness schedule: 2s at even positions as background, with a run of
// n 1s at f(n) followed by a run of n 2s, so both Banach densities are
// eventually attained while the asymptotic densities stay at 1/2.
inline DyadicSequence sharpness_sequence(long K, long f_base = 4) {
    if (K < 1) throw std::invalid_argument("sharpness_sequence: K must be >= 1");
    if (f_base < 4) throw std::domain_error("sharpness_sequence: f_base must be >= 4");
    DyadicSequence seq;
    seq.values.assign(static_cast<std::size_t>(K), 1);
    for (long i = 2; i <= K; i += 2) seq.values[static_cast<std::size_t>(i - 1)] = 2;
    long f = f_base;
    for (long n = 1; f <= K; ++n) {
        for (long j = 0; j < n && f + j <= K; ++j)
            seq.values[static_cast<std::size_t>(f + j - 1)] = 1;
        for (long j = 0; j < n && f + n + j <= K; ++j)
            seq.values[static_cast<std::size_t>(f + n + j - 1)] = 2;
        if (f > K / f_base) break;
        f *= f_base;
    }
    return seq;
}

} // namespace dimspec
