// Self-similar sets on the line with overlaps allowed: iterated function
// systems of similarities x -> r_i x + a_i mapping [0,1] into itself.
//
// For similarities the Lipschitz constant of a word is exactly the product
// of its ratios, so the topological pressure collapses to
//   P(s) = log sum_i r_i^s,
// strictly decreasing with a unique zero s (the similarity exponent), and the
// Gibbs measure at s is the self-similar measure with weights r_i^s. On top
// of these sit the delta-stopping sets, an empirical estimate of the local
// dimension floor t, and the overlap upper bound for the Assouad spectrum
//   (s - t*theta)/(1 - theta),
// clipped at the general envelope min(upper_box/(1-theta), 1) for reporting.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "spectrum.hpp"

namespace dimspec {

// ---- systems ----------------------------------------------------------------

struct SimilarityMap {
    double r = 0.5;  // contraction ratio in (0,1)
    double a = 0.0;  // translation
};

struct SimilarIFS {
    std::vector<SimilarityMap> maps;

    void validate() const {
        if (maps.size() < 2) throw std::invalid_argument("SimilarIFS: need at least two maps");
        for (const auto& map : maps) {
            if (!(map.r > 0.0 && map.r < 1.0))
                throw std::domain_error("SimilarIFS: ratio must lie in (0,1)");
            if (!(map.a >= 0.0 && map.r + map.a <= 1.0))
                throw std::domain_error("SimilarIFS: map must send [0,1] into [0,1]");
        }
    }

    double max_ratio() const {
        double rm = 0.0;
        for (const auto& map : maps) rm = std::max(rm, map.r);
        return rm;
    }

    double min_ratio() const {
        double rm = 1.0;
        for (const auto& map : maps) rm = std::min(rm, map.r);
        return rm;
    }
};

// Image of [0,1] under the composition of the word's maps, first letter
// outermost. The word's Lipschitz constant is the interval length.
inline std::pair<double, double> cylinder_interval(const SimilarIFS& ifs,
                                                   const std::vector<int>& word) {
    double offset = 0.0, scale = 1.0;
    for (int letter : word) {
        if (letter < 0 || letter >= static_cast<int>(ifs.maps.size()))
            throw std::invalid_argument("cylinder_interval: letter out of range");
        const auto& map = ifs.maps[static_cast<std::size_t>(letter)];
        offset += scale * map.a;
        scale *= map.r;
    }
    return {offset, offset + scale};
}

// ---- pressure ----------------------------------------------------------------

inline double pressure(const SimilarIFS& ifs, double s) {
    ifs.validate();
    if (s < 0.0) throw std::domain_error("pressure: s must be >= 0");
    double sum = 0.0;
    for (const auto& map : ifs.maps) sum += std::pow(map.r, s);
    return std::log(sum);
}

// Unique zero of the pressure, bisected on [0, log(count)/-log(max r)];
// the bracket width and |P| both end below tol.
inline double similarity_exponent(const SimilarIFS& ifs, double tol = 1e-12) {
    ifs.validate();
    if (!(tol > 0.0)) throw std::domain_error("similarity_exponent: tol must be positive");
    double lo = 0.0;
    double hi = std::log(static_cast<double>(ifs.maps.size())) / -std::log(ifs.max_ratio());
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        mid = 0.5 * (lo + hi);
        const double value = pressure(ifs, mid);
        if (hi - lo < tol && std::fabs(value) < tol) break;
        (value > 0.0 ? lo : hi) = mid;
    }
    return mid;
}

// ---- stopping sets ------------------------------------------------------------

struct StoppingEntry {
    std::vector<int> word;
    double lip = 1.0;  // product of the word's ratios
};

struct StoppingSet {
    std::vector<StoppingEntry> entries;
    double delta = 0.0;
};

struct StoppingOptions {
    std::size_t max_words = 5000000;
};

// The complete prefix-free family of words with Lip(word) <= delta while the
// parent still exceeds delta; every infinite word has exactly one stopping
// prefix and the Lip values all land in (delta * min r_i, delta].
inline StoppingSet stopping_set(const SimilarIFS& ifs, double delta,
                                const StoppingOptions& opts = {}) {
    ifs.validate();
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("stopping_set: delta must lie in (0,1)");
    StoppingSet out;
    out.delta = delta;
    std::vector<int> word;
    auto expand = [&](auto&& self, double lip) -> void {
        for (int letter = 0; letter < static_cast<int>(ifs.maps.size()); ++letter) {
            const double next = lip * ifs.maps[static_cast<std::size_t>(letter)].r;
            word.push_back(letter);
            if (next <= delta) {
                if (out.entries.size() >= opts.max_words)
                    throw resource_error("stopping_set: word-count cap exceeded");
                out.entries.push_back({word, next});
            } else {
                self(self, next);
            }
            word.pop_back();
        }
    };
    expand(expand, 1.0);
    return out;
}

inline double gibbs_mass(const SimilarIFS& ifs, double s, const std::vector<int>& word) {
    ifs.validate();
    if (s < 0.0) throw std::domain_error("gibbs_mass: s must be >= 0");
    double mass = 1.0;
    for (int letter : word) {
        if (letter < 0 || letter >= static_cast<int>(ifs.maps.size()))
            throw std::invalid_argument("gibbs_mass: letter out of range");
        mass *= std::pow(ifs.maps[static_cast<std::size_t>(letter)].r, s);
    }
    return mass;
}

// ---- empirical local-dimension floor -------------------------------------------

struct EstimateTOptions {
    double refine_factor = 0.05;  // stopping scale relative to the smallest radius
    StoppingOptions stopping;
};

// Minimum over sampled attractor points of the regression slope of
// log mu(B(x,r)) against log r, with mu evaluated exactly as the Gibbs mass
// of the stopping cylinders meeting the ball. A finite-scale stand-in for
// the true liminf defining t: heuristic, and biased upward, so callers feed
// it into overlap bounds explicitly rather than implicitly.
inline double estimate_t(const SimilarIFS& ifs, double s, const std::vector<double>& radii,
                         int samples, std::uint64_t seed, const EstimateTOptions& opts = {}) {
    ifs.validate();
    if (samples < 1) throw std::invalid_argument("estimate_t: need at least one sample");
    if (radii.empty()) throw std::invalid_argument("estimate_t: need at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0 && radii[i] < 1.0))
            throw std::domain_error("estimate_t: radii must lie in (0,1)");
        if (i > 0 && !(radii[i] < radii[i - 1]))
            throw std::invalid_argument("estimate_t: radii must be strictly decreasing");
    }

    const double refine = radii.back() * opts.refine_factor;
    const StoppingSet stops = stopping_set(ifs, refine, opts.stopping);
    struct Piece {
        double lo, hi, mass;
    };
    std::vector<Piece> pieces;
    pieces.reserve(stops.entries.size());
    for (const auto& entry : stops.entries) {
        const auto [lo, hi] = cylinder_interval(ifs, entry.word);
        pieces.push_back({lo, hi, gibbs_mass(ifs, s, entry.word)});
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });

    std::vector<double> log_r(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) log_r[i] = std::log(radii[i]);

    double slope_min = std::numeric_limits<double>::infinity();
    for (int sample = 0; sample < samples; ++sample) {
        KeyedStream rng(key_combine(seed, static_cast<std::uint64_t>(sample)));
        // a random deep cylinder pins the sample point to within the
        // refinement scale; its midpoint serves as x
        double offset = 0.0, scale = 1.0;
        while (scale > refine) {
            const auto& map = ifs.maps[rng.next_below(ifs.maps.size())];
            offset += scale * map.a;
            scale *= map.r;
        }
        const double x = offset + 0.5 * scale;

        std::vector<double> log_mu(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double lo = x - radii[i], hi = x + radii[i];
            double mass = 0.0;
            auto first = std::lower_bound(pieces.begin(), pieces.end(), lo,
                                          [](const Piece& piece, double v) { return piece.hi < v; });
            for (auto it = first; it != pieces.end() && it->lo <= hi; ++it) mass += it->mass;
            if (!(mass > 0.0)) throw oracle_error("estimate_t: empty ball mass");
            log_mu[i] = std::log(mass);
        }
        slope_min = std::min(slope_min, radii.size() == 1
                                            ? log_mu[0] / log_r[0]
                                            : linear_fit(log_r, log_mu).slope);
    }
    return slope_min;
}

// ---- overlap bound --------------------------------------------------------------

struct OverlapBoundParams {
    double s = 0.0;          // pressure zero
    double t = 0.0;          // local-dimension floor, in [0, s]
    double upper_box = 0.0;

    void validate() const {
        if (!(t >= 0.0 && t <= upper_box && upper_box <= std::min(s, 1.0)))
            throw std::domain_error("OverlapBoundParams: need 0 <= t <= upper_box <= min(s, 1)");
    }
};

// The bound before clipping: equals s at theta -> 0+ and diverges at
// theta -> 1- whenever t < s.
inline double overlap_bound_raw(double s, double t, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("overlap_bound_raw: theta must lie in (0,1)");
    return (s - t * theta) / (1.0 - theta);
}

inline double overlap_spectrum_bound(const OverlapBoundParams& params, double theta) {
    params.validate();
    const double raw = overlap_bound_raw(params.s, params.t, theta);
    return std::min({raw, params.upper_box / (1.0 - theta), 1.0});
}

// Open theta-interval where the overlap bound beats the general envelope,
// ((s - upper_box)/t, (1 - s)/(1 - t)) intersected with (0,1); empty when
// t = 0 or the endpoints cross.
inline std::optional<std::pair<double, double>> improvement_region(const OverlapBoundParams& params) {
    params.validate();
    if (!(params.t > 0.0)) return std::nullopt;
    const double lo = std::max(0.0, (params.s - params.upper_box) / params.t);
    const double hi = std::min(1.0, params.t < 1.0 ? (1.0 - params.s) / (1.0 - params.t)
                                                   : (params.s <= 1.0 ? 1.0 : 0.0));
    if (!(lo < hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

// ---- separation-condition consequences --------------------------------------------

struct WspFlags {
    bool weak_separation = false;
    bool no_superexp_concentration = false;
};

// Under weak separation, or merely without super-exponential concentration
// of cylinders, the Assouad spectrum of a self-similar set is constant at
// the upper box dimension; the flags are caller assertions.
inline SpectrumCurve wsp_spectrum(const ThetaGrid& grid, double upper_box, WspFlags flags) {
    if (!flags.weak_separation && !flags.no_superexp_concentration)
        throw std::invalid_argument("wsp_spectrum: assert at least one separation hypothesis");
    if (!(upper_box >= 0.0 && upper_box <= 1.0))
        throw std::domain_error("wsp_spectrum: upper_box must lie in [0,1]");
    auto curve = sample_curve(grid, SpectrumKind::assouad, 1,
                              [upper_box](double) { return upper_box; });
    char buf[96];
    if (flags.weak_separation)
        std::snprintf(buf, sizeof buf, "constant %.12g (weak separation; = dim_A)", upper_box);
    else
        std::snprintf(buf, sizeof buf, "constant %.12g (no super-exponential concentration)",
                      upper_box);
    curve.closed_form = buf;
    return curve;
}

} // namespace dimspec
