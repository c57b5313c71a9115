// Dimension spectra as curves over theta in (0,1): grids, dimension
// summaries, the universal envelope bounds, the generic two-scale empirical
// estimator, transition detection, and curve algebra.
//
// The spectra measured here interpolate between box and Assouad-type
// dimensions by pinning the small scale r to R^{1/theta}. Two facts hold for
// every bounded set and drive the envelope checks:
//   upper_box <= assouad_spectrum(theta) <= min(upper_box/(1-theta), assouad)
//   lower     <= lower_spectrum(theta)   <= lower_box
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace dimspec {

// ---- grids and curves ------------------------------------------------------

struct ThetaGrid {
    std::vector<double> points;  // strictly increasing, all in (0,1)

    // count equally spaced interior points (i+1)/(count+1).
    static ThetaGrid uniform(std::size_t count) {
        ThetaGrid g;
        g.points.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            g.points.push_back(static_cast<double>(i + 1) / static_cast<double>(count + 1));
        return g;
    }

    std::size_t size() const { return points.size(); }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("ThetaGrid: empty grid");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i] > 0.0 && points[i] < 1.0))
                throw std::domain_error("ThetaGrid: points must lie in (0,1)");
            if (i > 0 && !(points[i] > points[i - 1]))
                throw std::invalid_argument("ThetaGrid: points must be strictly increasing");
        }
    }
};

enum class SpectrumKind { assouad, lower };

inline const char* to_string(SpectrumKind k) {
    return k == SpectrumKind::assouad ? "assouad" : "lower";
}

struct SpectrumCurve {
    ThetaGrid grid;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::assouad;
    std::vector<double> transitions;  // phase-transition locations, may be empty
    std::string closed_form;          // human-readable descriptor; empty when none
    int ambient_dim = 1;

    void validate() const {
        grid.validate();
        if (values.size() != grid.size())
            throw std::invalid_argument("SpectrumCurve: values/grid length mismatch");
        if (ambient_dim < 1) throw std::domain_error("SpectrumCurve: ambient_dim must be >= 1");
        for (double v : values)
            if (!(v >= 0.0 && v <= static_cast<double>(ambient_dim) + 1e-12))
                throw std::domain_error("SpectrumCurve: value outside [0, ambient_dim]");
    }
};

// Samples a curve from a pointwise formula.
template <typename F>
SpectrumCurve sample_curve(const ThetaGrid& grid, SpectrumKind kind, int ambient_dim, F&& f) {
    grid.validate();
    SpectrumCurve curve;
    curve.grid = grid;
    curve.kind = kind;
    curve.ambient_dim = ambient_dim;
    curve.values.reserve(grid.size());
    for (double theta : grid.points) curve.values.push_back(f(theta));
    return curve;
}

// ---- dimension summaries ---------------------------------------------------

struct DimensionSummary {
    double lower = 0.0;
    double lower_box = 0.0;
    double upper_box = 0.0;
    double assouad = 0.0;
    std::optional<double> hausdorff;
    std::optional<double> modified_lower;
    int ambient_dim = 1;

    void validate(double tol = 1e-9) const {
        if (ambient_dim < 1) throw std::domain_error("DimensionSummary: ambient_dim must be >= 1");
        const double d = static_cast<double>(ambient_dim);
        auto in_range = [&](double v) { return v >= -tol && v <= d + tol; };
        if (!in_range(lower) || !in_range(lower_box) || !in_range(upper_box) || !in_range(assouad))
            throw std::domain_error("DimensionSummary: dimension outside [0, ambient_dim]");
        if (hausdorff && !in_range(*hausdorff))
            throw std::domain_error("DimensionSummary: hausdorff outside [0, ambient_dim]");
        if (modified_lower && !in_range(*modified_lower))
            throw std::domain_error("DimensionSummary: modified_lower outside [0, ambient_dim]");
        if (lower > lower_box + tol || lower_box > upper_box + tol || upper_box > assouad + tol)
            throw std::domain_error("DimensionSummary: dimension chain violated");
    }
};

// ---- universal envelopes ---------------------------------------------------

struct Envelope {
    double lo = 0.0;
    double hi = 0.0;
};

// Bounds every Assouad spectrum must satisfy at this theta.
inline Envelope assouad_envelope(const DimensionSummary& summary, double theta) {
    summary.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("assouad_envelope: theta must lie in (0,1)");
    Envelope env;
    env.lo = summary.upper_box;
    env.hi = std::min(summary.upper_box / (1.0 - theta), summary.assouad);
    return env;
}

// Bounds every lower spectrum must satisfy at this theta.
inline Envelope lower_envelope(const DimensionSummary& summary, double theta) {
    summary.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("lower_envelope: theta must lie in (0,1)");
    Envelope env;
    env.lo = summary.lower;
    env.hi = summary.lower_box;
    return env;
}

// ---- curve checking --------------------------------------------------------

struct CurveReport {
    struct Entry {
        std::size_t index = 0;
        double theta = 0.0;
        double value = 0.0;
        double lo = 0.0;       // envelope at this point (0 for jump entries)
        double hi = 0.0;
        double excess = 0.0;   // distance past the envelope, or the jump size
        bool jump = false;     // true for adjacent-point continuity violations
    };
    std::vector<Entry> entries;

    bool pass() const { return entries.empty(); }
};

// Flags every grid point whose value breaks its envelope by more than tol,
// and every adjacent-point jump larger than max_jump (pass a finite max_jump
// to enable the continuity check; the sensible threshold depends on the
// formula's slope bound over the grid).
inline CurveReport check_curve(const SpectrumCurve& curve, const DimensionSummary& summary,
                               double tol,
                               double max_jump = std::numeric_limits<double>::infinity()) {
    curve.validate();
    summary.validate();
    CurveReport report;
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        const double theta = curve.grid.points[i];
        const Envelope env = curve.kind == SpectrumKind::assouad
                                 ? assouad_envelope(summary, theta)
                                 : lower_envelope(summary, theta);
        const double v = curve.values[i];
        const double excess = std::max(env.lo - v, v - env.hi);
        if (excess > tol)
            report.entries.push_back({i, theta, v, env.lo, env.hi, excess, false});
        if (i > 0) {
            const double jump = std::fabs(v - curve.values[i - 1]);
            if (jump > max_jump)
                report.entries.push_back({i, theta, v, 0.0, 0.0, jump, true});
        }
    }
    return report;
}

// ---- empirical two-scale estimator -----------------------------------------

struct ScalePoint {
    double big_scale = 0.0;  // R
    double count = 0.0;      // max over centers of N(center, R, R^{1/theta})
    double ratio = 0.0;      // log count / ((1 - 1/theta) log R)
};

struct EmpiricalSpectrum {
    double slope = 0.0;            // regression point estimate
    double last_window_max = 0.0;  // max per-scale ratio over the last scales
    std::vector<ScalePoint> per_scale;
};

// Fits log N(x, R, R^{1/theta}) against (1 - 1/theta) log R, maximizing the
// oracle count over centers at each scale. The oracle is called as
// oracle(center, R, r) and must return the covering count as a positive
// number. Both the regression slope and the trailing per-scale max are
// reported so slow convergence is distinguishable from genuine value.
template <typename Oracle, typename Center>
EmpiricalSpectrum empirical_spectrum(Oracle&& oracle, double theta,
                                     const std::vector<double>& scales,
                                     const std::vector<Center>& centers) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("empirical_spectrum: theta must lie in (0,1)");
    if (scales.size() < 2)
        throw insufficient_data_error("empirical_spectrum: need at least two scales");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0 && scales[i] < 1.0))
            throw std::domain_error("empirical_spectrum: scales must lie in (0,1)");
        if (i > 0 && !(scales[i] < scales[i - 1]))
            throw std::invalid_argument("empirical_spectrum: scales must be strictly decreasing");
    }
    if (centers.empty())
        throw insufficient_data_error("empirical_spectrum: need at least one center");

    EmpiricalSpectrum out;
    std::vector<double> xs, ys;
    for (double big : scales) {
        const double small = std::pow(big, 1.0 / theta);
        double best = 0.0;
        for (const Center& c : centers)
            best = std::max(best, static_cast<double>(oracle(c, big, small)));
        if (!(best >= 1.0))
            throw oracle_error("empirical_spectrum: oracle returned a count below 1");
        const double x = (1.0 - 1.0 / theta) * std::log(big);  // positive
        const double y = std::log(best);
        xs.push_back(x);
        ys.push_back(y);
        out.per_scale.push_back({big, best, y / x});
    }
    out.slope = linear_fit(xs, ys).slope;
    const std::size_t window = std::min<std::size_t>(3, out.per_scale.size());
    out.last_window_max = 0.0;
    for (std::size_t i = out.per_scale.size() - window; i < out.per_scale.size(); ++i)
        out.last_window_max = std::max(out.last_window_max, out.per_scale[i].ratio);
    return out;
}

// ---- transition detection --------------------------------------------------

// Finds grid points where the chord slope changes by more than jump_tol
// across a window-sized stencil (a normalized discrete second difference).
// Consecutive firing stencils within one window are merged, keeping the
// leftmost point, so output is deterministic on plateaus.
inline std::vector<double> detect_transitions(const SpectrumCurve& curve, std::size_t window = 1,
                                              double jump_tol = 0.05) {
    curve.validate();
    if (window == 0) throw std::invalid_argument("detect_transitions: window must be >= 1");
    const auto& th = curve.grid.points;
    const auto& v = curve.values;
    std::vector<std::size_t> hits;
    if (v.size() >= 2 * window + 1) {
        for (std::size_t i = window; i + window < v.size(); ++i) {
            const double left = (v[i] - v[i - window]) / (th[i] - th[i - window]);
            const double right = (v[i + window] - v[i]) / (th[i + window] - th[i]);
            if (std::fabs(right - left) > jump_tol) hits.push_back(i);
        }
    }
    std::vector<double> out;
    for (std::size_t j = 0; j < hits.size(); ++j) {
        if (j == 0 || hits[j] - hits[j - 1] > window) out.push_back(th[hits[j]]);
    }
    return out;
}

// ---- curve algebra ---------------------------------------------------------

// Pointwise extremum of curves on one grid: max for assouad kind, min for
// lower kind (spectra of finite unions). Transitions of the inputs survive
// when the winning curve near that theta is the one that owns the transition.
inline SpectrumCurve union_curves(const std::vector<SpectrumCurve>& curves) {
    if (curves.empty()) throw std::invalid_argument("union_curves: no curves");
    for (const auto& c : curves) c.validate();
    const SpectrumCurve& first = curves.front();
    for (const auto& c : curves) {
        if (c.kind != first.kind)
            throw std::invalid_argument("union_curves: mixed curve kinds");
        if (c.grid.points.size() != first.grid.points.size())
            throw std::invalid_argument("union_curves: grid size mismatch");
        for (std::size_t i = 0; i < c.grid.points.size(); ++i)
            if (std::fabs(c.grid.points[i] - first.grid.points[i]) > 1e-15)
                throw std::invalid_argument("union_curves: grid point mismatch");
    }

    SpectrumCurve out;
    out.grid = first.grid;
    out.kind = first.kind;
    out.ambient_dim = first.ambient_dim;
    for (const auto& c : curves) out.ambient_dim = std::max(out.ambient_dim, c.ambient_dim);
    const bool take_max = first.kind == SpectrumKind::assouad;
    out.values = first.values;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = take_max ? std::max(out.values[i], c.values[i])
                                     : std::min(out.values[i], c.values[i]);

    const auto& th = out.grid.points;
    auto nearest_index = [&](double theta) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < th.size(); ++i)
            if (std::fabs(th[i] - theta) < std::fabs(th[best] - theta)) best = i;
        return best;
    };
    for (const auto& c : curves) {
        for (double t : c.transitions) {
            const std::size_t i = nearest_index(t);
            const std::size_t lo = i > 0 ? i - 1 : i;
            const std::size_t hi = i + 1 < th.size() ? i + 1 : i;
            bool owns = true;
            for (std::size_t j = lo; j <= hi; ++j)
                owns = owns && std::fabs(c.values[j] - out.values[j]) <= 1e-12;
            if (owns && std::find(out.transitions.begin(), out.transitions.end(), t) ==
                            out.transitions.end())
                out.transitions.push_back(t);
        }
    }
    std::sort(out.transitions.begin(), out.transitions.end());
    return out;
}

} // namespace dimspec
