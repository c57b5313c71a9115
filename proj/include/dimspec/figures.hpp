// Built-in parameter sets reproducing the reference figures as CSV bundles:
//   fig3: Assouad and lower spectra with general envelopes for two carpets
//   fig4: overlap upper bounds for two self-similar parameter sets
//   fig6: unions of block-recipe spectra (top row) and their inversions
//         (bottom row), with multiple phase transitions
// Every panel is one CSV with columns theta, value, envelope_lo, envelope_hi
// so any external plotter reproduces the figure.
#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "carpet.hpp"
#include "moran.hpp"
#include "selfsimilar.hpp"
#include "serialize.hpp"
#include "spectrum.hpp"

namespace dimspec {

struct FigurePanel {
    std::string name;  // file stem
    std::string csv;
};

namespace detail {

inline CarpetSpec fig3_left_carpet() {
    CarpetSpec spec;
    spec.m = 2;
    spec.n = 3;
    spec.rects = {{0, 0}, {0, 2}, {1, 1}};
    return spec;
}

inline CarpetSpec fig3_right_carpet() {
    CarpetSpec spec;
    spec.m = 3;
    spec.n = 5;
    spec.rects = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 0}, {2, 4}};
    return spec;
}

inline std::vector<Envelope> curve_envelopes(const SpectrumCurve& curve,
                                             const DimensionSummary& summary) {
    std::vector<Envelope> envelopes;
    envelopes.reserve(curve.grid.points.size());
    for (double theta : curve.grid.points)
        envelopes.push_back(curve.kind == SpectrumKind::assouad
                                ? assouad_envelope(summary, theta)
                                : lower_envelope(summary, theta));
    return envelopes;
}

inline void append_carpet_panels(std::vector<FigurePanel>& panels, const std::string& stem,
                                 const CarpetSpec& spec, const ThetaGrid& grid) {
    const DimensionSummary dims = carpet_dimensions(spec);
    const SpectrumCurve upper = assouad_curve(spec, grid);
    const SpectrumCurve lower = lower_curve(spec, grid);
    panels.push_back({stem + "_assouad", curve_to_csv(upper, curve_envelopes(upper, dims))});
    panels.push_back({stem + "_lower", curve_to_csv(lower, curve_envelopes(lower, dims))});
}

inline void append_overlap_panel(std::vector<FigurePanel>& panels, const std::string& stem,
                                 double s, double t, double upper_box, const ThetaGrid& grid) {
    OverlapBoundParams params{s, t, upper_box};
    auto curve = sample_curve(grid, SpectrumKind::assouad, 1,
                              [&](double theta) { return overlap_spectrum_bound(params, theta); });
    char buf[128];
    std::snprintf(buf, sizeof buf, "min((%.12g - %.12g*theta)/(1 - theta), %.12g/(1 - theta), 1)",
                  s, t, upper_box);
    curve.closed_form = buf;
    std::vector<Envelope> envelopes;
    envelopes.reserve(grid.points.size());
    for (double theta : grid.points)
        envelopes.push_back({upper_box, std::min(upper_box / (1.0 - theta), 1.0)});
    panels.push_back({stem, curve_to_csv(curve, envelopes)});
}

// the sparse-run construction: box dimension 0 but full Assouad dimension,
// so its Assouad spectrum is constantly 0 while dim_A = 1
inline SpectrumCurve run_set_curve(const ThetaGrid& grid) {
    auto curve = sample_curve(grid, SpectrumKind::assouad, 1, [](double) { return 0.0; });
    curve.closed_form = "constant 0 (sparse runs: box 0, full dimension 1)";
    return curve;
}

inline void append_union_panels(std::vector<FigurePanel>& panels, const std::string& stem,
                                const std::vector<std::pair<double, double>>& recipes,
                                bool with_run_set, const ThetaGrid& grid) {
    std::vector<SpectrumCurve> curves;
    double t_max = 0.0, box_max = 0.0;
    for (auto [t, lambda] : recipes) {
        curves.push_back(recipe_curve(t, lambda, grid));
        t_max = std::max(t_max, t);
        box_max = std::max(box_max, (t / lambda) * (lambda - 1.0));
    }
    if (with_run_set) {
        curves.push_back(run_set_curve(grid));
        t_max = 1.0;
    }
    const SpectrumCurve top = union_curves(curves);
    std::vector<Envelope> top_env;
    top_env.reserve(grid.points.size());
    for (double theta : grid.points)
        top_env.push_back({box_max, std::min(box_max / (1.0 - theta), t_max)});
    panels.push_back({stem + "_assouad", curve_to_csv(top, top_env)});

    const SpectrumCurve bottom = invert_curve(top);
    std::vector<Envelope> bottom_env(grid.points.size(), Envelope{1.0 - t_max, 1.0 - box_max});
    panels.push_back({stem + "_lower", curve_to_csv(bottom, bottom_env)});
}

} // namespace detail

inline std::vector<FigurePanel> emit_figure_data(const std::string& figure,
                                                 const ThetaGrid& grid) {
    grid.validate();
    std::vector<FigurePanel> panels;
    if (figure == "fig3") {
        detail::append_carpet_panels(panels, "fig3_left", detail::fig3_left_carpet(), grid);
        detail::append_carpet_panels(panels, "fig3_right", detail::fig3_right_carpet(), grid);
    } else if (figure == "fig4") {
        detail::append_overlap_panel(panels, "fig4_left", 0.7, 0.5, 0.6, grid);
        detail::append_overlap_panel(panels, "fig4_right", 0.3, 0.28, 0.3, grid);
    } else if (figure == "fig6") {
        detail::append_union_panels(panels, "fig6_p1",
                                    {{1.0, 1.1}, {0.7, 1.2}, {0.5, 1.5}, {0.3, 4.0}}, false, grid);
        detail::append_union_panels(panels, "fig6_p2", {{0.5, 2.0}}, true, grid);
        detail::append_union_panels(panels, "fig6_p3", {{0.7, 2.0}, {0.9, 1.5}}, true, grid);
    } else {
        throw std::invalid_argument("emit_figure_data: unknown figure " + figure);
    }
    return panels;
}

} // namespace dimspec
