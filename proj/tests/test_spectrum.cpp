// Core spectrum machinery: grids, envelopes, curve checking, the two-scale
// empirical estimator, transition detection, truncated limits, and the shared
// numeric helpers.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dimspec/carpet.hpp"
#include "dimspec/moran.hpp"
#include "dimspec/numeric.hpp"
#include "dimspec/spectrum.hpp"
#include "dimspec/truncated_limit.hpp"

using Catch::Approx;
using namespace dimspec;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

CarpetSpec small_carpet() {
    CarpetSpec spec;
    spec.m = 2;
    spec.n = 3;
    spec.rects = {{0, 0}, {0, 2}, {1, 1}};
    return spec;
}

} // namespace

// ---- grids -------------------------------------------------------------------

TEST_CASE("uniform grids are strictly increasing interior points", "[spectrum][grid]") {
    const ThetaGrid grid = ThetaGrid::uniform(9);
    REQUIRE(grid.size() == 9);
    REQUIRE(grid.points.front() == Approx(0.1));
    REQUIRE(grid.points.back() == Approx(0.9));
    REQUIRE_NOTHROW(grid.validate());

    SECTION("empty grid rejected") {
        REQUIRE_THROWS_AS(ThetaGrid{}.validate(), std::invalid_argument);
    }
    SECTION("endpoints rejected") {
        ThetaGrid bad;
        bad.points = {0.0, 0.5};
        REQUIRE_THROWS_AS(bad.validate(), std::domain_error);
    }
    SECTION("non-monotone grid rejected") {
        ThetaGrid bad;
        bad.points = {0.5, 0.5};
        REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}

// ---- dimension summaries -------------------------------------------------------

TEST_CASE("dimension summaries enforce the chain", "[spectrum][summary]") {
    DimensionSummary dims;
    dims.lower = 0.4;
    dims.lower_box = 0.5;
    dims.upper_box = 0.6;
    dims.assouad = 0.9;
    REQUIRE_NOTHROW(dims.validate());

    SECTION("chain violation") {
        dims.upper_box = 0.95;
        REQUIRE_THROWS_AS(dims.validate(), std::domain_error);
    }
    SECTION("value outside ambient range") {
        dims.assouad = 1.5;
        REQUIRE_THROWS_AS(dims.validate(), std::domain_error);
    }
}

// ---- envelopes ------------------------------------------------------------------

TEST_CASE("assouad envelope values", "[spectrum][envelope]") {
    DimensionSummary dims;
    dims.lower = 0.0;
    dims.lower_box = 0.6;
    dims.upper_box = 0.6;
    dims.assouad = 1.0;

    SECTION("cap clips at the assouad dimension") {
        const Envelope env = assouad_envelope(dims, 0.5);
        REQUIRE(env.lo == Approx(0.6));
        REQUIRE(env.hi == Approx(1.0));  // min(1.2, 1)
    }
    SECTION("cap below the assouad dimension") {
        dims.lower_box = dims.upper_box = 0.5;
        const Envelope env = assouad_envelope(dims, 0.25);
        REQUIRE(env.lo == Approx(0.5));
        REQUIRE(env.hi == Approx(0.5 / 0.75).margin(1e-12));
    }
    SECTION("degenerate point set") {
        DimensionSummary zero;
        const Envelope env = assouad_envelope(zero, 0.7);
        REQUIRE(env.lo == 0.0);
        REQUIRE(env.hi == 0.0);
    }
    SECTION("theta outside (0,1)") {
        REQUIRE_THROWS_AS(assouad_envelope(dims, 0.0), std::domain_error);
        REQUIRE_THROWS_AS(assouad_envelope(dims, 1.0), std::domain_error);
    }
}

TEST_CASE("lower envelope values", "[spectrum][envelope]") {
    DimensionSummary dims;
    dims.lower = 0.0;
    dims.lower_box = 0.5;
    dims.upper_box = 0.5;
    dims.assouad = 1.0;
    const Envelope env = lower_envelope(dims, 0.3);
    REQUIRE(env.lo == 0.0);
    REQUIRE(env.hi == 0.5);

    SECTION("collapsed envelope") {
        dims.lower = 0.3;
        dims.lower_box = 0.3;
        dims.upper_box = 0.3;
        dims.assouad = 0.3;
        const Envelope tight = lower_envelope(dims, 0.9);
        REQUIRE(tight.lo == Approx(0.3));
        REQUIRE(tight.hi == Approx(0.3));
    }
    SECTION("full-dimensional set") {
        DimensionSummary full;
        full.lower = full.lower_box = full.upper_box = full.assouad = 1.0;
        const Envelope one = lower_envelope(full, 0.5);
        REQUIRE(one.lo == 1.0);
        REQUIRE(one.hi == 1.0);
    }
}

// ---- curve checking ----------------------------------------------------------------

TEST_CASE("closed-form carpet curves pass their own envelope", "[spectrum][check]") {
    const CarpetSpec spec = small_carpet();
    const DimensionSummary dims = carpet_dimensions(spec);
    const ThetaGrid grid = ThetaGrid::uniform(499);

    SECTION("assouad curve, with continuity threshold") {
        const SpectrumCurve curve = assouad_curve(spec, grid);
        // steepest slope of the closed form is (inner - box)/(1-ratio)^2 ~ 1.13,
        // so 0.005 per 1/500 step is a safe continuity bound
        const CurveReport report = check_curve(curve, dims, 1e-9, 0.005);
        REQUIRE(report.pass());
    }
    SECTION("lower curve") {
        const SpectrumCurve curve = lower_curve(spec, grid);
        const CurveReport report = check_curve(curve, dims, 1e-9, 0.005);
        REQUIRE(report.pass());
    }
    SECTION("injected violation is reported once") {
        SpectrumCurve curve = assouad_curve(spec, grid);
        curve.values[100] = dims.assouad + 2e-6;
        const CurveReport report = check_curve(curve, dims, 1e-9);
        REQUIRE(report.entries.size() == 1);
        REQUIRE(report.entries[0].index == 100);
        REQUIRE_FALSE(report.entries[0].jump);
        REQUIRE(report.entries[0].excess > 1e-9);
    }
    SECTION("constant curve with collapsed summary") {
        DimensionSummary flat;
        flat.lower = flat.lower_box = flat.upper_box = flat.assouad = 0.7;
        const SpectrumCurve curve =
            sample_curve(grid, SpectrumKind::assouad, 1, [](double) { return 0.7; });
        REQUIRE(check_curve(curve, flat, 1e-9, 1e-12).pass());
    }
    SECTION("jump detection") {
        DimensionSummary flat;
        flat.lower = 0.2;
        flat.lower_box = flat.upper_box = 0.5;
        flat.assouad = 0.9;
        SpectrumCurve curve =
            sample_curve(grid, SpectrumKind::assouad, 1, [](double) { return 0.5; });
        curve.values[250] = 0.55;  // inside the envelope, but a discontinuity
        const CurveReport report = check_curve(curve, flat, 1e-9, 0.01);
        REQUIRE(report.entries.size() == 2);
        REQUIRE(report.entries[0].jump);
        REQUIRE(report.entries[1].jump);
    }
}

TEST_CASE("curve validation rejects malformed data", "[spectrum][check]") {
    SpectrumCurve curve;
    curve.grid = ThetaGrid::uniform(3);
    curve.values = {0.5, 0.5};
    REQUIRE_THROWS_AS(curve.validate(), std::invalid_argument);
    curve.values = {0.5, 0.5, 1.5};
    REQUIRE_THROWS_AS(curve.validate(), std::domain_error);  // above ambient_dim = 1
    curve.ambient_dim = 2;
    REQUIRE_NOTHROW(curve.validate());
}

// ---- empirical estimator --------------------------------------------------------------

TEST_CASE("empirical estimator recovers exact power laws", "[spectrum][empirical]") {
    const std::vector<double> scales = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128,
                                        1.0 / 256, 1.0 / 512, 1.0 / 1024};
    const std::vector<int> centers = {0};

    SECTION("filled square scales with exponent 2") {
        auto oracle = [](int, double R, double r) { return std::pow(R / r, 2.0); };
        const EmpiricalSpectrum est = empirical_spectrum(oracle, 0.5, scales, centers);
        REQUIRE(est.slope == Approx(2.0).margin(1e-9));
        REQUIRE(est.last_window_max == Approx(2.0).margin(1e-9));
        REQUIRE(est.per_scale.size() == scales.size());
    }
    SECTION("single point scales with exponent 0") {
        auto oracle = [](int, double, double) { return 1.0; };
        const EmpiricalSpectrum est = empirical_spectrum(oracle, 0.4, scales, centers);
        REQUIRE(est.slope == Approx(0.0).margin(1e-12));
    }
    SECTION("slope is invariant under rescaling all R") {
        auto oracle = [](int, double R, double r) { return std::pow(R / r, 1.5); };
        std::vector<double> shifted = scales;
        for (double& s : shifted) s *= 0.7;
        const double a = empirical_spectrum(oracle, 0.3, scales, centers).slope;
        const double b = empirical_spectrum(oracle, 0.3, shifted, centers).slope;
        REQUIRE(a == Approx(b).margin(1e-9));
    }
    SECTION("count maximized over centers") {
        auto oracle = [](int c, double R, double r) { return std::pow(R / r, c == 1 ? 1.5 : 1.0); };
        const std::vector<int> two = {0, 1};
        const EmpiricalSpectrum est = empirical_spectrum(oracle, 0.5, scales, two);
        REQUIRE(est.slope == Approx(1.5).margin(1e-9));
    }
}

TEST_CASE("empirical estimator rejects bad inputs", "[spectrum][empirical]") {
    auto oracle = [](int, double R, double r) { return R / r; };
    const std::vector<int> centers = {0};
    REQUIRE_THROWS_AS(empirical_spectrum(oracle, 0.5, {0.25}, centers), insufficient_data_error);
    REQUIRE_THROWS_AS(empirical_spectrum(oracle, 0.5, {0.25, 0.25}, centers),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(empirical_spectrum(oracle, 0.5, {0.25, 0.5}, centers),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(empirical_spectrum(oracle, 1.0, {0.25, 0.125}, centers), std::domain_error);
    REQUIRE_THROWS_AS(empirical_spectrum(oracle, 0.5, {0.25, 0.125}, std::vector<int>{}),
                      insufficient_data_error);
    auto zero_oracle = [](int, double, double) { return 0.0; };
    REQUIRE_THROWS_AS(empirical_spectrum(zero_oracle, 0.5, {0.25, 0.125}, centers), oracle_error);
}

// ---- transition detection ----------------------------------------------------------------

TEST_CASE("transition detection finds the single carpet kink", "[spectrum][transitions]") {
    const CarpetSpec spec = small_carpet();
    const ThetaGrid grid = ThetaGrid::uniform(2000);
    const SpectrumCurve curve = assouad_curve(spec, grid);
    const std::vector<double> hits = detect_transitions(curve, 1, 0.05);
    REQUIRE(hits.size() == 1);
    const double step = 1.0 / 2001.0;
    REQUIRE(std::fabs(hits[0] - kLog2 / kLog3) <= step * (1.0 + 1e-9));
}

TEST_CASE("transition detection on flat and recipe curves", "[spectrum][transitions]") {
    const ThetaGrid grid = ThetaGrid::uniform(999);

    SECTION("constant curve has no transitions") {
        const SpectrumCurve curve =
            sample_curve(grid, SpectrumKind::assouad, 1, [](double) { return 0.3; });
        REQUIRE(detect_transitions(curve, 1, 0.05).empty());
    }
    SECTION("block-recipe curve bends at the reciprocal growth factor") {
        const SpectrumCurve curve = recipe_curve(0.5, 2.0, grid);
        const std::vector<double> hits = detect_transitions(curve, 1, 0.05);
        REQUIRE(hits.size() == 1);
        REQUIRE(hits[0] == Approx(0.5).margin(1.0 / 1000.0 + 1e-12));
    }
    SECTION("window must be positive") {
        const SpectrumCurve curve = recipe_curve(0.5, 2.0, grid);
        REQUIRE_THROWS_AS(detect_transitions(curve, 0, 0.05), std::invalid_argument);
    }
}

// ---- curve algebra --------------------------------------------------------------------------

TEST_CASE("union of curves takes the pointwise extremum", "[spectrum][union]") {
    const ThetaGrid grid = ThetaGrid::uniform(49);
    const SpectrumCurve a = recipe_curve(0.5, 2.0, grid);
    const SpectrumCurve flat =
        sample_curve(grid, SpectrumKind::assouad, 1, [](double) { return 0.0; });

    SECTION("max identity with the zero curve") {
        const SpectrumCurve u = union_curves({a, flat});
        for (std::size_t i = 0; i < u.values.size(); ++i)
            REQUIRE(u.values[i] == Approx(a.values[i]).margin(1e-15));
        REQUIRE(u.transitions == a.transitions);
    }
    SECTION("single curve is unchanged") {
        const SpectrumCurve u = union_curves({a});
        REQUIRE(u.values == a.values);
    }
    SECTION("lower kind takes the minimum") {
        const SpectrumCurve la = invert_curve(a);
        const SpectrumCurve lb = invert_curve(recipe_curve(0.3, 4.0, grid));
        const SpectrumCurve u = union_curves({la, lb});
        for (std::size_t i = 0; i < u.values.size(); ++i)
            REQUIRE(u.values[i] == Approx(std::min(la.values[i], lb.values[i])).margin(1e-15));
    }
    SECTION("mixed kinds rejected") {
        REQUIRE_THROWS_AS(union_curves({a, invert_curve(a)}), std::invalid_argument);
    }
    SECTION("grid mismatch rejected") {
        const SpectrumCurve other = recipe_curve(0.5, 2.0, ThetaGrid::uniform(50));
        REQUIRE_THROWS_AS(union_curves({a, other}), std::invalid_argument);
        REQUIRE_THROWS_AS(union_curves({}), std::invalid_argument);
    }
}

// ---- truncated limits ------------------------------------------------------------------------

TEST_CASE("truncated limits expose tail and global extrema", "[spectrum][truncated]") {
    std::vector<std::pair<long, double>> parts;
    for (long k = 1; k <= 10; ++k)
        parts.emplace_back(k, k <= 5 ? 5.0 : static_cast<double>(k));
    const TruncatedLimit lim = TruncatedLimit::from_partials(parts, 0.2);
    REQUIRE(lim.tail_begin == 9);
    REQUIRE(lim.sup_tail == Approx(10.0));
    REQUIRE(lim.inf_tail == Approx(9.0));
    REQUIRE(lim.sup_all == Approx(10.0));
    REQUIRE(lim.inf_all == Approx(5.0));
    REQUIRE_FALSE(lim.exact_limit.has_value());

    SECTION("bad inputs") {
        REQUIRE_THROWS_AS(TruncatedLimit::from_partials({}), std::invalid_argument);
        REQUIRE_THROWS_AS(TruncatedLimit::from_partials(parts, 0.0), std::domain_error);
        REQUIRE_THROWS_AS(TruncatedLimit::from_partials(parts, 1.5), std::domain_error);
    }
    SECTION("full-window fraction covers everything") {
        const TruncatedLimit full = TruncatedLimit::from_partials(parts, 1.0);
        REQUIRE(full.sup_tail == full.sup_all);
        REQUIRE(full.inf_tail == full.inf_all);
    }
}

// ---- numeric helpers ---------------------------------------------------------------------------

TEST_CASE("keyed randomness is deterministic and key-sensitive", "[numeric]") {
    REQUIRE(splitmix64(42) == splitmix64(42));
    REQUIRE(splitmix64(42) != splitmix64(43));
    REQUIRE(key_combine(1, 2) != key_combine(1, 3));
    REQUIRE(key_combine(1, 2) != key_combine(2, 1));
    const double u = unit_double(splitmix64(7));
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);

    KeyedStream a(9), b(9);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
    KeyedStream c(9);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t below = c.next_below(17);
        REQUIRE(below < 17);
    }
}

TEST_CASE("integer powers and overflow guard", "[numeric]") {
    REQUIRE(ipow(3, 4) == 81);
    REQUIRE(ipow(2, 0) == 1);
    REQUIRE(ipow(2, 61) == (std::int64_t{1} << 61));
    REQUIRE_THROWS_AS(ipow(2, 63), resource_error);
    REQUIRE_THROWS_AS(ipow(-2, 3), std::domain_error);
}

TEST_CASE("least squares recovers exact lines", "[numeric]") {
    const std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    const LineFit fit = linear_fit(x, y);
    REQUIRE(fit.slope == Approx(2.5).margin(1e-12));
    REQUIRE(fit.intercept == Approx(-1.0).margin(1e-12));

    REQUIRE_THROWS_AS(linear_fit({1.0}, {1.0}), insufficient_data_error);
    REQUIRE_THROWS_AS(linear_fit({1.0, 1.0}, {1.0, 2.0}), insufficient_data_error);
    REQUIRE_THROWS_AS(linear_fit({1.0, 2.0}, {1.0}), std::invalid_argument);

    REQUIRE(sample_stddev({3.0}) == 0.0);
    REQUIRE(sample_stddev({1.0, 3.0}) == Approx(std::sqrt(2.0)).margin(1e-12));
}
