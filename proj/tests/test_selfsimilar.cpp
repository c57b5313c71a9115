// Self-similar sets on the line: pressure and its zero, stopping sets with
// their Gibbs masses, the empirical local-dimension floor, the overlap bound
// for the Assouad spectrum, and the separation-condition collapse.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "dimspec/numeric.hpp"
#include "dimspec/selfsimilar.hpp"

using Catch::Approx;
using namespace dimspec;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

SimilarIFS thirds() {
    SimilarIFS ifs;
    ifs.maps = {{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}};
    return ifs;
}

SimilarIFS halves_asymmetric() {
    SimilarIFS ifs;
    ifs.maps = {{0.5, 0.0}, {0.25, 0.75}};
    return ifs;
}

SimilarIFS overlapping_pair() {
    SimilarIFS ifs;
    ifs.maps = {{0.5, 0.0}, {0.3, 0.6}};
    return ifs;
}

// two maps on top of each other force mass doubling along the left branch
SimilarIFS exact_overlap() {
    SimilarIFS ifs;
    ifs.maps = {{0.5, 0.0}, {0.5, 0.0}, {0.3, 0.7}};
    return ifs;
}

} // namespace

// ---- systems and cylinders ------------------------------------------------------

TEST_CASE("ifs validation", "[selfsimilar][spec]") {
    SimilarIFS ifs = thirds();
    REQUIRE_NOTHROW(ifs.validate());

    SECTION("too few maps") {
        ifs.maps.resize(1);
        REQUIRE_THROWS_AS(ifs.validate(), std::invalid_argument);
    }
    SECTION("ratio out of range") {
        ifs.maps[0].r = 1.0;
        REQUIRE_THROWS_AS(ifs.validate(), std::domain_error);
    }
    SECTION("map leaves the unit interval") {
        ifs.maps[1].a = 0.8;
        REQUIRE_THROWS_AS(ifs.validate(), std::domain_error);
    }
}

TEST_CASE("cylinder intervals compose first letter outermost", "[selfsimilar][spec]") {
    const SimilarIFS ifs = thirds();
    const auto [lo, hi] = cylinder_interval(ifs, {1, 0});
    REQUIRE(lo == Approx(2.0 / 3).margin(1e-15));
    REQUIRE(hi == Approx(2.0 / 3 + 1.0 / 9).margin(1e-15));

    const auto [full_lo, full_hi] = cylinder_interval(ifs, {});
    REQUIRE(full_lo == 0.0);
    REQUIRE(full_hi == 1.0);

    REQUIRE_THROWS_AS(cylinder_interval(ifs, {2}), std::invalid_argument);
}

// ---- pressure and its zero --------------------------------------------------------

TEST_CASE("pressure values and monotonicity", "[selfsimilar][pressure]") {
    const SimilarIFS ifs = thirds();
    REQUIRE(pressure(ifs, 0.0) == Approx(kLog2).margin(1e-15));
    REQUIRE(pressure(ifs, kLog2 / kLog3) == Approx(0.0).margin(1e-14));
    REQUIRE(pressure(ifs, 0.3) > pressure(ifs, 0.5));

    SimilarIFS three;
    three.maps = {{0.5, 0.0}, {0.25, 0.5}, {0.25, 0.75}};
    REQUIRE(pressure(three, 1.0) == Approx(0.0).margin(1e-15));

    REQUIRE_THROWS_AS(pressure(ifs, -0.1), std::domain_error);
}

TEST_CASE("similarity exponent solves the pressure equation", "[selfsimilar][pressure]") {
    SECTION("two thirds maps") {
        const double s = similarity_exponent(thirds());
        REQUIRE(s == Approx(kLog2 / kLog3).margin(1e-10));
    }
    SECTION("ratios summing to one give exponent one") {
        SimilarIFS ifs;
        ifs.maps = {{0.5, 0.0}, {0.3, 0.5}, {0.2, 0.8}};
        REQUIRE(similarity_exponent(ifs) == Approx(1.0).margin(1e-10));
    }
    SECTION("five fifths fill the interval") {
        SimilarIFS ifs;
        for (int i = 0; i < 5; ++i) ifs.maps.push_back({0.2, 0.2 * i});
        REQUIRE(similarity_exponent(ifs) == Approx(1.0).margin(1e-10));
    }
    SECTION("asymmetric ratios verified by substitution") {
        const double s = similarity_exponent(overlapping_pair());
        REQUIRE(std::fabs(pressure(overlapping_pair(), s)) < 1e-12);
        REQUIRE(s == Approx(0.74996).margin(2e-4));
    }
    SECTION("tolerance must be positive") {
        REQUIRE_THROWS_AS(similarity_exponent(thirds(), 0.0), std::domain_error);
    }
}

// ---- stopping sets ------------------------------------------------------------------

TEST_CASE("stopping sets cut words at the first drop below delta", "[selfsimilar][stopping]") {
    SECTION("uniform halves") {
        SimilarIFS ifs;
        ifs.maps = {{0.5, 0.0}, {0.5, 0.5}};
        const StoppingSet stops = stopping_set(ifs, 0.25);
        REQUIRE(stops.entries.size() == 4);
        for (const auto& entry : stops.entries) {
            REQUIRE(entry.word.size() == 2);
            REQUIRE(entry.lip == Approx(0.25).margin(1e-15));
        }
    }
    SECTION("mixed ratios stop at different depths") {
        const StoppingSet stops = stopping_set(halves_asymmetric(), 0.25);
        REQUIRE(stops.entries.size() == 3);
        REQUIRE(stops.entries[0].word == std::vector<int>{0, 0});
        REQUIRE(stops.entries[0].lip == Approx(0.25).margin(1e-15));
        REQUIRE(stops.entries[1].word == std::vector<int>{0, 1});
        REQUIRE(stops.entries[1].lip == Approx(0.125).margin(1e-15));
        REQUIRE(stops.entries[2].word == std::vector<int>{1});
        REQUIRE(stops.entries[2].lip == Approx(0.25).margin(1e-15));
    }
    SECTION("delta at or above every ratio stops at length one") {
        const StoppingSet stops = stopping_set(thirds(), 0.5);
        REQUIRE(stops.entries.size() == 2);
        for (const auto& entry : stops.entries) REQUIRE(entry.word.size() == 1);
    }
    SECTION("delta range and word cap") {
        REQUIRE_THROWS_AS(stopping_set(thirds(), 0.0), std::domain_error);
        REQUIRE_THROWS_AS(stopping_set(thirds(), 1.0), std::domain_error);
        StoppingOptions opts;
        opts.max_words = 10;
        REQUIRE_THROWS_AS(stopping_set(thirds(), 1e-3, opts), resource_error);
    }
}

TEST_CASE("stopping sets tile the word space", "[selfsimilar][stopping]") {
    const SimilarIFS ifs = overlapping_pair();
    const double s = similarity_exponent(ifs);
    const double delta = 1e-4;
    const StoppingSet stops = stopping_set(ifs, delta);

    SECTION("lipschitz window") {
        for (const auto& entry : stops.entries) {
            REQUIRE(entry.lip <= delta);
            REQUIRE(entry.lip > delta * ifs.min_ratio());
        }
    }
    SECTION("gibbs masses sum to one") {
        double mass = 0.0;
        for (const auto& entry : stops.entries) mass += gibbs_mass(ifs, s, entry.word);
        REQUIRE(mass == Approx(1.0).margin(1e-9));
    }
    SECTION("prefix-free") {
        std::vector<std::vector<int>> words;
        for (const auto& entry : stops.entries) words.push_back(entry.word);
        std::sort(words.begin(), words.end());
        for (std::size_t i = 1; i < words.size(); ++i) {
            const auto& a = words[i - 1];
            const auto& b = words[i];
            const bool prefix =
                a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
            REQUIRE_FALSE(prefix);
        }
    }
    SECTION("every infinite word has exactly one stopping prefix") {
        std::set<std::vector<int>> lookup;
        for (const auto& entry : stops.entries) lookup.insert(entry.word);
        KeyedStream rng(99);
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<int> word;
            double lip = 1.0;
            while (lip > delta) {
                const int letter = static_cast<int>(rng.next_below(ifs.maps.size()));
                word.push_back(letter);
                lip *= ifs.maps[static_cast<std::size_t>(letter)].r;
            }
            REQUIRE(lookup.count(word) == 1);
        }
    }
    SECTION("word count scales like delta^{-s}") {
        for (double d : {1e-2, 1e-3, 1e-4}) {
            const double count = static_cast<double>(stopping_set(ifs, d).entries.size());
            const double normalized = count * std::pow(d, s);
            REQUIRE(normalized >= 1.0);
            REQUIRE(normalized < std::pow(ifs.min_ratio(), -s));
        }
    }
}

TEST_CASE("gibbs masses multiply along words", "[selfsimilar][stopping]") {
    const SimilarIFS ifs = thirds();
    const double s = kLog2 / kLog3;
    REQUIRE(gibbs_mass(ifs, s, {}) == 1.0);
    for (int k = 1; k <= 10; ++k) {
        const std::vector<int> word(static_cast<std::size_t>(k), 0);
        REQUIRE(gibbs_mass(ifs, s, word) == Approx(std::pow(0.5, k)).margin(1e-12));
    }
    REQUIRE_THROWS_AS(gibbs_mass(ifs, s, {5}), std::invalid_argument);
    REQUIRE_THROWS_AS(gibbs_mass(ifs, -1.0, {0}), std::domain_error);
}

// ---- empirical local-dimension floor ---------------------------------------------------

TEST_CASE("local-dimension floor under strong separation", "[selfsimilar][estimate]") {
    const SimilarIFS ifs = thirds();
    const double s = similarity_exponent(ifs);
    std::vector<double> radii;
    for (int k = 4; k <= 14; ++k) radii.push_back(std::pow(2.0, -k));
    const double t = estimate_t(ifs, s, radii, 12, 7);
    REQUIRE(t == Approx(s).margin(0.05));
}

TEST_CASE("exact overlaps pull the floor below the exponent", "[selfsimilar][estimate]") {
    const SimilarIFS ifs = exact_overlap();
    const double s = similarity_exponent(ifs);
    REQUIRE(s > 1.0);
    std::vector<double> radii;
    for (int k = 3; k <= 8; ++k) radii.push_back(std::pow(2.0, -k));
    const double t = estimate_t(ifs, s, radii, 8, 5);
    REQUIRE(t < s - 0.1);
}

TEST_CASE("floor estimator edge cases", "[selfsimilar][estimate]") {
    const SimilarIFS ifs = thirds();
    const double s = kLog2 / kLog3;

    SECTION("single radius falls back to a chord") {
        const double t = estimate_t(ifs, s, {0.1}, 4, 3);
        REQUIRE(std::isfinite(t));
        REQUIRE(t >= 0.0);
    }
    SECTION("input validation") {
        REQUIRE_THROWS_AS(estimate_t(ifs, s, {}, 4, 3), std::invalid_argument);
        REQUIRE_THROWS_AS(estimate_t(ifs, s, {0.1, 0.2}, 4, 3), std::invalid_argument);
        REQUIRE_THROWS_AS(estimate_t(ifs, s, {0.1, 0.05}, 0, 3), std::invalid_argument);
    }
    SECTION("deterministic in the seed") {
        std::vector<double> radii = {1.0 / 8, 1.0 / 16, 1.0 / 32};
        REQUIRE(estimate_t(ifs, s, radii, 6, 11) == estimate_t(ifs, s, radii, 6, 11));
    }
}

// ---- overlap bound -----------------------------------------------------------------------

TEST_CASE("overlap bound values", "[selfsimilar][overlap]") {
    SECTION("interpolating case") {
        OverlapBoundParams params{0.7, 0.5, 0.6};
        REQUIRE(overlap_spectrum_bound(params, 0.4) == Approx(0.5 / 0.6).margin(1e-12));
        REQUIRE(overlap_bound_raw(0.7, 0.5, 0.4) == Approx(0.8333333333333334).margin(1e-12));
    }
    SECTION("nearly matched exponent and floor") {
        OverlapBoundParams params{0.3, 0.28, 0.3};
        REQUIRE(overlap_spectrum_bound(params, 0.1) == Approx(0.3022222222222222).margin(1e-12));
    }
    SECTION("floor equal to the exponent freezes the bound") {
        OverlapBoundParams params{0.5, 0.5, 0.5};
        for (double theta : {0.1, 0.5, 0.9})
            REQUIRE(overlap_spectrum_bound(params, theta) == Approx(0.5).margin(1e-12));
    }
    SECTION("ambient clip") {
        OverlapBoundParams params{1.3, 0.9, 1.0};
        REQUIRE(overlap_spectrum_bound(params, 0.9) == Approx(1.0).margin(1e-12));
    }
    SECTION("raw bound is anchored at s and grows when t < s") {
        REQUIRE(overlap_bound_raw(0.7, 0.5, 1e-8) == Approx(0.7).margin(1e-7));
        REQUIRE(overlap_bound_raw(0.7, 0.5, 0.8) > overlap_bound_raw(0.7, 0.5, 0.2));
        REQUIRE_THROWS_AS(overlap_bound_raw(0.7, 0.5, 0.0), std::domain_error);
    }
    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(overlap_spectrum_bound({0.7, 0.65, 0.6}, 0.5), std::domain_error);
        REQUIRE_THROWS_AS(overlap_spectrum_bound({0.5, 0.3, 0.6}, 0.5), std::domain_error);
    }
}

TEST_CASE("improvement region endpoints", "[selfsimilar][overlap]") {
    SECTION("interpolating case") {
        const auto region = improvement_region({0.7, 0.5, 0.6});
        REQUIRE(region.has_value());
        REQUIRE(region->first == Approx(0.2).margin(1e-12));
        REQUIRE(region->second == Approx(0.6).margin(1e-12));
    }
    SECTION("nearly matched case improves almost everywhere") {
        const auto region = improvement_region({0.3, 0.28, 0.3});
        REQUIRE(region.has_value());
        REQUIRE(region->first == Approx(0.0).margin(1e-12));
        REQUIRE(region->second == Approx(0.7 / 0.72).margin(1e-12));
    }
    SECTION("weak floor improves nowhere") {
        REQUIRE_FALSE(improvement_region({0.7, 0.2, 0.6}).has_value());
        REQUIRE_FALSE(improvement_region({0.7, 0.0, 0.6}).has_value());
    }
}

// ---- separation-condition collapse ----------------------------------------------------------

TEST_CASE("separation hypotheses freeze the spectrum", "[selfsimilar][wsp]") {
    const ThetaGrid grid = ThetaGrid::uniform(19);
    const double box = kLog2 / kLog3;

    SECTION("weak separation") {
        WspFlags flags;
        flags.weak_separation = true;
        const SpectrumCurve curve = wsp_spectrum(grid, box, flags);
        for (double v : curve.values) REQUIRE(v == Approx(box).margin(1e-15));
        REQUIRE(curve.closed_form.find("= dim_A") != std::string::npos);
        REQUIRE(curve.transitions.empty());
    }
    SECTION("concentration hypothesis alone") {
        WspFlags flags;
        flags.no_superexp_concentration = true;
        const SpectrumCurve curve = wsp_spectrum(grid, box, flags);
        for (double v : curve.values) REQUIRE(v == Approx(box).margin(1e-15));
        REQUIRE(curve.closed_form.find("concentration") != std::string::npos);
    }
    SECTION("at least one hypothesis required") {
        REQUIRE_THROWS_AS(wsp_spectrum(grid, box, {}), std::invalid_argument);
    }
    SECTION("box dimension range") {
        WspFlags flags;
        flags.weak_separation = true;
        REQUIRE_THROWS_AS(wsp_spectrum(grid, 1.2, flags), std::domain_error);
    }
}
