// JSON schemas for every family's input specs, JSON/CSV emission for curves
// and dimension summaries, and atomic file writes. Parsing goes through
// nlohmann::json and throws its exceptions on malformed input; semantic
// checks reuse each type's validate(). Numbers serialize with enough digits
// to round-trip doubles exactly (CSV uses 12 significant digits).
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "carpet.hpp"
#include "moran.hpp"
#include "percolation.hpp"
#include "selfsimilar.hpp"
#include "spectrum.hpp"
#include "tail_density.hpp"

namespace dimspec {

using json = nlohmann::json;

inline std::string format_real(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

// ---- carpet ------------------------------------------------------------------

inline json carpet_to_json(const CarpetSpec& spec) {
    json rects = json::array();
    for (auto [i, j] : spec.rects) rects.push_back(json::array({i, j}));
    return json{{"m", spec.m}, {"n", spec.n}, {"rects", rects}};
}

inline CarpetSpec carpet_from_json(const json& payload) {
    CarpetSpec spec;
    spec.m = payload.at("m").get<int>();
    spec.n = payload.at("n").get<int>();
    spec.rects.clear();
    for (const auto& rect : payload.at("rects")) {
        if (!rect.is_array() || rect.size() != 2)
            throw std::invalid_argument("carpet rects must be [i, j] pairs");
        spec.rects.emplace_back(rect.at(0).get<int>(), rect.at(1).get<int>());
    }
    spec.validate();
    return spec;
}

// ---- similar ifs --------------------------------------------------------------

inline json ifs_to_json(const SimilarIFS& ifs) {
    json maps = json::array();
    for (const auto& map : ifs.maps) maps.push_back(json{{"r", map.r}, {"a", map.a}});
    return json{{"maps", maps}};
}

inline SimilarIFS ifs_from_json(const json& payload) {
    SimilarIFS ifs;
    for (const auto& map : payload.at("maps"))
        ifs.maps.push_back({map.at("r").get<double>(), map.at("a").get<double>()});
    ifs.validate();
    return ifs;
}

// ---- percolation ----------------------------------------------------------------

inline json percolation_to_json(const PercolationParams& params) {
    return json{{"n", params.n}, {"d", params.d}, {"p", params.p}};
}

inline PercolationParams percolation_from_json(const json& payload) {
    PercolationParams params;
    params.n = payload.at("n").get<int>();
    params.d = payload.at("d").get<int>();
    params.p = payload.at("p").get<double>();
    params.validate();
    return params;
}

// ---- moran ----------------------------------------------------------------------

// Payload shape: {"c": {"constant": x} | {"sequence": [...]},
//                 "N": {"constant": n} | {"sequence": [...]}
//                      | {"dyadic_set": [positions with N=2]}
//                      | {"recipe": {"t":, "lambda":, "f_base":}}}
// Constant/recipe generators materialize out to the supplied horizon.
inline MoranSpec moran_from_json(const json& payload, long horizon) {
    if (horizon < 1) throw std::invalid_argument("moran horizon must be >= 1");
    MoranSpec spec;
    const json& c = payload.at("c");
    if (c.contains("constant")) {
        const double value = c.at("constant").get<double>();
        spec.c.assign(static_cast<std::size_t>(horizon), value);
    } else {
        spec.c = c.at("sequence").get<std::vector<double>>();
    }
    double floor_value = 1.0;
    for (double value : spec.c) floor_value = std::min(floor_value, value);
    spec.c_floor = c.value("floor", floor_value);

    const json& branching = payload.at("N");
    if (branching.contains("constant")) {
        spec.branching.assign(static_cast<std::size_t>(horizon),
                              branching.at("constant").get<int>());
    } else if (branching.contains("sequence")) {
        spec.branching = branching.at("sequence").get<std::vector<int>>();
    } else if (branching.contains("dyadic_set")) {
        spec.branching.assign(static_cast<std::size_t>(horizon), 1);
        for (long position : branching.at("dyadic_set").get<std::vector<long>>()) {
            if (position < 1)
                throw std::invalid_argument("moran dyadic_set positions must be >= 1");
            if (position <= horizon)
                spec.branching[static_cast<std::size_t>(position - 1)] = 2;
        }
    } else if (branching.contains("recipe")) {
        const json& recipe = branching.at("recipe");
        const DyadicSequence seq =
            recipe_sequence(recipe.at("t").get<double>(), recipe.at("lambda").get<double>(),
                            horizon, recipe.value("f_base", 4L));
        spec.branching = seq.values;
    } else {
        throw std::invalid_argument("moran N needs constant, sequence, dyadic_set, or recipe");
    }
    spec.validate();
    return spec;
}

// ---- integer sets ------------------------------------------------------------------

inline json integer_set_to_json(const IntegerSet& set) {
    switch (set.kind) {
    case IntegerSet::Kind::explicit_list:
        return json{{"explicit", set.members}, {"horizon", set.declared_horizon}};
    case IntegerSet::Kind::periodic: {
        std::vector<long> residues;
        for (long r = 0; r < set.q; ++r)
            if (set.residue_mask[static_cast<std::size_t>(r)]) residues.push_back(r);
        return json{{"periodic", json{{"q", set.q}, {"residues", residues}}}};
    }
    case IntegerSet::Kind::blocks: {
        std::vector<long> residues;
        for (long r = 0; r < set.q; ++r)
            if (set.residue_mask[static_cast<std::size_t>(r)]) residues.push_back(r);
        json runs = json::array();
        for (const auto& run : set.runs)
            runs.push_back(json{{"start", run.start}, {"length", run.length}, {"member", run.member}});
        return json{{"blocks", json{{"q", set.q},
                                    {"residues", residues},
                                    {"runs", runs},
                                    {"horizon", set.declared_horizon}}}};
    }
    }
    throw std::logic_error("integer_set_to_json: unreachable");
}

inline IntegerSet integer_set_from_json(const json& payload) {
    if (payload.contains("explicit")) {
        std::vector<long> members = payload.at("explicit").get<std::vector<long>>();
        const long fallback = members.empty() ? 1 : members.back();
        return IntegerSet::from_members(std::move(members), payload.value("horizon", fallback));
    }
    if (payload.contains("periodic")) {
        const json& body = payload.at("periodic");
        return IntegerSet::periodic(body.at("q").get<long>(),
                                    body.at("residues").get<std::vector<long>>());
    }
    if (payload.contains("blocks")) {
        const json& body = payload.at("blocks");
        std::vector<IntegerSet::Run> runs;
        for (const auto& run : body.at("runs"))
            runs.push_back({run.at("start").get<long>(), run.at("length").get<long>(),
                            run.value("member", true)});
        return IntegerSet::blocks(body.at("q").get<long>(),
                                  body.at("residues").get<std::vector<long>>(), std::move(runs),
                                  body.at("horizon").get<long>());
    }
    throw std::invalid_argument("integer set needs explicit, periodic, or blocks");
}

// ---- curves and summaries ------------------------------------------------------------

inline json curve_to_json(const SpectrumCurve& curve) {
    curve.validate();
    return json{{"grid", curve.grid.points},
                {"values", curve.values},
                {"kind", to_string(curve.kind)},
                {"transitions", curve.transitions},
                {"closed_form", curve.closed_form},
                {"ambient_dim", curve.ambient_dim}};
}

inline SpectrumCurve curve_from_json(const json& payload) {
    SpectrumCurve curve;
    curve.grid.points = payload.at("grid").get<std::vector<double>>();
    curve.values = payload.at("values").get<std::vector<double>>();
    const std::string kind = payload.at("kind").get<std::string>();
    if (kind == "assouad")
        curve.kind = SpectrumKind::assouad;
    else if (kind == "lower")
        curve.kind = SpectrumKind::lower;
    else
        throw std::invalid_argument("curve kind must be assouad or lower");
    curve.transitions = payload.at("transitions").get<std::vector<double>>();
    curve.closed_form = payload.at("closed_form").get<std::string>();
    curve.ambient_dim = payload.value("ambient_dim", 1);
    curve.validate();
    return curve;
}

inline json summary_to_json(const DimensionSummary& summary) {
    json out{{"lower", summary.lower},
             {"lower_box", summary.lower_box},
             {"upper_box", summary.upper_box},
             {"assouad", summary.assouad},
             {"ambient_dim", summary.ambient_dim}};
    if (summary.hausdorff) out["hausdorff"] = *summary.hausdorff;
    if (summary.modified_lower) out["modified_lower"] = *summary.modified_lower;
    return out;
}

inline DimensionSummary summary_from_json(const json& payload) {
    DimensionSummary summary;
    summary.lower = payload.at("lower").get<double>();
    summary.lower_box = payload.at("lower_box").get<double>();
    summary.upper_box = payload.at("upper_box").get<double>();
    summary.assouad = payload.at("assouad").get<double>();
    summary.ambient_dim = payload.value("ambient_dim", 1);
    if (payload.contains("hausdorff")) summary.hausdorff = payload.at("hausdorff").get<double>();
    if (payload.contains("modified_lower"))
        summary.modified_lower = payload.at("modified_lower").get<double>();
    summary.validate();
    return summary;
}

// ---- csv ------------------------------------------------------------------------------

inline std::string curve_to_csv(const SpectrumCurve& curve) {
    curve.validate();
    std::ostringstream out;
    out << "theta,value\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        out << format_real(curve.grid.points[i]) << ',' << format_real(curve.values[i]) << '\n';
    return out.str();
}

inline std::string curve_to_csv(const SpectrumCurve& curve, const std::vector<Envelope>& envelopes) {
    curve.validate();
    if (envelopes.size() != curve.values.size())
        throw std::invalid_argument("curve_to_csv: envelope count mismatch");
    std::ostringstream out;
    out << "theta,value,envelope_lo,envelope_hi\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        out << format_real(curve.grid.points[i]) << ',' << format_real(curve.values[i]) << ','
            << format_real(envelopes[i].lo) << ',' << format_real(envelopes[i].hi) << '\n';
    return out.str();
}

// ---- files -----------------------------------------------------------------------------

inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed for " + temp.string());
    }
    std::filesystem::rename(temp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace dimspec
