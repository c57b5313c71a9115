// Command-line driver. Subcommands compute dimension spectra for the
// supported constructions and write JSON/CSV reports; verify cross-checks
// closed forms against the independent numerical estimators.
//
// Exit codes: 0 success, 2 bad input or configuration, 3 resource or
// extinction limits, 4 verification failure or broken oracle contract.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dimspec/carpet.hpp"
#include "dimspec/figures.hpp"
#include "dimspec/moran.hpp"
#include "dimspec/percolation.hpp"
#include "dimspec/selfsimilar.hpp"
#include "dimspec/serialize.hpp"
#include "dimspec/tail_density.hpp"

using namespace dimspec;
namespace fs = std::filesystem;

namespace {

json parse_config(const std::string& path) { return json::parse(read_text(path)); }

void write_json_file(const fs::path& path, const json& payload) {
    atomic_write_text(path, payload.dump(2) + "\n");
}

std::vector<Envelope> envelopes_for(const SpectrumCurve& curve, const DimensionSummary& dims) {
    std::vector<Envelope> envelopes;
    envelopes.reserve(curve.grid.size());
    for (double theta : curve.grid.points)
        envelopes.push_back(curve.kind == SpectrumKind::assouad ? assouad_envelope(dims, theta)
                                                                : lower_envelope(dims, theta));
    return envelopes;
}

// ---- carpet ------------------------------------------------------------------

void run_carpet(const std::string& config_path, const std::string& out_dir, std::size_t grid_n) {
    const CarpetSpec spec = carpet_from_json(parse_config(config_path));
    const ThetaGrid grid = ThetaGrid::uniform(grid_n);
    const DimensionSummary dims = carpet_dimensions(spec);
    const SpectrumCurve upper = assouad_curve(spec, grid);
    const SpectrumCurve lower = lower_curve(spec, grid);

    const fs::path dir(out_dir);
    write_json_file(dir / "dims.json", summary_to_json(dims));
    atomic_write_text(dir / "assouad.csv", curve_to_csv(upper, envelopes_for(upper, dims)));
    write_json_file(dir / "assouad.json", curve_to_json(upper));
    atomic_write_text(dir / "lower.csv", curve_to_csv(lower, envelopes_for(lower, dims)));
    write_json_file(dir / "lower.json", curve_to_json(lower));
    std::printf("carpet %dx%d: lower %s, box %s..%s, assouad %s\n", spec.m, spec.n,
                format_real(dims.lower).c_str(), format_real(dims.lower_box).c_str(),
                format_real(dims.upper_box).c_str(), format_real(dims.assouad).c_str());
    std::printf("wrote dims.json, assouad.{csv,json}, lower.{csv,json} to %s\n", out_dir.c_str());
}

// ---- ifs ---------------------------------------------------------------------

void run_ifs(const std::string& config_path, const std::string& out_dir, std::size_t grid_n,
             const std::string& t_mode, double box_override, int samples,
             const std::string& assert_mode) {
    const SimilarIFS ifs = ifs_from_json(parse_config(config_path));
    const double s = similarity_exponent(ifs);
    const double box = box_override >= 0.0 ? box_override : std::min(s, 1.0);
    const ThetaGrid grid = ThetaGrid::uniform(grid_n);
    const fs::path dir(out_dir);

    if (!assert_mode.empty()) {
        WspFlags flags;
        if (assert_mode == "wsp")
            flags.weak_separation = true;
        else if (assert_mode == "no-sec")
            flags.no_superexp_concentration = true;
        else
            throw std::invalid_argument("--assert must be 'wsp' or 'no-sec'");
        const SpectrumCurve curve = wsp_spectrum(grid, box, flags);
        write_json_file(dir / "report.json",
                        json{{"s", s}, {"upper_box", box}, {"mode", assert_mode}});
        atomic_write_text(dir / "wsp.csv", curve_to_csv(curve));
        write_json_file(dir / "wsp.json", curve_to_json(curve));
        std::printf("constant spectrum %s under '%s'; wrote report.json, wsp.{csv,json} to %s\n",
                    format_real(box).c_str(), assert_mode.c_str(), out_dir.c_str());
        return;
    }

    double t = 0.0;
    if (t_mode == "estimate") {
        std::vector<double> radii;
        for (int k = 3; k <= 9; ++k) radii.push_back(std::pow(2.0, -k));
        t = estimate_t(ifs, s, radii, samples, 1234);
    } else {
        std::size_t pos = 0;
        t = std::stod(t_mode, &pos);
        if (pos != t_mode.size())
            throw std::invalid_argument("--t must be a real number or 'estimate'");
    }

    OverlapBoundParams params;
    params.s = s;
    params.t = t;
    params.upper_box = box;
    params.validate();
    SpectrumCurve curve = sample_curve(grid, SpectrumKind::assouad, 1, [&](double theta) {
        return overlap_spectrum_bound(params, theta);
    });
    curve.closed_form = "min((s - t*theta)/(1 - theta), box/(1 - theta), 1)";
    std::vector<Envelope> envelopes;
    envelopes.reserve(grid.size());
    for (double theta : grid.points)
        envelopes.push_back({box, std::min(box / (1.0 - theta), 1.0)});

    json report{{"s", s}, {"t", t}, {"upper_box", box}};
    const auto region = improvement_region(params);
    report["improvement"] =
        region ? json{{"lo", region->first}, {"hi", region->second}} : json(nullptr);
    write_json_file(dir / "report.json", report);
    atomic_write_text(dir / "bound.csv", curve_to_csv(curve, envelopes));
    write_json_file(dir / "bound.json", curve_to_json(curve));
    std::printf("s %s, t %s, box %s; wrote report.json, bound.{csv,json} to %s\n",
                format_real(s).c_str(), format_real(t).c_str(), format_real(box).c_str(),
                out_dir.c_str());
}

// ---- percolation ---------------------------------------------------------------

void run_percolation(const std::string& config_path, const std::string& out_dir, double theta,
                     int depth, int trials, std::uint64_t seed) {
    const PercolationParams params = percolation_from_json(parse_config(config_path));
    const double box = box_dimension(params);
    const McEstimate est = empirical_spectrum_mc(params, theta, depth, trials, seed);
    const json result{{"n", params.n},
                      {"d", params.d},
                      {"p", params.p},
                      {"theta", theta},
                      {"depth", depth},
                      {"trials", trials},
                      {"seed", seed},
                      {"box_dimension", box},
                      {"estimate", est.value},
                      {"spread", est.spread},
                      {"survival_fraction", est.survival_fraction},
                      {"s_level", est.s_level}};
    write_json_file(fs::path(out_dir) / "result.json", result);
    std::printf("estimate %s (box %s, survival %s); wrote result.json to %s\n",
                format_real(est.value).c_str(), format_real(box).c_str(),
                format_real(est.survival_fraction).c_str(), out_dir.c_str());
}

// ---- moran ---------------------------------------------------------------------

void run_moran(const std::string& config_path, const std::string& out_dir, long K,
               std::size_t grid_n, double tail_fraction) {
    const json payload = parse_config(config_path);
    const ThetaGrid grid = ThetaGrid::uniform(grid_n);

    long horizon = static_cast<long>(std::ceil(static_cast<double>(K) / grid.points.front())) + 8;
    if (payload.contains("c") && payload.at("c").contains("sequence"))
        horizon = static_cast<long>(payload.at("c").at("sequence").size());
    else if (payload.contains("N") && payload.at("N").contains("sequence"))
        horizon = static_cast<long>(payload.at("N").at("sequence").size());

    const MoranSpec spec = moran_from_json(payload, horizon);
    const std::vector<std::string> warnings = feasibility_warnings(spec);

    std::vector<double> upper, lower;
    upper.reserve(grid.size());
    lower.reserve(grid.size());
    double all_sup = -std::numeric_limits<double>::infinity();
    double all_inf = std::numeric_limits<double>::infinity();
    for (double theta : grid.points) {
        const TruncatedLimit a = assouad_spectrum_trunc(spec, theta, K, tail_fraction);
        const TruncatedLimit l = lower_spectrum_trunc(spec, theta, K, tail_fraction);
        upper.push_back(a.sup_tail);
        lower.push_back(l.inf_tail);
        all_sup = std::max(all_sup, a.sup_all);
        all_inf = std::min(all_inf, l.inf_all);
    }

    std::string csv = "theta,assouad,lower\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv += format_real(grid.points[i]) + "," + format_real(upper[i]) + "," +
               format_real(lower[i]) + "\n";

    const json result{{"grid", grid.points},       {"assouad", upper},
                      {"lower", lower},            {"K", K},
                      {"tail_fraction", tail_fraction}, {"assouad_all_sup", all_sup},
                      {"lower_all_inf", all_inf},  {"warnings", warnings}};
    const fs::path dir(out_dir);
    atomic_write_text(dir / "spectrum.csv", csv);
    write_json_file(dir / "spectrum.json", result);

    bool wrote_closed = false;
    if (payload.contains("N") && payload.at("N").contains("recipe")) {
        const json& recipe = payload.at("N").at("recipe");
        const SpectrumCurve closed =
            recipe_curve(recipe.at("t").get<double>(), recipe.at("lambda").get<double>(), grid);
        atomic_write_text(dir / "closed.csv", curve_to_csv(closed));
        write_json_file(dir / "closed.json", curve_to_json(closed));
        wrote_closed = true;
    }
    std::printf("truncated spectra at K=%ld over %zu thetas; wrote spectrum.{csv,json}%s to %s\n",
                K, grid.size(), wrote_closed ? ", closed.{csv,json}" : "", out_dir.c_str());
}

// ---- tails ---------------------------------------------------------------------

void run_tails(const std::string& config_path, const std::string& out_dir, long K,
               const std::vector<double>& lambdas, long min_window, double slack) {
    const IntegerSet set = integer_set_from_json(parse_config(config_path));
    const TailPropsReport report = check_taildensity_props(set, lambdas, K, min_window, slack);

    json entries = json::array();
    std::string csv = "lambda,upper_tail,lower_tail,upper_cap,lower_floor\n";
    for (const auto& entry : report.entries) {
        entries.push_back({{"lambda", entry.lambda},
                           {"upper_tail", entry.upper_tail},
                           {"lower_tail", entry.lower_tail},
                           {"upper_cap", entry.upper_cap},
                           {"lower_floor", entry.lower_floor}});
        csv += format_real(entry.lambda) + "," + format_real(entry.upper_tail) + "," +
               format_real(entry.lower_tail) + "," + format_real(entry.upper_cap) + "," +
               format_real(entry.lower_floor) + "\n";
    }
    const json result{{"pass", report.pass()},
                      {"exact", report.exact},
                      {"upper_asymptotic", report.upper_asymptotic},
                      {"lower_asymptotic", report.lower_asymptotic},
                      {"upper_banach", report.upper_banach},
                      {"lower_banach", report.lower_banach},
                      {"variation_upper", report.variation_upper},
                      {"variation_lower", report.variation_lower},
                      {"complement_checks", report.complement_checks},
                      {"violations", report.violations},
                      {"entries", entries}};
    const fs::path dir(out_dir);
    write_json_file(dir / "report.json", result);
    atomic_write_text(dir / "densities.csv", csv);
    std::printf("%s: asymptotic [%s, %s], banach [%s, %s]; wrote report.json, densities.csv to %s\n",
                report.pass() ? "pass" : "violations found",
                format_real(report.lower_asymptotic).c_str(),
                format_real(report.upper_asymptotic).c_str(),
                format_real(report.lower_banach).c_str(),
                format_real(report.upper_banach).c_str(), out_dir.c_str());
}

// ---- verify --------------------------------------------------------------------

struct FamilyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

FamilyResult verify_carpet() {
    CarpetSpec spec;
    spec.m = 2;
    spec.n = 3;
    spec.rects = {{0, 0}, {0, 2}, {1, 1}};
    const std::vector<Word> centers{densest_column_word(spec)};
    std::vector<double> scales;
    for (int k = 4; k <= 9; ++k) scales.push_back(std::pow(2.0, -k));

    const EmpiricalSpectrum geometric = empirical_spectrum(
        [&](const Word& w, double R, double r) { return covering_oracle(spec, w, R, r); }, 0.4,
        scales, centers);
    const EmpiricalSpectrum symbolic = empirical_spectrum(
        [&](const Word& w, double R, double) { return symbolic_cover_count(spec, w, R, 0.4); },
        0.4, scales, centers);
    const double diff = std::fabs(geometric.slope - symbolic.slope);
    return {"carpet", diff <= 0.05,
            "geometric slope " + format_real(geometric.slope) + ", symbolic slope " +
                format_real(symbolic.slope) + ", diff " + format_real(diff)};
}

FamilyResult verify_ifs() {
    SimilarIFS thirds;
    thirds.maps = {{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}};
    const double s = similarity_exponent(thirds);
    const double target = std::log(2.0) / std::log(3.0);
    if (std::fabs(s - target) > 1e-10)
        return {"ifs", false, "exponent " + format_real(s) + " vs " + format_real(target)};

    const StoppingSet stops = stopping_set(thirds, 1e-3);
    double mass = 0.0;
    for (const auto& entry : stops.entries) mass += gibbs_mass(thirds, s, entry.word);
    if (std::fabs(mass - 1.0) > 1e-9)
        return {"ifs", false, "stopping mass " + format_real(mass)};

    std::vector<double> radii;
    for (int k = 4; k <= 14; ++k) radii.push_back(std::pow(2.0, -k));
    const double t = estimate_t(thirds, s, radii, 12, 7);
    return {"ifs", std::fabs(t - s) <= 0.1,
            "exponent exact, stopping mass " + format_real(mass) + ", local estimate " +
                format_real(t) + " vs " + format_real(s)};
}

FamilyResult verify_percolation() {
    const std::vector<rational> pmf{rational(1, 25), rational(8, 25), rational(16, 25)};
    const GWMomentTable table = gw_moment_table(moments_from_pmf(pmf, 4), 4);
    const std::vector<double> dp{1.0 / 25.0, 8.0 / 25.0, 16.0 / 25.0};
    double worst = 0.0;
    for (int depth = 0; depth <= 4; ++depth) {
        const std::vector<double> dist = exact_gw_distribution(dp, depth);
        for (int k = 1; k <= 4; ++k) {
            double direct = 0.0;
            for (std::size_t j = 0; j < dist.size(); ++j)
                direct += std::pow(static_cast<double>(j), k) * dist[j];
            const double tabulated = table.moment(k, depth).convert_to<double>();
            worst = std::max(worst, std::fabs(direct - tabulated) / tabulated);
        }
    }
    if (worst > 1e-9) return {"percolation", false, "table vs pgf rel error " + format_real(worst)};

    const PercolationParams params{2, 1, 0.9};
    const double box = box_dimension(params);
    const McEstimate est = empirical_spectrum_mc(params, 0.5, 12, 60, 5);
    return {"percolation", std::fabs(est.value - box) <= 0.2,
            "moments exact to rel " + format_real(worst) + "; monte carlo " +
                format_real(est.value) + " vs box " + format_real(box)};
}

FamilyResult verify_moran() {
    const DyadicSequence seq = recipe_sequence(0.5, 2.0, 4200);
    const DyadicSequence flipped = invert(seq);
    long twos = 0, flipped_twos = 0;
    for (long k = 1; k <= 500; ++k) {
        if (seq.values[static_cast<std::size_t>(k - 1)] == 2) ++twos;
        if (flipped.values[static_cast<std::size_t>(k - 1)] == 2) ++flipped_twos;
        if (twos + flipped_twos != k)
            return {"moran", false, "count duality broke at k=" + std::to_string(k)};
    }
    const TruncatedLimit trunc = dyadic_spectrum_trunc(seq, 0.5, 2000, 0.8);
    return {"moran", std::fabs(trunc.sup_tail - 0.5) <= 0.05,
            "duality exact to k=500; tail estimate " + format_real(trunc.sup_tail) +
                " vs closed form 0.5"};
}

FamilyResult verify_tails() {
    const IntegerSet set = IntegerSet::periodic(3, {0});
    const TailPropsReport report = check_taildensity_props(set, {1.25, 1.5, 2.0, 3.0}, 500);
    const bool ok = report.pass() && report.exact && report.upper_asymptotic == 1.0 / 3.0;
    return {"tails", ok,
            "period-3 densities " + format_real(report.lower_asymptotic) + ".." +
                format_real(report.upper_asymptotic) + (report.exact ? " (exact)" : "")};
}

int run_verify(const std::string& family) {
    const std::vector<std::pair<std::string, FamilyResult (*)()>> all{
        {"carpet", verify_carpet},
        {"ifs", verify_ifs},
        {"percolation", verify_percolation},
        {"moran", verify_moran},
        {"tails", verify_tails},
    };
    bool known = family == "all";
    for (const auto& [name, fn] : all) known = known || name == family;
    if (!known)
        throw std::invalid_argument("--family must be carpet, ifs, percolation, moran, tails, or all");

    int failures = 0;
    for (const auto& [name, fn] : all) {
        if (family != "all" && family != name) continue;
        const FamilyResult result = fn();
        if (!result.pass) ++failures;
        std::printf("verify %s: %s (%s)\n", result.name.c_str(), result.pass ? "PASS" : "FAIL",
                    result.detail.c_str());
    }
    return failures == 0 ? 0 : 4;
}

// ---- figures ---------------------------------------------------------------------

void run_figure(const std::string& name, const std::string& out_dir, std::size_t grid_n) {
    const std::vector<FigurePanel> panels = emit_figure_data(name, ThetaGrid::uniform(grid_n));
    for (const FigurePanel& panel : panels)
        atomic_write_text(fs::path(out_dir) / (panel.name + ".csv"), panel.csv);
    std::printf("wrote %zu panels for %s to %s\n", panels.size(), name.c_str(), out_dir.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimension spectra for carpets, self-similar sets, percolation, and integer sets"};
    app.require_subcommand(0, 1);

    std::string figure_name;
    std::string figure_out = ".";
    std::size_t figure_grid = 199;
    app.add_option("--figure", figure_name, "write a named figure data bundle (fig3, fig4, fig6)");
    app.add_option("--out", figure_out, "output directory for --figure");
    app.add_option("--grid", figure_grid, "theta grid size for --figure");

    auto* carpet = app.add_subcommand("carpet", "dimensions and spectra of a grid carpet");
    std::string carpet_config, carpet_out = ".";
    std::size_t carpet_grid = 99;
    carpet->add_option("--config", carpet_config, "carpet JSON file")->required();
    carpet->add_option("--out", carpet_out, "output directory");
    carpet->add_option("--grid", carpet_grid, "theta grid size");

    auto* ifs_cmd = app.add_subcommand("ifs", "overlap bounds for a self-similar system");
    std::string ifs_config, ifs_out = ".", ifs_t = "estimate", ifs_assert;
    std::size_t ifs_grid = 99;
    double ifs_box = -1.0;
    int ifs_samples = 16;
    ifs_cmd->add_option("--config", ifs_config, "IFS JSON file")->required();
    ifs_cmd->add_option("--out", ifs_out, "output directory");
    ifs_cmd->add_option("--grid", ifs_grid, "theta grid size");
    ifs_cmd->add_option("--t", ifs_t, "local-dimension floor, a real or 'estimate'");
    ifs_cmd->add_option("--box", ifs_box, "upper box dimension override (default min(s,1))");
    ifs_cmd->add_option("--samples", ifs_samples, "sample points for --t estimate");
    ifs_cmd->add_option("--assert", ifs_assert,
                        "separation hypothesis making the spectrum constant: wsp or no-sec");

    auto* perc = app.add_subcommand("percolation", "monte carlo spectrum of fractal percolation");
    std::string perc_config, perc_out = ".";
    double perc_theta = 0.5;
    int perc_depth = 10, perc_trials = 100;
    std::uint64_t perc_seed = 2024;
    perc->add_option("--config", perc_config, "percolation JSON file")->required();
    perc->add_option("--out", perc_out, "output directory");
    perc->add_option("--theta", perc_theta, "spectrum parameter in (0,1)");
    perc->add_option("--depth", perc_depth, "tree depth");
    perc->add_option("--trials", perc_trials, "independent trees");
    perc->add_option("--seed", perc_seed, "random seed");

    auto* moran = app.add_subcommand("moran", "truncated spectra of a moran construction");
    std::string moran_config, moran_out = ".";
    long moran_K = 256;
    std::size_t moran_grid = 99;
    double moran_tail = 0.8;
    moran->add_option("--config", moran_config, "moran JSON file")->required();
    moran->add_option("--out", moran_out, "output directory");
    moran->add_option("--K", moran_K, "truncation depth");
    moran->add_option("--grid", moran_grid, "theta grid size");
    moran->add_option("--tail-fraction", moran_tail, "tail window fraction in (0,1]");

    auto* tails = app.add_subcommand("tails", "lambda-tail density report for an integer set");
    std::string tails_config, tails_out = ".";
    long tails_K = 2000, tails_window = 16;
    double tails_slack = 0.05;
    std::vector<double> tails_lambdas{1.25, 1.5, 2.0, 3.0};
    tails->add_option("--config", tails_config, "integer set JSON file")->required();
    tails->add_option("--out", tails_out, "output directory");
    tails->add_option("--K", tails_K, "truncation horizon");
    tails->add_option("--lambda", tails_lambdas, "window ratios, each > 1");
    tails->add_option("--min-window", tails_window, "banach density window length");
    tails->add_option("--slack", tails_slack, "tolerance for truncated comparisons");

    auto* verify = app.add_subcommand("verify", "cross-check closed forms against the oracles");
    std::string verify_family = "all";
    verify->add_option("--family", verify_family,
                       "carpet, ifs, percolation, moran, tails, or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (carpet->parsed()) {
            run_carpet(carpet_config, carpet_out, carpet_grid);
        } else if (ifs_cmd->parsed()) {
            run_ifs(ifs_config, ifs_out, ifs_grid, ifs_t, ifs_box, ifs_samples, ifs_assert);
        } else if (perc->parsed()) {
            run_percolation(perc_config, perc_out, perc_theta, perc_depth, perc_trials, perc_seed);
        } else if (moran->parsed()) {
            run_moran(moran_config, moran_out, moran_K, moran_grid, moran_tail);
        } else if (tails->parsed()) {
            run_tails(tails_config, tails_out, tails_K, tails_lambdas, tails_window, tails_slack);
        } else if (verify->parsed()) {
            return run_verify(verify_family);
        } else if (!figure_name.empty()) {
            run_figure(figure_name, figure_out, figure_grid);
        } else {
            std::fputs(app.help().c_str(), stdout);
            return 2;
        }
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 3;
    } catch (const extinction_error& e) {
        std::fprintf(stderr, "extinction: %s\n", e.what());
        return 3;
    } catch (const oracle_error& e) {
        std::fprintf(stderr, "oracle contract: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
