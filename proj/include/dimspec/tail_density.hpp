// Density calculus for integer sets X within {1, 2, ...}: the lambda-tail
// densities
//   upper/lower limit of #(X cap [k, lambda k]) / (lambda k - k),
// the asymptotic densities #(X cap [1,k])/k, and the Banach densities
// (extremes of window density as the window length grows). Counting windows
// are the integers k..floor(lambda k) while the denominator stays the real
// lambda k - k, so finite-k values carry an O(1/k) endpoint term that
// vanishes in the limit.
//
// The bound chain tying these together:
//   upper_asymptotic <= upper_tail(lambda)
//                    <= min(lambda*upper_asymptotic/(lambda-1), upper_banach)
// with the mirrored lower chain, plus the complement duality
//   lower_tail(X, lambda) = 1 - upper_tail(complement X, lambda),
// which at the window level is the exact integer identity
//   #(X cap W) + #(complement cap W) = |W|.
//
// Sets are explicit sorted lists, periodic residue classes (exact limits
// available), or periodic backgrounds overridden by finite runs; membership
// beyond the declared horizon is an error, never a guess.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "truncated_limit.hpp"

namespace dimspec {

// ---- integer sets -------------------------------------------------------------

struct IntegerSet {
    enum class Kind { explicit_list, periodic, blocks };

    struct Run {
        long start = 1;
        long length = 1;
        bool member = true;  // overrides the periodic background on [start, start+length)
    };

    Kind kind = Kind::explicit_list;
    long declared_horizon = 0;
    std::vector<long> members;       // explicit_list, sorted distinct
    long q = 0;                      // periodic/blocks
    std::vector<char> residue_mask;  // size q
    std::vector<Run> runs;           // blocks, sorted non-overlapping

    static IntegerSet from_members(std::vector<long> sorted_members, long horizon) {
        IntegerSet set;
        set.kind = Kind::explicit_list;
        set.members = std::move(sorted_members);
        set.declared_horizon = horizon;
        set.validate();
        return set;
    }

    static IntegerSet periodic(long period, const std::vector<long>& residues) {
        IntegerSet set;
        set.kind = Kind::periodic;
        set.q = period;
        set.declared_horizon = std::numeric_limits<long>::max();
        set.residue_mask.assign(static_cast<std::size_t>(period), 0);
        for (long r : residues) {
            if (r < 0 || r >= period)
                throw std::domain_error("IntegerSet: residue outside [0, q)");
            set.residue_mask[static_cast<std::size_t>(r)] = 1;
        }
        set.validate();
        return set;
    }

    static IntegerSet blocks(long period, const std::vector<long>& residues,
                             std::vector<Run> run_list, long horizon) {
        IntegerSet set = periodic(period, residues);
        set.kind = Kind::blocks;
        set.declared_horizon = horizon;
        set.runs = std::move(run_list);
        set.validate();
        return set;
    }

    void validate() const {
        if (declared_horizon < 1) throw std::invalid_argument("IntegerSet: horizon must be >= 1");
        switch (kind) {
        case Kind::explicit_list:
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (members[i] < 1 || members[i] > declared_horizon)
                    throw std::domain_error("IntegerSet: member outside [1, horizon]");
                if (i > 0 && members[i] <= members[i - 1])
                    throw std::invalid_argument("IntegerSet: members must be sorted distinct");
            }
            break;
        case Kind::blocks:
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (runs[i].start < 1 || runs[i].length < 1 ||
                    runs[i].start + runs[i].length - 1 > declared_horizon)
                    throw std::domain_error("IntegerSet: run outside [1, horizon]");
                if (i > 0 && runs[i].start < runs[i - 1].start + runs[i - 1].length)
                    throw std::invalid_argument("IntegerSet: runs must be sorted disjoint");
            }
            [[fallthrough]];
        case Kind::periodic:
            if (q < 1) throw std::domain_error("IntegerSet: period must be >= 1");
            if (residue_mask.size() != static_cast<std::size_t>(q))
                throw std::invalid_argument("IntegerSet: residue mask size mismatch");
            break;
        }
    }

    long horizon() const { return declared_horizon; }

    bool is_periodic() const { return kind == Kind::periodic; }

    long members_per_period() const {
        long count = 0;
        for (char bit : residue_mask) count += bit;
        return count;
    }

    bool contains(long k) const {
        if (k < 1 || k > declared_horizon)
            throw insufficient_data_error("IntegerSet: query beyond the declared horizon");
        switch (kind) {
        case Kind::explicit_list:
            return std::binary_search(members.begin(), members.end(), k);
        case Kind::periodic:
            return residue_mask[static_cast<std::size_t>(k % q)] != 0;
        case Kind::blocks:
            for (const Run& run : runs)
                if (k >= run.start && k < run.start + run.length) return run.member;
            return residue_mask[static_cast<std::size_t>(k % q)] != 0;
        }
        return false;
    }

    // #(X cap [from, to]), inclusive
    long count(long from, long to) const {
        if (from < 1 || from > to)
            throw std::invalid_argument("IntegerSet: bad counting window");
        if (to > declared_horizon)
            throw insufficient_data_error("IntegerSet: window beyond the declared horizon");
        switch (kind) {
        case Kind::explicit_list:
            return static_cast<long>(std::upper_bound(members.begin(), members.end(), to) -
                                     std::lower_bound(members.begin(), members.end(), from));
        case Kind::periodic:
            return periodic_count(from, to);
        case Kind::blocks: {
            long total = periodic_count(from, to);
            for (const Run& run : runs) {
                const long lo = std::max(from, run.start);
                const long hi = std::min(to, run.start + run.length - 1);
                if (lo > hi) continue;
                total -= periodic_count(lo, hi);
                if (run.member) total += hi - lo + 1;
            }
            return total;
        }
        }
        return 0;
    }

private:
    static long floor_div(long a, long b) {
        long quot = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --quot;
        return quot;
    }

    long periodic_count(long from, long to) const {
        long total = 0;
        for (long r = 0; r < q; ++r) {
            if (!residue_mask[static_cast<std::size_t>(r)]) continue;
            total += floor_div(to - r, q) - floor_div(from - 1 - r, q);
        }
        return total;
    }
};

inline IntegerSet complement(const IntegerSet& set) {
    set.validate();
    switch (set.kind) {
    case IntegerSet::Kind::explicit_list: {
        std::vector<long> out;
        out.reserve(static_cast<std::size_t>(set.declared_horizon) - set.members.size());
        std::size_t next = 0;
        for (long k = 1; k <= set.declared_horizon; ++k) {
            if (next < set.members.size() && set.members[next] == k)
                ++next;
            else
                out.push_back(k);
        }
        return IntegerSet::from_members(std::move(out), set.declared_horizon);
    }
    case IntegerSet::Kind::periodic:
    case IntegerSet::Kind::blocks: {
        std::vector<long> residues;
        for (long r = 0; r < set.q; ++r)
            if (!set.residue_mask[static_cast<std::size_t>(r)]) residues.push_back(r);
        if (set.kind == IntegerSet::Kind::periodic) return IntegerSet::periodic(set.q, residues);
        std::vector<IntegerSet::Run> flipped = set.runs;
        for (auto& run : flipped) run.member = !run.member;
        return IntegerSet::blocks(set.q, residues, std::move(flipped), set.declared_horizon);
    }
    }
    throw std::logic_error("complement: unreachable");
}

// ---- densities -----------------------------------------------------------------

// Per-k values #(X cap [k, floor(lambda k)]) / (lambda k - k) with sup/inf
// tails; periodic sets carry their exact limit.
inline TruncatedLimit tail_densities(const IntegerSet& set, double lambda, long K,
                                     double tail_fraction = 0.2) {
    set.validate();
    if (!(lambda > 1.0)) throw std::domain_error("tail_densities: need lambda > 1");
    if (K < 1) throw std::invalid_argument("tail_densities: K must be >= 1");
    const long top = static_cast<long>(std::floor(lambda * static_cast<double>(K)));
    if (top > set.horizon())
        throw insufficient_data_error("tail_densities: floor(lambda K) beyond the horizon");
    std::vector<std::pair<long, double>> partials;
    partials.reserve(static_cast<std::size_t>(K));
    for (long k = 1; k <= K; ++k) {
        const long hi = static_cast<long>(std::floor(lambda * static_cast<double>(k)));
        const double denom = (lambda - 1.0) * static_cast<double>(k);
        partials.emplace_back(k, static_cast<double>(set.count(k, hi)) / denom);
    }
    TruncatedLimit out = TruncatedLimit::from_partials(partials, tail_fraction);
    if (set.is_periodic())
        out.exact_limit = static_cast<double>(set.members_per_period()) / static_cast<double>(set.q);
    return out;
}

inline TruncatedLimit asymptotic_densities(const IntegerSet& set, long K,
                                           double tail_fraction = 0.2) {
    set.validate();
    if (K < 1 || K > set.horizon())
        throw std::invalid_argument("asymptotic_densities: K outside the horizon");
    std::vector<std::pair<long, double>> partials;
    partials.reserve(static_cast<std::size_t>(K));
    long running = 0;
    for (long k = 1; k <= K; ++k) {
        if (set.contains(k)) ++running;
        partials.emplace_back(k, static_cast<double>(running) / static_cast<double>(k));
    }
    TruncatedLimit out = TruncatedLimit::from_partials(partials, tail_fraction);
    if (set.is_periodic())
        out.exact_limit = static_cast<double>(set.members_per_period()) / static_cast<double>(set.q);
    return out;
}

struct BanachDensities {
    double upper = 0.0;
    double lower = 0.0;
};

// Window-density extremes at length exactly min_window, swept over [1, K].
// These bracket the true Banach densities from the correct sides (longer
// windows only average the extremes out), and for periodic sets with
// min_window a multiple of q they are exact.
inline BanachDensities banach_densities(const IntegerSet& set, long K, long min_window) {
    set.validate();
    if (min_window < 1) throw std::invalid_argument("banach_densities: min_window must be >= 1");
    if (K < min_window || K > set.horizon())
        throw std::invalid_argument("banach_densities: need min_window <= K <= horizon");
    long window = set.count(1, min_window);
    long best_max = window, best_min = window;
    for (long l = 2; l + min_window - 1 <= K; ++l) {
        window += (set.contains(l + min_window - 1) ? 1 : 0) - (set.contains(l - 1) ? 1 : 0);
        best_max = std::max(best_max, window);
        best_min = std::min(best_min, window);
    }
    BanachDensities out;
    out.upper = static_cast<double>(best_max) / static_cast<double>(min_window);
    out.lower = static_cast<double>(best_min) / static_cast<double>(min_window);
    return out;
}

// ---- density property checks -------------------------------------------------------

struct TailPropsReport {
    struct LambdaEntry {
        double lambda = 0.0;
        double upper_tail = 0.0;
        double lower_tail = 0.0;
        double upper_cap = 0.0;    // min(lambda*up/(lambda-1), upper_banach)
        double lower_floor = 0.0;  // max((lambda*lo - 1)/(lambda-1), lower_banach)
    };

    double upper_asymptotic = 0.0;
    double lower_asymptotic = 0.0;
    double upper_banach = 0.0;
    double lower_banach = 0.0;
    bool exact = false;  // periodic set, all quantities exact limits
    std::vector<LambdaEntry> entries;
    std::vector<std::string> violations;
    double variation_upper = 0.0;  // total variation across the lambda grid
    double variation_lower = 0.0;
    long complement_checks = 0;

    bool pass() const { return violations.empty(); }
};

// Verifies the bound chain at every grid lambda, the exact per-window
// complement identity, and bounded variation of the lambda-curves. Periodic
// sets use exact limits and tolerance 1e-12; otherwise truncated estimates
// are compared with the supplied slack for the O(1/k) endpoint terms.
inline TailPropsReport check_taildensity_props(const IntegerSet& set,
                                               const std::vector<double>& lambda_grid, long K,
                                               long min_window = 16, double slack = 0.05) {
    set.validate();
    if (lambda_grid.empty())
        throw std::invalid_argument("check_taildensity_props: empty lambda grid");
    for (double lambda : lambda_grid)
        if (!(lambda > 1.0))
            throw std::domain_error("check_taildensity_props: every lambda must exceed 1");

    TailPropsReport report;
    report.exact = set.is_periodic();
    const double tol = report.exact ? 1e-12 : slack;

    if (report.exact) {
        const double density =
            static_cast<double>(set.members_per_period()) / static_cast<double>(set.q);
        report.upper_asymptotic = report.lower_asymptotic = density;
        report.upper_banach = report.lower_banach = density;
    } else {
        const TruncatedLimit asym = asymptotic_densities(set, K);
        report.upper_asymptotic = asym.sup_tail;
        report.lower_asymptotic = asym.inf_tail;
        const BanachDensities banach = banach_densities(set, K, min_window);
        report.upper_banach = banach.upper;
        report.lower_banach = banach.lower;
    }

    auto flag = [&report](const std::string& message) { report.violations.push_back(message); };

    const IntegerSet comp = complement(set);
    double prev_upper = 0.0, prev_lower = 0.0;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const double lambda = lambda_grid[i];
        const TruncatedLimit tail = tail_densities(set, lambda, K);
        TailPropsReport::LambdaEntry entry;
        entry.lambda = lambda;
        entry.upper_tail = tail.exact_limit ? *tail.exact_limit : tail.sup_tail;
        entry.lower_tail = tail.exact_limit ? *tail.exact_limit : tail.inf_tail;
        entry.upper_cap = std::min(lambda * report.upper_asymptotic / (lambda - 1.0),
                                   report.upper_banach);
        entry.lower_floor = std::max((lambda * report.lower_asymptotic - 1.0) / (lambda - 1.0),
                                     report.lower_banach);
        report.entries.push_back(entry);

        char buf[160];
        if (entry.upper_tail < report.upper_asymptotic - tol) {
            std::snprintf(buf, sizeof buf, "lambda %.6g: upper tail %.12g below asymptotic %.12g",
                          lambda, entry.upper_tail, report.upper_asymptotic);
            flag(buf);
        }
        if (entry.upper_tail > entry.upper_cap + tol) {
            std::snprintf(buf, sizeof buf, "lambda %.6g: upper tail %.12g above cap %.12g", lambda,
                          entry.upper_tail, entry.upper_cap);
            flag(buf);
        }
        if (entry.lower_tail > report.lower_asymptotic + tol) {
            std::snprintf(buf, sizeof buf, "lambda %.6g: lower tail %.12g above asymptotic %.12g",
                          lambda, entry.lower_tail, report.lower_asymptotic);
            flag(buf);
        }
        if (entry.lower_tail < entry.lower_floor - tol) {
            std::snprintf(buf, sizeof buf, "lambda %.6g: lower tail %.12g below floor %.12g",
                          lambda, entry.lower_tail, entry.lower_floor);
            flag(buf);
        }

        // complement identity, exact in integers on a stride of windows
        const long stride = std::max<long>(1, K / 64);
        for (long k = 1; k <= K; k += stride) {
            const long hi = static_cast<long>(std::floor(lambda * static_cast<double>(k)));
            const long width = hi - k + 1;
            if (set.count(k, hi) + comp.count(k, hi) != width) {
                std::snprintf(buf, sizeof buf, "lambda %.6g: complement identity fails at k=%ld",
                              lambda, k);
                flag(buf);
                break;
            }
            ++report.complement_checks;
        }

        if (i > 0) {
            report.variation_upper += std::fabs(entry.upper_tail - prev_upper);
            report.variation_lower += std::fabs(entry.lower_tail - prev_lower);
        }
        prev_upper = entry.upper_tail;
        prev_lower = entry.lower_tail;
    }
    return report;
}

} // namespace dimspec
