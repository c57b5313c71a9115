// Mandelbrot percolation on the unit cube: divide [0,1]^d into n^d subcubes,
// keep each independently with probability p, recurse inside the survivors.
// Supercritical means p*n^d > 1 and then the limit set (on non-extinction)
// has box dimension B = log(p n^d)/log n.
//
// The survivor counts Y_k form a Galton-Watson process with Binomial(n^d, p)
// offspring. Moments obey E[Y_n^k] = sum_i a_{ki} mu^{i n} with a triangular
// coefficient array computed here exactly in rationals: conditioning on Y_n
// expands E[(X_1+...+X_{Y_n})^k] into falling factorials over set partitions
// (converted to monomials by Stirling numbers of the first kind), and
// matching powers of mu^n yields a_{kj} = S_j / (mu^j - mu^k) for j < k with
// the diagonal pinned by E[Y_1^k] = mu_k.
//
// Everything stochastic is keyed: each cube's retention draw hashes the
// cube's digit path, so samples are reproducible and schedule-independent.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "numeric.hpp"

namespace dimspec {

using rational = boost::multiprecision::cpp_rational;

inline rational rational_pow(rational base, unsigned long long exp) {
    rational out = 1;
    while (exp > 0) {
        if (exp & 1ULL) out *= base;
        base *= base;
        exp >>= 1ULL;
    }
    return out;
}

// ---- parameters ----------------------------------------------------------------

struct PercolationParams {
    int n = 2;
    int d = 1;
    double p = 0.5;

    void validate() const {
        if (n < 2) throw std::domain_error("PercolationParams: n must be >= 2");
        if (d < 1) throw std::domain_error("PercolationParams: d must be >= 1");
        if (!(p > 0.0 && p <= 1.0))
            throw std::domain_error("PercolationParams: p must lie in (0,1]");
    }

    std::int64_t cubes_per_level() const {
        return ipow(n, d);
    }

    double mean_offspring() const {
        return p * static_cast<double>(cubes_per_level());
    }
};

inline double box_dimension(const PercolationParams& params) {
    params.validate();
    if (!(params.mean_offspring() > 1.0))
        throw std::domain_error("box_dimension: subcritical, need p*n^d > 1");
    return std::log(params.mean_offspring()) / std::log(static_cast<double>(params.n));
}

// ---- offspring moments -----------------------------------------------------------

struct OffspringMoments {
    std::vector<rational> raw;  // mu_1 .. mu_K

    void validate() const {
        if (raw.empty()) throw std::invalid_argument("OffspringMoments: need at least mu_1");
        if (!(raw[0] > 0)) throw std::domain_error("OffspringMoments: mu_1 must be positive");
        if (raw.size() >= 2 && raw[1] < raw[0] * raw[0])
            throw std::domain_error("OffspringMoments: mu_2 < mu_1^2 is inconsistent");
    }
};

struct MomentOptions {
    int max_support = 256;
    int max_order = 12;  // cap on the power-sum expansion order
};

// Raw moments of an arbitrary law given as point masses; probabilities are
// taken exactly as given (doubles convert to exact binary rationals).
inline OffspringMoments moments_from_pmf(const std::vector<rational>& pmf, int K) {
    if (K < 1) throw std::invalid_argument("moments_from_pmf: K must be >= 1");
    if (pmf.empty()) throw std::invalid_argument("moments_from_pmf: empty pmf");
    OffspringMoments out;
    out.raw.assign(static_cast<std::size_t>(K), rational(0));
    for (std::size_t value = 0; value < pmf.size(); ++value) {
        if (pmf[value] < 0) throw std::domain_error("moments_from_pmf: negative probability");
        rational power = static_cast<int>(value);
        for (int m = 0; m < K; ++m) {
            out.raw[static_cast<std::size_t>(m)] += pmf[value] * power;
            power *= static_cast<int>(value);
        }
    }
    out.validate();
    return out;
}

// Exact pmf of Binomial(count, p); p converts to its exact binary rational.
inline std::vector<rational> binomial_pmf(int count, double p) {
    if (count < 1) throw std::domain_error("binomial_pmf: count must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p must lie in (0,1]");
    const rational rp(p), rq = rational(1) - rational(p);
    std::vector<rational> pmf(static_cast<std::size_t>(count) + 1);
    boost::multiprecision::cpp_int choose = 1;
    for (int k = 0; k <= count; ++k) {
        pmf[static_cast<std::size_t>(k)] =
            rational(choose) * rational_pow(rp, static_cast<unsigned long long>(k)) *
            rational_pow(rq, static_cast<unsigned long long>(count - k));
        choose = choose * (count - k) / (k + 1);
    }
    return pmf;
}

inline OffspringMoments binomial_moments(int count, double p, int K,
                                         const MomentOptions& opts = {}) {
    if (count > opts.max_support)
        throw resource_error("binomial_moments: support " + std::to_string(count) +
                             " exceeds cap " + std::to_string(opts.max_support));
    return moments_from_pmf(binomial_pmf(count, p), K);
}

// ---- power-sum expansion -----------------------------------------------------------

// Coefficients b_0..b_k with E[(X_1 + ... + X_y)^k] = sum_i b_i y^i for iid
// X with the given raw moments: sum over set partitions of {1..k}, each
// contributing (number of partitions with that block-size multiset) times
// the falling factorial (y)_s times the product of block moments, with
// (y)_s converted to monomials by signed Stirling numbers of the first kind.
inline std::vector<rational> expand_power_sum(const OffspringMoments& moments, int k,
                                              const MomentOptions& opts = {}) {
    moments.validate();
    if (k < 1) throw std::invalid_argument("expand_power_sum: k must be >= 1");
    if (k > opts.max_order)
        throw resource_error("expand_power_sum: order " + std::to_string(k) + " exceeds cap " +
                             std::to_string(opts.max_order));
    if (static_cast<int>(moments.raw.size()) < k)
        throw std::invalid_argument("expand_power_sum: need moments up to order k");

    std::vector<std::int64_t> fact(static_cast<std::size_t>(k) + 1, 1);
    for (int i = 1; i <= k; ++i)
        fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;

    // signed Stirling numbers of the first kind: (y)_s = sum_i s1[s][i] y^i
    std::vector<std::vector<std::int64_t>> s1(static_cast<std::size_t>(k) + 1,
                                              std::vector<std::int64_t>(static_cast<std::size_t>(k) + 1, 0));
    s1[0][0] = 1;
    for (int s = 1; s <= k; ++s)
        for (int i = 1; i <= s; ++i)
            s1[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] =
                s1[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i - 1)] -
                static_cast<std::int64_t>(s - 1) * s1[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i)];

    std::vector<rational> b(static_cast<std::size_t>(k) + 1, rational(0));
    std::vector<int> parts;
    auto emit = [&]() {
        const int s = static_cast<int>(parts.size());
        std::int64_t ways = fact[static_cast<std::size_t>(k)];
        rational mom = 1;
        int run = 0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            ways /= fact[static_cast<std::size_t>(parts[j])];
            mom *= moments.raw[static_cast<std::size_t>(parts[j] - 1)];
            run = (j > 0 && parts[j] == parts[j - 1]) ? run + 1 : 1;
            ways /= run;  // divides the multiset repetition factor incrementally
        }
        for (int i = 1; i <= s; ++i)
            b[static_cast<std::size_t>(i)] +=
                rational(ways) * s1[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] * mom;
    };
    auto descend = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            emit();
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            parts.push_back(part);
            self(self, remaining - part, part);
            parts.pop_back();
        }
    };
    descend(descend, k, k);
    return b;
}

// ---- Galton-Watson moment table ------------------------------------------------------

struct GWMomentTable {
    rational mu;                             // offspring mean, > 1
    std::vector<std::vector<rational>> rows;  // rows[k-1] = a_{k,1..k}

    int order() const { return static_cast<int>(rows.size()); }

    // E[Y_n^k], exact
    rational moment(int k, long long n) const {
        if (k < 1 || k > order()) throw std::domain_error("GWMomentTable: k outside the table");
        if (n < 0) throw std::domain_error("GWMomentTable: n must be >= 0");
        rational sum = 0;
        const auto& row = rows[static_cast<std::size_t>(k - 1)];
        for (std::size_t j = 0; j < row.size(); ++j)
            sum += row[j] * rational_pow(mu, static_cast<unsigned long long>(j + 1) *
                                                 static_cast<unsigned long long>(n));
        return sum;
    }
};

inline GWMomentTable gw_moment_table(const OffspringMoments& moments, int K,
                                     const MomentOptions& opts = {}) {
    moments.validate();
    if (K < 1) throw std::invalid_argument("gw_moment_table: K must be >= 1");
    if (static_cast<int>(moments.raw.size()) < K)
        throw std::invalid_argument("gw_moment_table: need moments up to order K");
    if (!(moments.raw[0] > 1))
        throw std::domain_error("gw_moment_table: need mu_1 > 1 (supercritical)");
    GWMomentTable table;
    table.mu = moments.raw[0];
    for (int N = 1; N <= K; ++N) {
        std::vector<rational> row(static_cast<std::size_t>(N), rational(0));
        if (N == 1) {
            row[0] = 1;
        } else {
            const std::vector<rational> b = expand_power_sum(moments, N, opts);
            rational diag = moments.raw[static_cast<std::size_t>(N - 1)];  // E[Y_1^N] = mu_N
            for (int j = 1; j < N; ++j) {
                rational s_j = 0;
                for (int i = j; i < N; ++i)
                    s_j += b[static_cast<std::size_t>(i)] *
                           table.rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
                const rational mu_j = rational_pow(table.mu, static_cast<unsigned long long>(j));
                const rational mu_n = rational_pow(table.mu, static_cast<unsigned long long>(N));
                row[static_cast<std::size_t>(j - 1)] = s_j / (mu_j - mu_n);
                diag -= row[static_cast<std::size_t>(j - 1)] * mu_j;
            }
            row[static_cast<std::size_t>(N - 1)] =
                diag / rational_pow(table.mu, static_cast<unsigned long long>(N));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---- exact distribution oracle --------------------------------------------------------

struct GWDistributionOptions {
    int max_support = 10;  // offspring pmf atoms
    int max_depth = 6;
    double max_work = 2e9;  // floating multiply budget for the pgf composition
};

// Exact pmf of the generation-depth population, by iterating the
// probability-generating-function composition G_{k+1} = G_X(G_k) as
// polynomial arithmetic. Independent of the moment table; used to check it.
inline std::vector<double> exact_gw_distribution(const std::vector<double>& offspring_pmf,
                                                 int depth,
                                                 const GWDistributionOptions& opts = {}) {
    if (offspring_pmf.empty())
        throw std::invalid_argument("exact_gw_distribution: empty offspring pmf");
    if (depth < 0) throw std::invalid_argument("exact_gw_distribution: depth must be >= 0");
    if (static_cast<int>(offspring_pmf.size()) > opts.max_support)
        throw resource_error("exact_gw_distribution: offspring support exceeds cap");
    if (depth > opts.max_depth)
        throw resource_error("exact_gw_distribution: depth exceeds cap");
    double total = 0.0;
    for (double prob : offspring_pmf) {
        if (!(prob >= 0.0)) throw std::domain_error("exact_gw_distribution: negative probability");
        total += prob;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::domain_error("exact_gw_distribution: pmf must sum to 1");

    std::vector<double> current{0.0, 1.0};  // Y_0 = 1
    double work = 0.0;
    for (int level = 0; level < depth; ++level) {
        // Horner over G_X: result = sum_j x_j * current^j
        const std::size_t degree = (current.size() - 1) * (offspring_pmf.size() - 1) + 1;
        work += static_cast<double>(offspring_pmf.size()) * static_cast<double>(current.size()) *
                static_cast<double>(degree);
        if (work > opts.max_work)
            throw resource_error("exact_gw_distribution: work budget exceeded");
        std::vector<double> result{offspring_pmf.back()};
        for (std::size_t j = offspring_pmf.size() - 1; j-- > 0;) {
            std::vector<double> next(result.size() + current.size() - 1, 0.0);
            for (std::size_t a = 0; a < result.size(); ++a)
                for (std::size_t b = 0; b < current.size(); ++b)
                    next[a + b] += result[a] * current[b];
            next[0] += offspring_pmf[j];
            result = std::move(next);
        }
        current = std::move(result);
    }
    return current;
}

// ---- sampling ---------------------------------------------------------------------------

struct PercolationSample {
    std::uint64_t seed = 0;
    int depth = 0;
    // levels[k] holds the packed digit paths of the surviving level-k cubes,
    // sorted; levels[0] is the root {0}
    std::vector<std::vector<std::int64_t>> levels;
};

inline PercolationSample sample(const PercolationParams& params, int depth, std::uint64_t seed) {
    params.validate();
    if (depth < 1) throw std::invalid_argument("sample: depth must be >= 1");
    const std::int64_t fanout = params.cubes_per_level();
    if (static_cast<double>(depth) * std::log2(static_cast<double>(fanout)) >= 62.0)
        throw resource_error("sample: depth too large for packed cube indices");

    PercolationSample out;
    out.seed = seed;
    out.depth = depth;
    out.levels.assign(static_cast<std::size_t>(depth) + 1, {});
    out.levels[0] = {0};
    std::vector<std::uint64_t> keys{splitmix64(seed)};
    for (int level = 0; level < depth; ++level) {
        std::vector<std::int64_t> next_idx;
        std::vector<std::uint64_t> next_keys;
        const auto& here = out.levels[static_cast<std::size_t>(level)];
        for (std::size_t i = 0; i < here.size(); ++i) {
            for (std::int64_t c = 0; c < fanout; ++c) {
                const std::uint64_t child_key = key_combine(keys[i], static_cast<std::uint64_t>(c));
                if (unit_double(child_key) < params.p) {
                    next_idx.push_back(here[i] * fanout + c);
                    next_keys.push_back(child_key);
                }
            }
        }
        out.levels[static_cast<std::size_t>(level + 1)] = std::move(next_idx);
        keys = std::move(next_keys);
    }
    return out;
}

// ---- probability-bound chain -------------------------------------------------------------

// Markov bound on the existence of a level-s cube with at least M surviving
// descendants floor(k) generations further down:
//   n^{B s} * E[Y_{floor(k)}^N] / M^N.
inline double g_cube_bound(const PercolationParams& params, int s, double k, double M, int N,
                           const GWMomentTable& table) {
    params.validate();
    if (s < 0) throw std::domain_error("g_cube_bound: s must be >= 0");
    if (!(k >= 0.0)) throw std::domain_error("g_cube_bound: k must be >= 0");
    if (!(M > 0.0)) throw std::domain_error("g_cube_bound: M must be positive");
    if (N < 1 || N > table.order())
        throw std::domain_error("g_cube_bound: N outside the moment table");
    const double B = box_dimension(params);
    const double moment = table.moment(N, static_cast<long long>(std::floor(k))).convert_to<double>();
    return std::pow(static_cast<double>(params.n), B * s) * moment / std::pow(M, N);
}

// Exponent governing the Borel-Cantelli sum: negative for all large N once
// B1 exceeds the implied spectrum bound.
inline double borel_cantelli_exponent(double B, double B1, int N, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("borel_cantelli_exponent: theta must lie in (0,1)");
    if (N < 1) throw std::domain_error("borel_cantelli_exponent: N must be >= 1");
    if (!(B1 > 0.0)) throw std::domain_error("borel_cantelli_exponent: B1 must be positive");
    const double excess = 1.0 / theta - 1.0;
    return B + B * static_cast<double>(N) * excess - static_cast<double>(N) * B1 * excess;
}

// The B1 at which the exponent crosses zero: B + B*theta/(N*(1-theta)).
// Decreases to B as N grows, squeezing the spectrum to the box dimension.
inline double bc_spectrum_bound(double B, int N, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("bc_spectrum_bound: theta must lie in (0,1)");
    if (N < 1) throw std::domain_error("bc_spectrum_bound: N must be >= 1");
    return B + B * theta / (static_cast<double>(N) * (1.0 - theta));
}

// ---- Monte-Carlo spectrum estimate ----------------------------------------------------------

struct McEstimate {
    double value = 0.0;
    double spread = 0.0;  // bootstrap standard deviation
    double survival_fraction = 0.0;
    int s_level = 0;
};

// Estimates the theta-spectrum by the maximal local growth exponent: for
// each surviving level-s cube position (s = floor(theta*depth)) average its
// exponent log(#level-depth descendants)/((depth-s) log n) across surviving
// trials, then take the max over positions. In the supercritical regime this
// tracks the box dimension B rather than the ambient d.
inline McEstimate empirical_spectrum_mc(const PercolationParams& params, double theta, int depth,
                                        int trials, std::uint64_t seed, int bootstrap = 200) {
    params.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("empirical_spectrum_mc: theta must lie in (0,1)");
    if (trials < 1) throw std::invalid_argument("empirical_spectrum_mc: trials must be >= 1");
    const int s = static_cast<int>(std::floor(theta * depth));
    if (s < 1 || depth - s < 2)
        throw std::invalid_argument("empirical_spectrum_mc: need >= 2 levels below level s >= 1");

    const std::int64_t fanout = params.cubes_per_level();
    std::int64_t shift = 1;
    for (int i = 0; i < depth - s; ++i) shift *= fanout;

    // per level-s position: the (trial, exponent) pairs where it survived
    std::map<std::int64_t, std::vector<std::pair<int, double>>> by_position;
    const double denom = static_cast<double>(depth - s) * std::log(static_cast<double>(params.n));
    int surviving = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const PercolationSample tree =
            sample(params, depth, key_combine(seed, static_cast<std::uint64_t>(trial)));
        const auto& leaves = tree.levels[static_cast<std::size_t>(depth)];
        if (leaves.empty()) continue;
        const int trial_id = surviving++;
        std::size_t i = 0;
        while (i < leaves.size()) {
            const std::int64_t position = leaves[i] / shift;
            std::size_t j = i;
            while (j < leaves.size() && leaves[j] / shift == position) ++j;
            by_position[position].emplace_back(trial_id, std::log(static_cast<double>(j - i)) / denom);
            i = j;
        }
    }
    if (surviving == 0)
        throw extinction_error("empirical_spectrum_mc: all " + std::to_string(trials) +
                               " trials extinct (survival fraction 0)");

    auto statistic = [&](const std::vector<int>& multiplicity) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [position, entries] : by_position) {
            double sum = 0.0;
            long count = 0;
            for (const auto& [trial_id, exponent] : entries) {
                sum += exponent * multiplicity[static_cast<std::size_t>(trial_id)];
                count += multiplicity[static_cast<std::size_t>(trial_id)];
            }
            if (count > 0) best = std::max(best, sum / static_cast<double>(count));
        }
        return best;
    };

    McEstimate out;
    out.s_level = s;
    out.survival_fraction = static_cast<double>(surviving) / static_cast<double>(trials);
    std::vector<int> ones(static_cast<std::size_t>(surviving), 1);
    out.value = statistic(ones);
    if (bootstrap > 1) {
        KeyedStream rng(key_combine(seed, 0xB007u));
        std::vector<double> stats;
        stats.reserve(static_cast<std::size_t>(bootstrap));
        std::vector<int> multiplicity(static_cast<std::size_t>(surviving));
        for (int rep = 0; rep < bootstrap; ++rep) {
            std::fill(multiplicity.begin(), multiplicity.end(), 0);
            for (int i = 0; i < surviving; ++i)
                ++multiplicity[rng.next_below(static_cast<std::size_t>(surviving))];
            stats.push_back(statistic(multiplicity));
        }
        out.spread = sample_stddev(stats);
    }
    return out;
}

} // namespace dimspec
