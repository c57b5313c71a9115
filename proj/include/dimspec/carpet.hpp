// Bedford-McMullen carpets: the planar self-affine sets built on an m x n
// grid (2 <= m < n) from a digit set D of (column, row) pairs, via the maps
// (x, y) -> ((x + i)/m, (y + j)/n) for (i, j) in D.
//
// Closed forms implemented here, writing p = #distinct columns, d = #D,
// C_max / C_min = extreme rectangle counts over nonempty columns:
//   assouad   = log p / log m + log C_max / log n
//   box       = log p / log m + log(d/p) / log n
//   lower     = log p / log m + log C_min / log n
//   hausdorff = log( sum_i C_i^{log m / log n} ) / log m
// The spectra are affine-over-(1-theta) up to the single phase transition at
// theta = log m / log n and constant beyond it:
//   assouad_spectrum(theta) = min( (box - theta*K_max)/(1-theta), assouad )
//   lower_spectrum(theta)   = max( (box - theta*K_min)/(1-theta), lower )
// with K_max = log(d/C_max)/log m + log C_max/log n and K_min its C_min twin.
//
// Two independent count oracles back the closed forms: an exact symbolic
// product count over approximate-square cylinders, and a geometric
// brute-force box counter over the level-l1(r) cylinder rectangles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "spectrum.hpp"

namespace dimspec {

// ---- specification ---------------------------------------------------------

struct CarpetSpec {
    int m = 2;
    int n = 3;
    std::vector<std::pair<int, int>> rects;  // (column i < m, row j < n)

    void validate() const {
        if (m < 2) throw std::domain_error("CarpetSpec: m must be >= 2");
        if (n <= m) throw std::domain_error("CarpetSpec: n must exceed m");
        if (rects.size() < 2) throw std::invalid_argument("CarpetSpec: need at least two rectangles");
        for (auto [i, j] : rects) {
            if (i < 0 || i >= m || j < 0 || j >= n)
                throw std::domain_error("CarpetSpec: rectangle outside the m x n grid");
        }
        auto sorted = rects;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("CarpetSpec: duplicate rectangle");
    }
};

struct ColumnStats {
    std::vector<int> counts;  // rectangles per column, indexed 0..m-1
    int c_max = 0;
    int c_min = 0;            // over nonempty columns only
    int p_card = 0;           // number of nonempty columns
    int d_card = 0;           // total rectangles
};

inline ColumnStats column_stats(const CarpetSpec& spec) {
    spec.validate();
    ColumnStats st;
    st.counts.assign(static_cast<std::size_t>(spec.m), 0);
    for (auto [i, j] : spec.rects) {
        (void)j;
        ++st.counts[static_cast<std::size_t>(i)];
    }
    st.d_card = static_cast<int>(spec.rects.size());
    for (int c : st.counts) {
        if (c == 0) continue;
        ++st.p_card;
        st.c_max = std::max(st.c_max, c);
        st.c_min = st.c_min == 0 ? c : std::min(st.c_min, c);
    }
    return st;
}

// True when every nonempty column holds the same number of rectangles; all
// dimensions and both spectra then collapse to the box dimension.
inline bool uniform_fibres(const ColumnStats& st) { return st.c_max == st.c_min; }

// ---- dimensions and closed-form spectra --------------------------------------

inline DimensionSummary carpet_dimensions(const CarpetSpec& spec) {
    const ColumnStats st = column_stats(spec);
    const double lm = std::log(static_cast<double>(spec.m));
    const double ln = std::log(static_cast<double>(spec.n));
    const double col_term = std::log(static_cast<double>(st.p_card)) / lm;
    DimensionSummary dims;
    dims.ambient_dim = 2;
    dims.assouad = col_term + std::log(static_cast<double>(st.c_max)) / ln;
    dims.upper_box = col_term +
                     std::log(static_cast<double>(st.d_card) / static_cast<double>(st.p_card)) / ln;
    dims.lower_box = dims.upper_box;
    dims.lower = col_term + std::log(static_cast<double>(st.c_min)) / ln;
    double hsum = 0.0;
    for (int c : st.counts)
        if (c > 0) hsum += std::pow(static_cast<double>(c), lm / ln);
    dims.hausdorff = std::log(hsum) / lm;
    dims.modified_lower = dims.hausdorff;
    return dims;
}

namespace detail {

struct CarpetClosedForm {
    DimensionSummary dims;
    double ratio = 0.0;          // log m / log n, the phase transition
    double assouad_inner = 0.0;  // K_max
    double lower_inner = 0.0;    // K_min

    double assouad_at(double theta) const {
        if (theta >= ratio) return dims.assouad;
        return std::min((dims.upper_box - theta * assouad_inner) / (1.0 - theta), dims.assouad);
    }

    double lower_at(double theta) const {
        if (theta >= ratio) return dims.lower;
        return std::max((dims.upper_box - theta * lower_inner) / (1.0 - theta), dims.lower);
    }
};

inline CarpetClosedForm carpet_closed_form(const CarpetSpec& spec) {
    const ColumnStats st = column_stats(spec);
    const double lm = std::log(static_cast<double>(spec.m));
    const double ln = std::log(static_cast<double>(spec.n));
    CarpetClosedForm cf;
    cf.dims = carpet_dimensions(spec);
    cf.ratio = lm / ln;
    cf.assouad_inner =
        std::log(static_cast<double>(st.d_card) / static_cast<double>(st.c_max)) / lm +
        std::log(static_cast<double>(st.c_max)) / ln;
    cf.lower_inner =
        std::log(static_cast<double>(st.d_card) / static_cast<double>(st.c_min)) / lm +
        std::log(static_cast<double>(st.c_min)) / ln;
    return cf;
}

} // namespace detail

inline double assouad_spectrum(const CarpetSpec& spec, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("assouad_spectrum: theta must lie in (0,1)");
    return detail::carpet_closed_form(spec).assouad_at(theta);
}

inline double lower_spectrum(const CarpetSpec& spec, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("lower_spectrum: theta must lie in (0,1)");
    return detail::carpet_closed_form(spec).lower_at(theta);
}

// Both spectra reconstructed from the grid ratio log m / log n and the
// dimension summary alone; identical to the direct formulas. The pair is
// (assouad value, lower value).
inline std::pair<double, double> spectrum_from_dims(double ratio, const DimensionSummary& dims,
                                                    double theta) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::domain_error("spectrum_from_dims: ratio must lie in (0,1)");
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("spectrum_from_dims: theta must lie in (0,1)");
    dims.validate();
    if (theta >= ratio) return {dims.assouad, dims.lower};
    const double inner_a = dims.assouad - (dims.assouad - dims.upper_box) / ratio;
    const double inner_l = dims.lower + (dims.upper_box - dims.lower) / ratio;
    const double a = std::min((dims.upper_box - theta * inner_a) / (1.0 - theta), dims.assouad);
    const double l = std::max((dims.upper_box - theta * inner_l) / (1.0 - theta), dims.lower);
    return {a, l};
}

namespace detail {

inline std::string carpet_form_string(const char* op, double box, double inner, double flat,
                                      double ratio, bool bends) {
    char buf[160];
    if (bends) {
        std::snprintf(buf, sizeof buf, "%s((%.12g - %.12g*theta)/(1 - theta), %.12g); transition at %.12g",
                      op, box, inner, flat, ratio);
    } else {
        std::snprintf(buf, sizeof buf, "constant %.12g (uniform fibres)", flat);
    }
    return buf;
}

} // namespace detail

inline SpectrumCurve assouad_curve(const CarpetSpec& spec, const ThetaGrid& grid) {
    const auto cf = detail::carpet_closed_form(spec);
    auto curve = sample_curve(grid, SpectrumKind::assouad, 2,
                              [&](double theta) { return cf.assouad_at(theta); });
    const bool bends = cf.dims.assouad > cf.dims.upper_box + 1e-15;
    if (bends) curve.transitions = {cf.ratio};
    curve.closed_form = detail::carpet_form_string("min", cf.dims.upper_box, cf.assouad_inner,
                                                   cf.dims.assouad, cf.ratio, bends);
    return curve;
}

inline SpectrumCurve lower_curve(const CarpetSpec& spec, const ThetaGrid& grid) {
    const auto cf = detail::carpet_closed_form(spec);
    auto curve = sample_curve(grid, SpectrumKind::lower, 2,
                              [&](double theta) { return cf.lower_at(theta); });
    const bool bends = cf.dims.upper_box > cf.dims.lower + 1e-15;
    if (bends) curve.transitions = {cf.ratio};
    curve.closed_form = detail::carpet_form_string("max", cf.dims.upper_box, cf.lower_inner,
                                                   cf.dims.lower, cf.ratio, bends);
    return curve;
}

// ---- scale indices ----------------------------------------------------------

struct ScaleIndices {
    int l1 = 0;  // m^{-l1} <= r < m^{-l1+1}
    int l2 = 0;  // n^{-l2} <= r < n^{-l2+1}
};

inline ScaleIndices scale_indices(double r, int m, int n) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("scale_indices: r must lie in (0,1)");
    if (m < 2 || n <= m) throw std::domain_error("scale_indices: need 2 <= m < n");
    auto index_for = [r](int base) {
        // smallest l >= 1 with base^{-l} <= r; compared as r * base^l >= 1 in
        // extended precision so exact powers land on the inclusive side.
        auto reaches = [r, base](int l) {
            long double p = 1.0L;
            for (int i = 0; i < l; ++i) p *= static_cast<long double>(base);
            return static_cast<long double>(r) * p >= 1.0L;
        };
        int l = std::max(1, static_cast<int>(std::ceil(
                                -std::log(r) / std::log(static_cast<double>(base)) - 1e-9)));
        while (!reaches(l)) ++l;
        while (l > 1 && reaches(l - 1)) --l;
        return l;
    };
    ScaleIndices idx;
    idx.l1 = index_for(m);
    idx.l2 = index_for(n);
    return idx;
}

// ---- symbolic words ---------------------------------------------------------

// A point of the carpet addressed symbolically: a finite prefix of digits
// followed by an optional repeating cycle, so extremal words (for instance
// "stay in the fullest column forever") are finitely describable.
struct Word {
    std::vector<std::pair<int, int>> prefix;
    std::vector<std::pair<int, int>> cycle;

    static Word repeat(std::pair<int, int> letter) {
        Word w;
        w.cycle = {letter};
        return w;
    }

    bool covers(long count) const {
        return !cycle.empty() || static_cast<long>(prefix.size()) >= count;
    }

    // 1-based letter access.
    std::pair<int, int> letter(long index) const {
        if (index < 1) throw std::invalid_argument("Word: letter indices start at 1");
        const std::size_t i = static_cast<std::size_t>(index - 1);
        if (i < prefix.size()) return prefix[i];
        if (cycle.empty())
            throw insufficient_data_error("Word: index past the end of a finite word");
        return cycle[(i - prefix.size()) % cycle.size()];
    }

    void validate(const CarpetSpec& spec) const {
        auto check = [&](const std::vector<std::pair<int, int>>& part) {
            for (auto letter : part)
                if (std::find(spec.rects.begin(), spec.rects.end(), letter) == spec.rects.end())
                    throw std::invalid_argument("Word: letter is not a rectangle of the carpet");
        };
        check(prefix);
        check(cycle);
        if (prefix.empty() && cycle.empty())
            throw std::invalid_argument("Word: empty word");
    }
};

// The word that stays forever in a fullest column; realizes the Assouad
// spectrum's extremal covering counts.
inline Word densest_column_word(const CarpetSpec& spec) {
    const ColumnStats st = column_stats(spec);
    for (int i = 0; i < spec.m; ++i) {
        if (st.counts[static_cast<std::size_t>(i)] != st.c_max) continue;
        for (auto rect : spec.rects)
            if (rect.first == i) return Word::repeat(rect);
    }
    throw std::logic_error("densest_column_word: unreachable");
}

// ---- symbolic cover count ---------------------------------------------------

// Exact product count of the level-l1(r) cylinders inside the approximate
// square around the word at scale R, split at the phase transition: for
// theta below log m / log n the branching runs through full digit freedom
// between l1(R) and l2(r) and column freedom below, while at or above the
// transition only the column digits between l2(R) and l2(r) plus the free
// columns contribute. Comparable to any true covering count up to constants.
inline double symbolic_cover_count(const CarpetSpec& spec, const Word& word, double R,
                                   double theta) {
    spec.validate();
    word.validate(spec);
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("symbolic_cover_count: theta must lie in (0,1)");
    if (!(R > 0.0 && R < 1.0)) throw std::domain_error("symbolic_cover_count: R must lie in (0,1)");
    const double small = std::pow(R, 1.0 / theta);
    if (!(small > 0.0))
        throw std::domain_error("symbolic_cover_count: R^{1/theta} underflows");
    const ScaleIndices big = scale_indices(R, spec.m, spec.n);
    const ScaleIndices sm = scale_indices(small, spec.m, spec.n);
    const ColumnStats st = column_stats(spec);
    const double ratio = std::log(static_cast<double>(spec.m)) / std::log(static_cast<double>(spec.n));
    const bool steep = theta >= ratio - 1e-12;
    const long need = steep ? sm.l2 : sm.l1;
    if (!word.covers(need))
        throw insufficient_data_error("symbolic_cover_count: word shorter than index " +
                                      std::to_string(need));
    double count = 1.0;
    if (steep) {
        for (int l = big.l2 + 1; l <= sm.l2; ++l)
            count *= static_cast<double>(st.counts[static_cast<std::size_t>(word.letter(l).first)]);
        count *= std::pow(static_cast<double>(st.p_card), std::max(0, sm.l1 - big.l1));
    } else {
        for (int l = big.l2 + 1; l <= big.l1; ++l)
            count *= static_cast<double>(st.counts[static_cast<std::size_t>(word.letter(l).first)]);
        count *= std::pow(static_cast<double>(st.d_card), std::max(0, sm.l2 - big.l1));
        count *= std::pow(static_cast<double>(st.p_card), std::max(0, sm.l1 - sm.l2));
    }
    return count;
}

// ---- geometric covering oracle ----------------------------------------------

struct CoverOptions {
    int level_cap = 24;                    // maximum l1(r)
    std::uint64_t max_nodes = 200000000;  // enumeration budget
};

namespace detail {

// Depth-first sweep over the y-digit tree of one x-column. Node (level, a)
// spans the y-interval [a + smin, a + smax + 1) * n^{-level-ish} in units of
// n^{-l1(r)}; once that extent fits inside one r-cell (or crosses at most one
// grid line) every cell in range is met by an actual cylinder, so the range
// is emitted without descending further. Cell arithmetic is exact:
// y * m^{l1(r)} compared against k * n^{l1(r)} in 128-bit integers.
struct CoverWalker {
    int leaf = 0;  // l1(r)
    int n = 0;
    std::int64_t m_pow = 0;  // m^{l1(r)}
    __int128 den = 0;        // n^{l1(r)}
    const std::vector<std::int64_t>* npow = nullptr;
    const std::vector<const std::vector<int>*>* rows = nullptr;
    const std::vector<std::int64_t>* smin = nullptr;
    const std::vector<std::int64_t>* smax = nullptr;
    std::uint64_t max_nodes = 0;
    std::uint64_t nodes = 0;
    std::int64_t last = -1;  // highest cell emitted in the current column
    double cells = 0.0;

    void walk(int level, std::int64_t a) {
        if (++nodes > max_nodes) throw resource_error("covering_oracle: node budget exceeded");
        const std::int64_t span = (*npow)[static_cast<std::size_t>(leaf - level)];
        const __int128 lo = static_cast<__int128>(a * span + (*smin)[static_cast<std::size_t>(level)]) * m_pow;
        const __int128 hi = static_cast<__int128>(a * span + (*smax)[static_cast<std::size_t>(level)] + 1) * m_pow;
        std::int64_t kmin = static_cast<std::int64_t>(lo / den);
        std::int64_t kmax = static_cast<std::int64_t>(hi / den);
        if (hi - lo < den || kmax - kmin <= 1) {
            if (lo > 0 && lo == static_cast<__int128>(kmin) * den) --kmin;  // bottom edge on a grid line
            kmin = std::max<std::int64_t>(kmin, 0);
            kmax = std::min<std::int64_t>(kmax, m_pow - 1);
            const std::int64_t from = std::max(kmin, last + 1);
            if (kmax >= from) {
                cells += static_cast<double>(kmax - from + 1);
                last = kmax;
            }
            return;
        }
        for (int j : *(*rows)[static_cast<std::size_t>(level + 1)]) walk(level + 1, a * n + j);
    }
};

} // namespace detail

// Counts the side-r grid boxes (within the unit square) met by the union of
// the level-l1(r) cylinders lying inside the approximate square around the
// center word at scale R. Scales snap to exact grid powers via scale_indices
// first, so all geometry is integer. Agrees with symbolic_cover_count up to
// a constant factor independent of R.
inline double covering_oracle(const CarpetSpec& spec, const Word& center, double R, double r,
                              const CoverOptions& opts = {}) {
    spec.validate();
    center.validate(spec);
    if (!(r > 0.0 && r < R && R < 1.0))
        throw std::domain_error("covering_oracle: need 0 < r < R < 1");
    const ScaleIndices big = scale_indices(R, spec.m, spec.n);
    const ScaleIndices small = scale_indices(r, spec.m, spec.n);
    const int l1R = big.l1, l2R = big.l2, l1r = small.l1;
    if (l1r > opts.level_cap)
        throw resource_error("covering_oracle: level " + std::to_string(l1r) + " exceeds cap " +
                             std::to_string(opts.level_cap));
    if (static_cast<double>(l1r) * std::log2(static_cast<double>(spec.n)) >= 62.0)
        throw resource_error("covering_oracle: scales too deep for exact integer geometry");
    if (!center.covers(l1R))
        throw insufficient_data_error("covering_oracle: center word shorter than l1(R)");

    std::vector<std::vector<int>> rows_by_col(static_cast<std::size_t>(spec.m));
    for (auto [i, j] : spec.rects) rows_by_col[static_cast<std::size_t>(i)].push_back(j);
    std::vector<int> columns;
    for (int i = 0; i < spec.m; ++i) {
        auto& rw = rows_by_col[static_cast<std::size_t>(i)];
        if (rw.empty()) continue;
        std::sort(rw.begin(), rw.end());
        columns.push_back(i);
    }

    std::vector<std::int64_t> npow(static_cast<std::size_t>(l1r) + 1, 1);
    for (std::size_t k = 1; k < npow.size(); ++k) npow[k] = npow[k - 1] * spec.n;
    std::int64_t m_pow = 1;
    for (int k = 0; k < l1r; ++k) m_pow *= spec.m;

    // fixed digits: the center pins x to depth l1(R) and y to depth l2(R)
    std::int64_t a0 = 0;
    for (int l = 1; l <= l2R; ++l) a0 = a0 * spec.n + center.letter(l).second;
    std::vector<const std::vector<int>*> rows(static_cast<std::size_t>(l1r) + 1, nullptr);
    for (int l = l2R + 1; l <= l1R; ++l)
        rows[static_cast<std::size_t>(l)] = &rows_by_col[static_cast<std::size_t>(center.letter(l).first)];

    std::vector<std::int64_t> smin(static_cast<std::size_t>(l1r) + 1, 0);
    std::vector<std::int64_t> smax(static_cast<std::size_t>(l1r) + 1, 0);

    detail::CoverWalker walker;
    walker.leaf = l1r;
    walker.n = spec.n;
    walker.m_pow = m_pow;
    walker.den = static_cast<__int128>(npow[static_cast<std::size_t>(l1r)]);
    walker.npow = &npow;
    walker.rows = &rows;
    walker.smin = &smin;
    walker.smax = &smax;
    walker.max_nodes = opts.max_nodes;

    const int free_levels = l1r - l1R;
    std::vector<std::size_t> odo(static_cast<std::size_t>(std::max(free_levels, 0)), 0);
    while (true) {
        for (int f = 0; f < free_levels; ++f)
            rows[static_cast<std::size_t>(l1R + 1 + f)] =
                &rows_by_col[static_cast<std::size_t>(columns[odo[static_cast<std::size_t>(f)]])];
        for (int L = l1r - 1; L >= l2R; --L) {
            const auto& rw = *rows[static_cast<std::size_t>(L + 1)];
            smin[static_cast<std::size_t>(L)] =
                smin[static_cast<std::size_t>(L + 1)] + npow[static_cast<std::size_t>(l1r - L - 1)] * rw.front();
            smax[static_cast<std::size_t>(L)] =
                smax[static_cast<std::size_t>(L + 1)] + npow[static_cast<std::size_t>(l1r - L - 1)] * rw.back();
        }
        walker.last = -1;
        walker.walk(l2R, a0);

        int f = free_levels - 1;
        while (f >= 0 && ++odo[static_cast<std::size_t>(f)] == columns.size()) {
            odo[static_cast<std::size_t>(f)] = 0;
            --f;
        }
        if (f < 0) break;
    }
    return walker.cells;
}

// ---- distinguishing carpets -------------------------------------------------

struct DistinguishResult {
    double assouad = 0.0;  // sup over the grid of |spectrumA - spectrumB|
    double lower = 0.0;
};

// Sup-distance between the closed-form spectra of two carpets; a positive
// assouad distance with matching dimension summaries certifies the carpets
// are not bi-Lipschitz equivalent.
inline DistinguishResult distinguish(const CarpetSpec& a, const CarpetSpec& b,
                                     const ThetaGrid& grid) {
    grid.validate();
    const auto ca = detail::carpet_closed_form(a);
    const auto cb = detail::carpet_closed_form(b);
    DistinguishResult out;
    for (double theta : grid.points) {
        out.assouad = std::max(out.assouad, std::fabs(ca.assouad_at(theta) - cb.assouad_at(theta)));
        out.lower = std::max(out.lower, std::fabs(ca.lower_at(theta) - cb.lower_at(theta)));
    }
    return out;
}

} // namespace dimspec
