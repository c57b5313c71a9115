// Finite-scale stand-in for a limsup/liminf: the per-index partial values of
// a limit expression plus extrema over a trailing window and over the whole
// range, so callers can judge convergence honestly.
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dimspec {

struct TruncatedLimit {
    std::vector<std::pair<long, double>> partials;  // (index k, partial value)
    double sup_tail = 0.0;   // max over the trailing window; limsup stand-in
    double inf_tail = 0.0;   // min over the trailing window; liminf stand-in
    double sup_all = 0.0;    // max over every partial
    double inf_all = 0.0;    // min over every partial
    long tail_begin = 0;     // first index of the trailing window
    std::optional<double> exact_limit;  // set when the true limit is computable

    // Builds the extrema from the partials; window = max(1, fraction of the
    // index range), anchored at the largest indices.
    static TruncatedLimit from_partials(std::vector<std::pair<long, double>> parts,
                                        double tail_fraction = 0.2) {
        if (parts.empty())
            throw std::invalid_argument("TruncatedLimit: partials must be nonempty");
        if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
            throw std::domain_error("TruncatedLimit: tail fraction must lie in (0,1]");
        TruncatedLimit out;
        out.partials = std::move(parts);
        auto window = static_cast<std::size_t>(
            std::max<double>(1.0, tail_fraction * static_cast<double>(out.partials.size())));
        window = std::min(window, out.partials.size());
        const std::size_t first = out.partials.size() - window;
        out.tail_begin = out.partials[first].first;
        out.sup_tail = out.inf_tail = out.partials[first].second;
        out.sup_all = out.inf_all = out.partials[0].second;
        for (std::size_t i = 0; i < out.partials.size(); ++i) {
            const double v = out.partials[i].second;
            out.sup_all = std::max(out.sup_all, v);
            out.inf_all = std::min(out.inf_all, v);
            if (i >= first) {
                out.sup_tail = std::max(out.sup_tail, v);
                out.inf_tail = std::min(out.inf_tail, v);
            }
        }
        return out;
    }
};

} // namespace dimspec
