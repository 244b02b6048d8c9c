#include "cellmix/granularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cellmix/error.hpp"

namespace cellmix {

namespace {

struct PairIndex {
    std::size_t keep;  // earlier position
    std::size_t drop;
};

PairIndex locate(const FootprintTensor& tensor, const std::string& a, const std::string& b) {
    if (a == b) throw InputError("cannot merge segment '" + a + "' with itself");
    const auto ia = tensor.segment_index(a);
    const auto ib = tensor.segment_index(b);
    if (!ia) throw InputError("unknown segment '" + a + "'");
    if (!ib) throw InputError("unknown segment '" + b + "'");
    return {std::min(*ia, *ib), std::max(*ia, *ib)};
}

std::vector<std::size_t> merge_map(std::size_t k, PairIndex p) {
    std::vector<std::size_t> group(k);
    for (std::size_t i = 0; i < k; ++i) group[i] = i < p.drop ? i : i - 1;
    group[p.drop] = p.keep;
    return group;
}

std::vector<std::string> merged_codes(const FootprintTensor& tensor, const std::string& a, const std::string& b,
                                      PairIndex p) {
    std::vector<std::string> codes = tensor.segments();
    codes[p.keep] = a + "+" + b;
    codes.erase(codes.begin() + static_cast<std::ptrdiff_t>(p.drop));
    return codes;
}

}  // namespace

FootprintTensor merge_segments(const FootprintTensor& tensor, const std::string& a, const std::string& b) {
    const auto p = locate(tensor, a, b);
    return regroup(tensor, merge_map(tensor.segment_count(), p), merged_codes(tensor, a, b, p));
}

PortfolioOptions merge_options(const FootprintTensor& tensor, const PortfolioOptions& options, const std::string& a,
                               const std::string& b) {
    const auto p = locate(tensor, a, b);
    PortfolioOptions out = options;
    if (options.traffic) out.traffic = merge_segments(*options.traffic, a, b);
    if (options.revenue_weights) {
        auto r = *options.revenue_weights;
        const double sa = tensor.totals()[p.keep];
        const double sb = tensor.totals()[p.drop];
        r[p.keep] = sa + sb > 0 ? (r[p.keep] * sa + r[p.drop] * sb) / (sa + sb) : (r[p.keep] + r[p.drop]) / 2;
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(p.drop));
        out.revenue_weights = std::move(r);
    }
    return out;
}

MergeSweep greedy_merge_sweep(const FootprintTensor& tensor, std::span<const double> capacities,
                              const PortfolioOptions& options) {
    if (tensor.segment_count() < 2) throw InputError("greedy merge needs at least two segments");
    MergeSweep sweep;
    sweep.initial_segments = tensor.segments();

    FootprintTensor cur = tensor;
    PortfolioOptions opts = options;
    auto solved = optimize(cur, capacities, opts);
    if (solved.status != lp::Status::optimal) {
        sweep.error = std::string("initial solve is ") + lp::to_string(solved.status);
        return sweep;
    }
    sweep.initial_max_obj = solved.max_obj;
    sweep.initial_x_star = solved.x_star;

    while (cur.segment_count() > 1) {
        const auto& codes = cur.segments();
        const auto& x = solved.x_star;
        std::pair<std::string, std::string> best_pair;
        double best_gap = std::numeric_limits<double>::infinity();
        bool have = false;
        for (std::size_t i = 0; i < codes.size(); ++i) {
            for (std::size_t j = i + 1; j < codes.size(); ++j) {
                const double gap = std::abs(x[i] - x[j]);
                auto pair = std::minmax(codes[i], codes[j]);
                std::pair<std::string, std::string> candidate{pair.first, pair.second};
                if (!have || gap < best_gap || (gap == best_gap && candidate < best_pair)) {
                    have = true;
                    best_gap = gap;
                    best_pair = std::move(candidate);
                }
            }
        }
        opts = merge_options(cur, opts, best_pair.first, best_pair.second);
        cur = merge_segments(cur, best_pair.first, best_pair.second);
        try {
            solved = optimize(cur, capacities, opts);
        } catch (const std::exception& e) {
            sweep.error = e.what();
            return sweep;
        }
        if (solved.status != lp::Status::optimal) {
            sweep.error = "solve after merging " + best_pair.first + " and " + best_pair.second + " is " +
                          lp::to_string(solved.status);
            return sweep;
        }
        MergeStep step;
        step.merged_pair = best_pair;
        step.new_code = best_pair.first + "+" + best_pair.second;
        step.segment_count_after = cur.segment_count();
        step.max_obj_after = solved.max_obj;
        step.x_star_after = solved.x_star;
        sweep.steps.push_back(std::move(step));
    }
    return sweep;
}

SegmentationComparison compare_segmentations(const std::vector<Segmentation>& segmentations,
                                             std::span<const double> capacities, const PortfolioOptions& options) {
    if (segmentations.empty()) throw InputError("no segmentations to compare");
    if (options.revenue_weights || options.traffic)
        throw InputError("segmentation comparison does not take per-segment revenue weights or traffic");
    const auto& ref = segmentations.front().tensor;
    SegmentationComparison out;
    std::size_t finest = 0;
    for (std::size_t s = 0; s < segmentations.size(); ++s) {
        const auto& seg = segmentations[s];
        if (!seg.tensor.same_loads(ref))
            throw InputError("segmentation '" + seg.label + "' does not describe the same population (N differs)");
        const auto res = optimize(seg.tensor, capacities, options);
        if (res.status != lp::Status::optimal)
            throw DomainError("segmentation '" + seg.label + "' LP is " + lp::to_string(res.status));
        out.rows.push_back({seg.label, seg.tensor.segment_count(), res.max_obj});
        if (seg.tensor.segment_count() > segmentations[finest].tensor.segment_count()) finest = s;
    }
    out.finest_label = segmentations[finest].label;
    if (segmentations[finest].tensor.segment_count() >= 2)
        out.finest_trajectory = greedy_merge_sweep(segmentations[finest].tensor, capacities, options);
    return out;
}

}  // namespace cellmix
