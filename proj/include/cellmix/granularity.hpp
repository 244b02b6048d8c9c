#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellmix/footprint.hpp"
#include "cellmix/portfolio.hpp"

namespace cellmix {

struct MergeStep {
    std::pair<std::string, std::string> merged_pair;
    std::string new_code;
    std::size_t segment_count_after = 0;
    double max_obj_after = 0;
    std::vector<double> x_star_after;
};

struct MergeSweep {
    std::vector<std::string> initial_segments;
    double initial_max_obj = 0;
    std::vector<double> initial_x_star;
    std::vector<MergeStep> steps;
    std::optional<std::string> error;  // set when a solve failed; steps hold the partial trajectory
};

/// Replaces segments a and b by one segment "a+b" at the earlier position,
/// summing slices and totals. Throws InputError for unknown codes or a == b.
FootprintTensor merge_segments(const FootprintTensor& tensor, const std::string& a, const std::string& b);

/// Merges the same pair in the options: traffic slices are summed and the
/// revenue weight becomes the population-weighted mean.
PortfolioOptions merge_options(const FootprintTensor& tensor, const PortfolioOptions& options, const std::string& a,
                               const std::string& b);

/// Repeatedly solves and merges the pair with the closest raw scaling
/// coefficients (ties: lexicographically smallest code pair) until one
/// segment is left.
MergeSweep greedy_merge_sweep(const FootprintTensor& tensor, std::span<const double> capacities,
                              const PortfolioOptions& options);

struct Segmentation {
    std::string label;
    FootprintTensor tensor;
};

struct SegmentationRow {
    std::string label;
    std::size_t segment_count = 0;
    double max_obj = 0;
};

struct SegmentationComparison {
    std::vector<SegmentationRow> rows;
    std::string finest_label;
    MergeSweep finest_trajectory;
};

/// Objective per segmentation plus the greedy trajectory of the finest one.
/// All segmentations must describe the same population (identical N[t][j]);
/// per-segment options (revenue weights, traffic) are not accepted here.
SegmentationComparison compare_segmentations(const std::vector<Segmentation>& segmentations,
                                             std::span<const double> capacities, const PortfolioOptions& options);

}  // namespace cellmix
