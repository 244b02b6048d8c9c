#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellmix {

/// A (time slot, cell) coordinate. Cell is an index into the tensor's cell order.
struct SlotCell {
    std::uint32_t slot = 0;
    std::uint32_t cell = 0;
    auto operator<=>(const SlotCell&) const = default;
};

/// Segment x slot x cell footprint S[i][t][j].
///
/// Stored sparsely by (t, j): only coordinates with at least one nonzero
/// count are kept, each holding a dense vector over segments. Absent
/// coordinates are all-zero slices. Values are persons for headcount
/// tensors and arbitrary non-negative loads for traffic tensors. Instances
/// are immutable once built.
class FootprintTensor {
public:
    class Builder;

    FootprintTensor() = default;
    FootprintTensor(std::vector<std::string> segments, std::uint32_t slot_count,
                    std::vector<std::string> cells, std::vector<SlotCell> keys,
                    std::vector<double> counts, std::vector<double> totals);

    std::size_t segment_count() const { return segments_.size(); }
    std::uint32_t slot_count() const { return slot_count_; }
    std::size_t cell_count() const { return cells_.size(); }
    const std::vector<std::string>& segments() const { return segments_; }
    const std::vector<std::string>& cells() const { return cells_; }

    /// Coordinates with a nonzero slice, sorted by (slot, cell).
    const std::vector<SlotCell>& active() const { return keys_; }
    std::span<const double> slice(std::size_t active_index) const;
    /// N[t][j] for the active coordinate.
    double load(std::size_t active_index) const { return loads_[active_index]; }

    double at(std::size_t segment, std::uint32_t slot, std::size_t cell) const;
    double load(std::uint32_t slot, std::size_t cell) const;
    double peak_load() const;

    /// S_i, the population of each segment over the whole window.
    const std::vector<double>& totals() const { return totals_; }
    double total_population() const;

    std::optional<std::size_t> segment_index(std::string_view code) const;
    std::optional<std::size_t> cell_index(std::string_view id) const;

    /// Same segments, cells and slot count.
    bool same_shape(const FootprintTensor& other) const;
    /// Same cells, slot count and every N[t][j] (segment split may differ).
    bool same_loads(const FootprintTensor& other) const;

    bool operator==(const FootprintTensor&) const = default;

    const std::vector<double>& raw_counts() const { return counts_; }

private:
    std::vector<std::string> segments_;
    std::uint32_t slot_count_ = 0;
    std::vector<std::string> cells_;
    std::vector<SlotCell> keys_;
    std::vector<double> counts_;  // keys_.size() x segments_.size(), row-major
    std::vector<double> loads_;
    std::vector<double> totals_;
};

class FootprintTensor::Builder {
public:
    Builder(std::vector<std::string> segments, std::uint32_t slot_count, std::vector<std::string> cells);

    Builder& add(std::size_t segment, std::uint32_t slot, std::size_t cell, double value);
    Builder& set_total(std::size_t segment, double value);
    FootprintTensor build() &&;

private:
    std::vector<std::string> segments_;
    std::uint32_t slot_count_;
    std::vector<std::string> cells_;
    std::map<SlotCell, std::vector<double>> slices_;
    std::vector<double> totals_;
};

/// Sums segments into groups: group_of[i] is the output index of input segment i.
/// Loads and the grand total are preserved exactly (integer-valued counts).
FootprintTensor regroup(const FootprintTensor& tensor, std::span<const std::size_t> group_of,
                        std::vector<std::string> group_codes);

}  // namespace cellmix
