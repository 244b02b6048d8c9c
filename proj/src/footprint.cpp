#include "cellmix/footprint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cellmix {

FootprintTensor::FootprintTensor(std::vector<std::string> segments, std::uint32_t slot_count,
                                 std::vector<std::string> cells, std::vector<SlotCell> keys,
                                 std::vector<double> counts, std::vector<double> totals)
    : segments_(std::move(segments)),
      slot_count_(slot_count),
      cells_(std::move(cells)),
      totals_(std::move(totals)) {
    const std::size_t k = segments_.size();
    if (totals_.size() != k) throw std::invalid_argument("footprint: totals size differs from segment count");
    if (counts.size() != keys.size() * k) throw std::invalid_argument("footprint: counts size mismatch");
    for (double v : totals_) {
        if (!std::isfinite(v) || v < 0) throw std::invalid_argument("footprint: negative or non-finite total");
    }
    // Drop all-zero slices so that active() lists exactly the nonzero coordinates.
    for (std::size_t r = 0; r < keys.size(); ++r) {
        const SlotCell key = keys[r];
        if (key.slot >= slot_count_ || key.cell >= cells_.size())
            throw std::invalid_argument("footprint: coordinate out of range");
        if (!keys_.empty() && !(keys_.back() < key))
            throw std::invalid_argument("footprint: coordinates must be strictly increasing");
        double sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double v = counts[r * k + i];
            if (!std::isfinite(v) || v < 0) throw std::invalid_argument("footprint: negative or non-finite count");
            if (v > totals_[i])
                throw std::invalid_argument("footprint: segment '" + segments_[i] + "' exceeds its population at one cell");
            sum += v;
        }
        if (sum == 0) continue;
        keys_.push_back(key);
        counts_.insert(counts_.end(), counts.begin() + static_cast<std::ptrdiff_t>(r * k),
                       counts.begin() + static_cast<std::ptrdiff_t>((r + 1) * k));
        loads_.push_back(sum);
    }
}

std::span<const double> FootprintTensor::slice(std::size_t active_index) const {
    const std::size_t k = segments_.size();
    return std::span<const double>(counts_).subspan(active_index * k, k);
}

double FootprintTensor::at(std::size_t segment, std::uint32_t slot, std::size_t cell) const {
    const SlotCell key{slot, static_cast<std::uint32_t>(cell)};
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return 0.0;
    return slice(static_cast<std::size_t>(it - keys_.begin()))[segment];
}

double FootprintTensor::load(std::uint32_t slot, std::size_t cell) const {
    const SlotCell key{slot, static_cast<std::uint32_t>(cell)};
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return 0.0;
    return loads_[static_cast<std::size_t>(it - keys_.begin())];
}

double FootprintTensor::peak_load() const {
    return loads_.empty() ? 0.0 : *std::max_element(loads_.begin(), loads_.end());
}

double FootprintTensor::total_population() const { return std::accumulate(totals_.begin(), totals_.end(), 0.0); }

std::optional<std::size_t> FootprintTensor::segment_index(std::string_view code) const {
    for (std::size_t i = 0; i < segments_.size(); ++i)
        if (segments_[i] == code) return i;
    return std::nullopt;
}

std::optional<std::size_t> FootprintTensor::cell_index(std::string_view id) const {
    for (std::size_t j = 0; j < cells_.size(); ++j)
        if (cells_[j] == id) return j;
    return std::nullopt;
}

bool FootprintTensor::same_shape(const FootprintTensor& other) const {
    return segments_ == other.segments_ && cells_ == other.cells_ && slot_count_ == other.slot_count_;
}

bool FootprintTensor::same_loads(const FootprintTensor& other) const {
    return cells_ == other.cells_ && slot_count_ == other.slot_count_ && keys_ == other.keys_ &&
           loads_ == other.loads_;
}

FootprintTensor::Builder::Builder(std::vector<std::string> segments, std::uint32_t slot_count,
                                  std::vector<std::string> cells)
    : segments_(std::move(segments)),
      slot_count_(slot_count),
      cells_(std::move(cells)),
      totals_(segments_.size(), 0.0) {}

FootprintTensor::Builder& FootprintTensor::Builder::add(std::size_t segment, std::uint32_t slot, std::size_t cell,
                                                        double value) {
    if (segment >= segments_.size() || slot >= slot_count_ || cell >= cells_.size())
        throw std::out_of_range("footprint builder: index out of range");
    auto& s = slices_[SlotCell{slot, static_cast<std::uint32_t>(cell)}];
    if (s.empty()) s.assign(segments_.size(), 0.0);
    s[segment] += value;
    return *this;
}

FootprintTensor::Builder& FootprintTensor::Builder::set_total(std::size_t segment, double value) {
    totals_.at(segment) = value;
    return *this;
}

FootprintTensor FootprintTensor::Builder::build() && {
    std::vector<SlotCell> keys;
    std::vector<double> counts;
    keys.reserve(slices_.size());
    counts.reserve(slices_.size() * segments_.size());
    for (auto& [key, values] : slices_) {
        keys.push_back(key);
        counts.insert(counts.end(), values.begin(), values.end());
    }
    return FootprintTensor(std::move(segments_), slot_count_, std::move(cells_), std::move(keys),
                           std::move(counts), std::move(totals_));
}

FootprintTensor regroup(const FootprintTensor& tensor, std::span<const std::size_t> group_of,
                        std::vector<std::string> group_codes) {
    const std::size_t k = tensor.segment_count();
    const std::size_t g = group_codes.size();
    if (group_of.size() != k) throw std::invalid_argument("regroup: mapping size differs from segment count");
    for (std::size_t dst : group_of)
        if (dst >= g) throw std::invalid_argument("regroup: group index out of range");

    std::vector<double> counts(tensor.active().size() * g, 0.0);
    for (std::size_t r = 0; r < tensor.active().size(); ++r) {
        const auto src = tensor.slice(r);
        for (std::size_t i = 0; i < k; ++i) counts[r * g + group_of[i]] += src[i];
    }
    std::vector<double> totals(g, 0.0);
    for (std::size_t i = 0; i < k; ++i) totals[group_of[i]] += tensor.totals()[i];
    return FootprintTensor(std::move(group_codes), tensor.slot_count(), tensor.cells(), tensor.active(),
                           std::move(counts), std::move(totals));
}

}  // namespace cellmix
