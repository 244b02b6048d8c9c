#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cellmix/footprint.hpp"

namespace cellmix {

/// Length of one observation slot.
inline constexpr std::int64_t kSlotSeconds = 5 * 60;

/// One observation: a client served by a cell during a 5-minute slot.
struct CdrEvent {
    std::string client_id;
    std::string cell_id;
    std::int64_t slot = 0;

    bool operator==(const CdrEvent&) const = default;
};

struct Segment {
    std::string code;
    std::string name;
    std::optional<std::string> parent;

    bool operator==(const Segment&) const = default;
};

/// Ordered segment list with an optional parent hierarchy (subsegment -> segment).
class SegmentCatalog {
public:
    SegmentCatalog() = default;
    /// Throws InputError on duplicate codes, dangling parents or cycles.
    explicit SegmentCatalog(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const { return segments_; }
    const Segment* find(std::string_view code) const;
    bool contains(std::string_view code) const { return find(code) != nullptr; }
    /// Display name for a code, falling back to the code itself.
    std::string name_of(std::string_view code) const;

private:
    std::vector<Segment> segments_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// client_id -> segment code.
class ClientDirectory {
public:
    ClientDirectory() = default;
    /// Throws InputError when a segment code is not in the catalog or a client repeats.
    ClientDirectory(std::vector<std::pair<std::string, std::string>> entries, const SegmentCatalog& catalog);

    const std::string* segment_of(std::string_view client_id) const;
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Cell {
    std::string id;
    double latitude = 0;
    double longitude = 0;
    std::int64_t capacity = 0;  // persons served simultaneously

    bool operator==(const Cell&) const = default;
};

class CellRegistry {
public:
    CellRegistry() = default;
    /// Throws InputError on duplicate ids, non-positive capacity or bad coordinates.
    explicit CellRegistry(std::vector<Cell> cells);

    const std::vector<Cell>& cells() const { return cells_; }
    const Cell* find(std::string_view id) const;
    std::vector<std::string> ids() const;

private:
    std::vector<Cell> cells_;
    std::unordered_map<std::string, std::size_t> index_;
};

// --- timestamps -----------------------------------------------------------

/// Seconds since 1970-01-01T00:00 of a naive local ISO-8601 timestamp
/// ("YYYY-MM-DDTHH:MM[:SS[.frac]]", 'T' or a space as separator).
std::optional<std::int64_t> parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t seconds);

// --- CDR parsing ----------------------------------------------------------

struct RecordError {
    std::size_t line = 0;
    std::string message;
};

struct CdrParseOptions {
    /// Slot 0 starts here. When absent, midnight of the earliest timestamp is used.
    std::optional<std::int64_t> epoch;
};

struct CdrParseResult {
    std::vector<CdrEvent> events;
    std::size_t snapped = 0;  // off-grid timestamps floored to the 5-minute grid
    std::vector<RecordError> errors;
    std::int64_t epoch = 0;
};

/// Parses a CDR table with columns timestamp, client_id, cell_id (any order).
/// Bad rows are reported as record errors and skipped; events keep input order.
CdrParseResult parse_cdr(std::istream& source, const ClientDirectory& directory, const CdrParseOptions& options = {});

SegmentCatalog parse_segments(std::istream& source);
ClientDirectory parse_clients(std::istream& source, const SegmentCatalog& catalog);
CellRegistry parse_cells(std::istream& source);

// --- aggregation ----------------------------------------------------------

/// Counts distinct (client, slot, cell) triples per segment. Segments are the
/// catalog codes referenced by the directory, in catalog order; cells follow
/// the registry order. Throws InputError listing unknown cell ids.
FootprintTensor build_footprint(const std::vector<CdrEvent>& events, const ClientDirectory& directory,
                                const SegmentCatalog& catalog, const CellRegistry& registry);

/// Sums every segment into its catalog parent. Throws InputError if any
/// segment has no parent.
FootprintTensor roll_up(const FootprintTensor& tensor, const SegmentCatalog& catalog);

}  // namespace cellmix
