#include "cellmix/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "cellmix/csv.hpp"
#include "cellmix/error.hpp"

namespace cellmix {

// --- catalog / directory / registry ---------------------------------------

SegmentCatalog::SegmentCatalog(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (s.code.empty()) throw InputError("segment with empty code");
        if (!index_.emplace(s.code, i).second) throw InputError("duplicate segment code '" + s.code + "'");
    }
    for (const auto& s : segments_) {
        if (s.parent && !index_.contains(*s.parent))
            throw InputError("segment '" + s.code + "' refers to unknown parent '" + *s.parent + "'");
    }
    // Walking up from any node must terminate within |segments| steps.
    for (const auto& s : segments_) {
        const Segment* cur = &s;
        std::size_t steps = 0;
        while (cur->parent) {
            cur = &segments_[index_.at(*cur->parent)];
            if (++steps > segments_.size()) throw InputError("segment hierarchy has a cycle through '" + s.code + "'");
        }
    }
}

const Segment* SegmentCatalog::find(std::string_view code) const {
    auto it = index_.find(std::string(code));
    return it == index_.end() ? nullptr : &segments_[it->second];
}

std::string SegmentCatalog::name_of(std::string_view code) const {
    const Segment* s = find(code);
    return s && !s->name.empty() ? s->name : std::string(code);
}

ClientDirectory::ClientDirectory(std::vector<std::pair<std::string, std::string>> entries,
                                 const SegmentCatalog& catalog)
    : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& [client, segment] = entries_[i];
        if (client.empty()) throw InputError("client with empty id");
        if (!catalog.contains(segment))
            throw InputError("client '" + client + "' has unknown segment code '" + segment + "'");
        if (!index_.emplace(client, i).second) throw InputError("duplicate client id '" + client + "'");
    }
}

const std::string* ClientDirectory::segment_of(std::string_view client_id) const {
    auto it = index_.find(std::string(client_id));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

CellRegistry::CellRegistry(std::vector<Cell> cells) : cells_(std::move(cells)) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto& c = cells_[i];
        if (c.id.empty()) throw InputError("cell with empty id");
        if (c.capacity <= 0) throw InputError("cell '" + c.id + "' has non-positive capacity");
        if (!(c.latitude >= -90 && c.latitude <= 90) || !(c.longitude >= -180 && c.longitude <= 180))
            throw InputError("cell '" + c.id + "' has coordinates out of range");
        if (!index_.emplace(c.id, i).second) throw InputError("duplicate cell id '" + c.id + "'");
    }
}

const Cell* CellRegistry::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &cells_[it->second];
}

std::vector<std::string> CellRegistry::ids() const {
    std::vector<std::string> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) out.push_back(c.id);
    return out;
}

// --- timestamps -----------------------------------------------------------

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && p == s.data() + pos + len;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    int y, mo, d, h, mi, sec = 0;
    if (s.size() < 16) return std::nullopt;
    if (!read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' || !read_int(s, 8, 2, d))
        return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    if (!read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi)) return std::nullopt;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            const std::size_t start = pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
            if (pos == start) return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_timestamp(std::int64_t seconds) {
    using namespace std::chrono;
    std::int64_t days = seconds / 86400;
    std::int64_t rem = seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

// --- parsing --------------------------------------------------------------

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::string at_line(std::size_t line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

template <class T>
bool parse_number(const std::string& text, T& out) {
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

}  // namespace

CdrParseResult parse_cdr(std::istream& source, const ClientDirectory& directory, const CdrParseOptions& options) {
    CdrParseResult result;
    const auto table = csv::Table::read(source);
    if (table.header().empty()) {
        result.epoch = options.epoch.value_or(0);
        return result;
    }
    const std::size_t c_ts = table.require("timestamp");
    const std::size_t c_client = table.require("client_id");
    const std::size_t c_cell = table.require("cell_id");
    const std::size_t width = std::max({c_ts, c_client, c_cell}) + 1;

    struct Pending {
        std::size_t line;
        std::int64_t seconds;
        const std::string* client;
        const std::string* cell;
    };
    std::vector<Pending> pending;
    pending.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        if (row.fields.size() < width) {
            result.errors.push_back({row.line, at_line(row.line, "expected at least " + std::to_string(width) +
                                                                     " fields, got " + std::to_string(row.fields.size()))});
            continue;
        }
        const auto& client = row.fields[c_client];
        const auto& cell = row.fields[c_cell];
        if (client.empty() || cell.empty()) {
            result.errors.push_back({row.line, at_line(row.line, "empty client_id or cell_id")});
            continue;
        }
        const auto ts = parse_timestamp(row.fields[c_ts]);
        if (!ts) {
            result.errors.push_back({row.line, at_line(row.line, "malformed timestamp '" + row.fields[c_ts] + "'")});
            continue;
        }
        if (!directory.segment_of(client)) {
            result.errors.push_back({row.line, at_line(row.line, "unknown client_id '" + client + "'")});
            continue;
        }
        pending.push_back({row.line, *ts, &client, &cell});
    }

    if (options.epoch) {
        result.epoch = *options.epoch;
    } else if (!pending.empty()) {
        const auto earliest = std::min_element(pending.begin(), pending.end(),
                                               [](const Pending& a, const Pending& b) { return a.seconds < b.seconds; });
        result.epoch = floor_div(earliest->seconds, 86400) * 86400;
    }

    result.events.reserve(pending.size());
    for (const auto& p : pending) {
        const std::int64_t offset = p.seconds - result.epoch;
        if (offset < 0) {
            result.errors.push_back({p.line, at_line(p.line, "timestamp precedes the epoch")});
            continue;
        }
        if (offset % kSlotSeconds != 0) ++result.snapped;
        result.events.push_back(CdrEvent{*p.client, *p.cell, offset / kSlotSeconds});
    }
    return result;
}

SegmentCatalog parse_segments(std::istream& source) {
    const auto table = csv::Table::read(source);
    if (table.header().empty()) return SegmentCatalog{};
    const std::size_t c_code = table.require("segment_code");
    const auto c_name = table.find("name");
    const auto c_parent = table.find("parent_code");
    std::vector<Segment> segments;
    for (const auto& row : table.rows()) {
        auto field = [&](std::optional<std::size_t> c) -> std::string {
            return c && *c < row.fields.size() ? row.fields[*c] : std::string{};
        };
        Segment s;
        s.code = field(c_code);
        if (s.code.empty()) throw InputError(at_line(row.line, "empty segment_code"));
        s.name = field(c_name);
        if (s.name.empty()) s.name = s.code;
        if (auto p = field(c_parent); !p.empty()) s.parent = std::move(p);
        segments.push_back(std::move(s));
    }
    return SegmentCatalog(std::move(segments));
}

ClientDirectory parse_clients(std::istream& source, const SegmentCatalog& catalog) {
    const auto table = csv::Table::read(source);
    if (table.header().empty()) return ClientDirectory{};
    const std::size_t c_client = table.require("client_id");
    const std::size_t c_segment = table.require("segment_code");
    const std::size_t width = std::max(c_client, c_segment) + 1;
    std::vector<std::pair<std::string, std::string>> entries;
    entries.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        if (row.fields.size() < width) throw InputError(at_line(row.line, "too few fields"));
        const auto& segment = row.fields[c_segment];
        if (!catalog.contains(segment))
            throw InputError(at_line(row.line, "unknown segment code '" + segment + "'"));
        entries.emplace_back(row.fields[c_client], segment);
    }
    return ClientDirectory(std::move(entries), catalog);
}

CellRegistry parse_cells(std::istream& source) {
    const auto table = csv::Table::read(source);
    if (table.header().empty()) return CellRegistry{};
    const std::size_t c_id = table.require("cell_id");
    const std::size_t c_lat = table.require("latitude");
    const std::size_t c_lon = table.require("longitude");
    const std::size_t c_cap = table.require("capacity");
    const std::size_t width = std::max({c_id, c_lat, c_lon, c_cap}) + 1;
    std::vector<Cell> cells;
    for (const auto& row : table.rows()) {
        if (row.fields.size() < width) throw InputError(at_line(row.line, "too few fields"));
        Cell c;
        c.id = row.fields[c_id];
        if (!parse_number(row.fields[c_lat], c.latitude) || !parse_number(row.fields[c_lon], c.longitude))
            throw InputError(at_line(row.line, "malformed coordinates"));
        if (!parse_number(row.fields[c_cap], c.capacity))
            throw InputError(at_line(row.line, "capacity must be a positive integer, got '" + row.fields[c_cap] + "'"));
        cells.push_back(std::move(c));
    }
    try {
        return CellRegistry(std::move(cells));
    } catch (const InputError& e) {
        throw InputError(std::string("cells: ") + e.what());
    }
}

// --- aggregation ----------------------------------------------------------

FootprintTensor build_footprint(const std::vector<CdrEvent>& events, const ClientDirectory& directory,
                                const SegmentCatalog& catalog, const CellRegistry& registry) {
    // Segment order: catalog codes referenced by at least one client.
    std::set<std::string_view> referenced;
    for (const auto& [client, segment] : directory.entries()) referenced.insert(segment);
    std::vector<std::string> segments;
    std::unordered_map<std::string, std::size_t> segment_index;
    for (const auto& s : catalog.segments()) {
        if (referenced.contains(s.code)) {
            segment_index.emplace(s.code, segments.size());
            segments.push_back(s.code);
        }
    }

    std::unordered_map<std::string_view, std::uint32_t> cell_index;
    for (std::size_t j = 0; j < registry.cells().size(); ++j)
        cell_index.emplace(registry.cells()[j].id, static_cast<std::uint32_t>(j));

    std::unordered_map<std::string_view, std::uint32_t> client_index;
    std::vector<std::size_t> client_segment;
    for (const auto& [client, segment] : directory.entries()) {
        client_index.emplace(client, static_cast<std::uint32_t>(client_segment.size()));
        client_segment.push_back(segment_index.at(segment));
    }

    struct Triple {
        std::uint32_t slot, cell, client;
        auto operator<=>(const Triple&) const = default;
    };
    std::vector<Triple> triples;
    triples.reserve(events.size());
    std::set<std::string> unknown_cells;
    std::uint32_t slot_count = 0;
    for (const auto& e : events) {
        auto cit = cell_index.find(e.cell_id);
        if (cit == cell_index.end()) {
            unknown_cells.insert(e.cell_id);
            continue;
        }
        auto uit = client_index.find(e.client_id);
        if (uit == client_index.end()) throw InputError("event refers to unknown client_id '" + e.client_id + "'");
        if (e.slot < 0 || e.slot >= std::numeric_limits<std::uint32_t>::max())
            throw InputError("event slot out of range for client '" + e.client_id + "'");
        const auto slot = static_cast<std::uint32_t>(e.slot);
        triples.push_back({slot, cit->second, uit->second});
        slot_count = std::max(slot_count, slot + 1);
    }
    if (!unknown_cells.empty()) {
        std::string list;
        for (const auto& id : unknown_cells) list += (list.empty() ? "" : ", ") + id;
        throw InputError("events refer to cells missing from the registry: " + list);
    }

    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

    const std::size_t k = segments.size();
    std::vector<SlotCell> keys;
    std::vector<double> counts;
    std::vector<char> seen(client_segment.size(), 0);
    std::vector<double> totals(k, 0.0);
    for (const auto& t : triples) {
        const SlotCell key{t.slot, t.cell};
        if (keys.empty() || keys.back() != key) {
            keys.push_back(key);
            counts.resize(counts.size() + k, 0.0);
        }
        const std::size_t seg = client_segment[t.client];
        counts[(keys.size() - 1) * k + seg] += 1.0;
        if (!seen[t.client]) {
            seen[t.client] = 1;
            totals[seg] += 1.0;
        }
    }
    return FootprintTensor(std::move(segments), slot_count, registry.ids(), std::move(keys), std::move(counts),
                           std::move(totals));
}

FootprintTensor roll_up(const FootprintTensor& tensor, const SegmentCatalog& catalog) {
    std::vector<std::string> parents;
    std::vector<std::size_t> group_of;
    std::vector<std::string> orphans;
    for (const auto& code : tensor.segments()) {
        const Segment* s = catalog.find(code);
        if (!s || !s->parent) {
            orphans.push_back(code);
            continue;
        }
        group_of.push_back(0);  // resolved below
    }
    if (!orphans.empty()) {
        std::string list;
        for (const auto& c : orphans) list += (list.empty() ? "" : ", ") + c;
        throw InputError("cannot roll up: segments without a parent: " + list);
    }
    // Parents in catalog order.
    std::set<std::string> wanted;
    for (const auto& code : tensor.segments()) wanted.insert(*catalog.find(code)->parent);
    for (const auto& s : catalog.segments())
        if (wanted.contains(s.code)) parents.push_back(s.code);
    for (std::size_t i = 0; i < tensor.segment_count(); ++i) {
        const auto& parent = *catalog.find(tensor.segments()[i])->parent;
        group_of[i] = static_cast<std::size_t>(std::find(parents.begin(), parents.end(), parent) - parents.begin());
    }
    return regroup(tensor, group_of, std::move(parents));
}

}  // namespace cellmix
