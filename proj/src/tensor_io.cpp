#include "cellmix/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cellmix/error.hpp"
#include "json.hpp"

namespace cellmix::tensor_io {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void need(std::istream& in) {
    if (!in) throw InputError("tensor cache: truncated file");
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    need(in);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    need(in);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string get_str(std::istream& in) {
    const auto n = get_u32(in);
    if (n > (1u << 20)) throw InputError("tensor cache: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), n);
    need(in);
    return s;
}

}  // namespace

void write(std::ostream& out, const FootprintTensor& t) {
    out.write("CMFT", 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(t.segment_count()));
    put_u32(out, t.slot_count());
    put_u32(out, static_cast<std::uint32_t>(t.cell_count()));
    put_u64(out, t.active().size());
    for (const auto& s : t.segments()) put_str(out, s);
    for (const auto& c : t.cells()) put_str(out, c);
    for (double v : t.totals()) put_f64(out, v);
    for (const auto& key : t.active()) put_u32(out, key.slot);
    for (const auto& key : t.active()) put_u32(out, key.cell);
    for (double v : t.raw_counts()) put_f64(out, v);
}

FootprintTensor read(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CMFT", 4) != 0) throw InputError("tensor cache: not a footprint tensor file");
    const auto version = get_u32(in);
    if (version != kVersion) throw InputError("tensor cache: unsupported version " + std::to_string(version));
    const auto k = get_u32(in);
    const auto slots = get_u32(in);
    const auto cells = get_u32(in);
    const auto active = get_u64(in);
    if (k > (1u << 16) || cells > (1u << 24) || active > (1ull << 32)) throw InputError("tensor cache: implausible header");
    std::vector<std::string> segs(k), ids(cells);
    for (auto& s : segs) s = get_str(in);
    for (auto& c : ids) c = get_str(in);
    std::vector<double> totals(k);
    for (auto& v : totals) v = get_f64(in);
    std::vector<SlotCell> keys(active);
    for (auto& key : keys) key.slot = get_u32(in);
    for (auto& key : keys) key.cell = get_u32(in);
    std::vector<double> counts(active * k);
    for (auto& v : counts) v = get_f64(in);
    try {
        return FootprintTensor(std::move(segs), slots, std::move(ids), std::move(keys), std::move(counts),
                               std::move(totals));
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("tensor cache: ") + e.what());
    }
}

void save(const std::filesystem::path& path, const FootprintTensor& tensor) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    write(f, tensor);
    if (!f) throw InputError("failed writing " + path.string());
}

FootprintTensor load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path.string());
    return read(f);
}

std::string to_json_text(const FootprintTensor& t) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["kind"] = "footprint_tensor";
    doc["segments"] = t.segments();
    doc["cells"] = t.cells();
    doc["slot_count"] = t.slot_count();
    doc["totals"] = t.totals();
    auto& slices = doc["slices"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < t.active().size(); ++r) {
        const auto s = t.slice(r);
        slices.push_back({{"slot", t.active()[r].slot},
                          {"cell", t.cells()[t.active()[r].cell]},
                          {"counts", std::vector<double>(s.begin(), s.end())}});
    }
    return doc.dump(2);
}

}  // namespace cellmix::tensor_io
