#include "cellmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "cellmix/error.hpp"
#include "json.hpp"

namespace cellmix::synth {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

void SynthConfig::validate() const {
    if (cells.empty()) throw InputError("synth: at least one cell is required");
    if (segments.empty()) throw InputError("synth: at least one segment is required");
    if (days < 1 || slots_per_day < 1) throw InputError("synth: days and slots_per_day must be positive");
    if (!(activity_rate > 0 && activity_rate <= 1)) throw InputError("synth: activity_rate must lie in (0, 1]");
    if (!parse_timestamp(epoch)) throw InputError("synth: malformed epoch '" + epoch + "'");
    for (const auto& s : segments) {
        if (s.population <= 0) throw InputError("synth: segment '" + s.code + "' needs a positive population");
        for (const auto* w : {&s.home_cell_weights, &s.work_cell_weights}) {
            if (w->size() != cells.size())
                throw InputError("synth: segment '" + s.code + "' needs one weight per cell");
            double sum = 0;
            for (double v : *w) {
                if (!(v >= 0) || !std::isfinite(v)) throw InputError("synth: negative weight in '" + s.code + "'");
                sum += v;
            }
            if (sum <= 0) throw InputError("synth: all-zero weights in '" + s.code + "'");
        }
    }
}

namespace {

constexpr double kGolden = 0.6180339887498948482;   // (sqrt(5) - 1) / 2
constexpr double kSilver = 0.41421356237309504880;  // sqrt(2) - 1

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::size_t pick(const std::vector<double>& weights, double u) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double acc = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0) continue;
        acc += weights[j] / total;
        if (u < acc) return j;
    }
    for (std::size_t j = weights.size(); j-- > 0;)
        if (weights[j] > 0) return j;
    return 0;
}

bool work_slot(int slot_of_day, int slots_per_day) {
    // [08:00, 18:00) as a fraction of the day.
    return slot_of_day * 24 >= 8 * slots_per_day && slot_of_day * 24 < 18 * slots_per_day;
}

std::string client_id(const std::string& code, std::int64_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return code + "-" + digits;
}

}  // namespace

SynthData generate(const SynthConfig& config) {
    config.validate();
    SynthData out;
    out.epoch = *parse_timestamp(config.epoch);

    std::vector<Segment> catalog = config.parents;
    for (const auto& s : config.segments) catalog.push_back(Segment{s.code, s.name.empty() ? s.code : s.name, s.parent});
    out.catalog = SegmentCatalog(std::move(catalog));
    out.registry = CellRegistry(config.cells);

    std::vector<std::pair<std::string, std::string>> clients;
    const int total_slots = config.days * config.slots_per_day;
    for (const auto& seg : config.segments) {
        const std::uint64_t seg_hash = fnv1a64(seg.code);
        std::uint64_t st = config.seed ^ seg_hash;
        const double home_offset = unit_double(splitmix64(st));
        const double work_offset = unit_double(splitmix64(st));
        for (std::int64_t c = 0; c < seg.population; ++c) {
            const std::string id = client_id(seg.code, c);
            clients.emplace_back(id, seg.code);
            const double n = static_cast<double>(c + 1);
            const std::size_t home = pick(seg.home_cell_weights, std::fmod(home_offset + n * kGolden, 1.0));
            const std::size_t work = pick(seg.work_cell_weights, std::fmod(work_offset + n * kSilver, 1.0));

            std::uint64_t cs = config.seed ^ (seg_hash * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(c);
            splitmix64(cs);
            std::mt19937_64 gen(splitmix64(cs));
            for (int slot = 0; slot < total_slots; ++slot) {
                if (!(unit_double(gen()) < config.activity_rate)) continue;
                const bool at_work = work_slot(slot % config.slots_per_day, config.slots_per_day);
                out.events.push_back(CdrEvent{id, config.cells[at_work ? work : home].id, slot});
            }
        }
    }
    std::sort(out.events.begin(), out.events.end(), [](const CdrEvent& a, const CdrEvent& b) {
        return a.slot != b.slot ? a.slot < b.slot : a.client_id < b.client_id;
    });
    out.directory = ClientDirectory(std::move(clients), out.catalog);
    return out;
}

SynthConfig scale_population(const SynthConfig& config, std::string_view segment, double factor) {
    if (!(factor > 0) || !std::isfinite(factor)) throw InputError("scale factor must be positive");
    SynthConfig out = config;
    for (auto& s : out.segments) {
        if (s.code != segment) continue;
        const auto scaled = static_cast<std::int64_t>(std::llround(static_cast<double>(s.population) * factor));
        if (scaled <= 0) throw InputError("scaling '" + s.code + "' leaves no clients");
        s.population = scaled;
        return out;
    }
    throw InputError("unknown segment '" + std::string(segment) + "'");
}

void write_files(const SynthData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw InputError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("cdr.csv");
        f << "timestamp,client_id,cell_id\n";
        for (const auto& e : data.events)
            f << format_timestamp(data.epoch + e.slot * kSlotSeconds) << ',' << e.client_id << ',' << e.cell_id << '\n';
    }
    {
        auto f = open("clients.csv");
        f << "client_id,segment_code\n";
        for (const auto& [client, seg] : data.directory.entries()) f << client << ',' << seg << '\n';
    }
    {
        auto f = open("segments.csv");
        f << "segment_code,name,parent_code\n";
        for (const auto& s : data.catalog.segments()) f << s.code << ',' << s.name << ',' << s.parent.value_or("") << '\n';
    }
    {
        auto f = open("cells.csv");
        f.precision(10);
        f << "cell_id,latitude,longitude,capacity\n";
        for (const auto& c : data.registry.cells())
            f << c.id << ',' << c.latitude << ',' << c.longitude << ',' << c.capacity << '\n';
    }
}

SynthConfig config_from_json(std::string_view text) {
    using nlohmann::json;
    SynthConfig cfg;
    try {
        const auto doc = json::parse(text);
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.days = doc.value("days", cfg.days);
        cfg.slots_per_day = doc.value("slots_per_day", cfg.slots_per_day);
        cfg.activity_rate = doc.value("activity_rate", cfg.activity_rate);
        cfg.epoch = doc.value("epoch", cfg.epoch);
        for (const auto& c : doc.at("cells")) {
            cfg.cells.push_back(Cell{c.at("cell_id").get<std::string>(), c.value("latitude", 0.0),
                                     c.value("longitude", 0.0), c.at("capacity").get<std::int64_t>()});
        }
        if (doc.contains("parents")) {
            for (const auto& p : doc.at("parents"))
                cfg.parents.push_back(Segment{p.at("segment_code").get<std::string>(),
                                              p.value("name", p.at("segment_code").get<std::string>()), std::nullopt});
        }
        for (const auto& s : doc.at("segments")) {
            SegmentSpec spec;
            spec.code = s.at("segment_code").get<std::string>();
            spec.name = s.value("name", spec.code);
            if (s.contains("parent_code") && !s.at("parent_code").is_null())
                spec.parent = s.at("parent_code").get<std::string>();
            spec.population = s.at("population").get<std::int64_t>();
            spec.home_cell_weights = s.at("home_cell_weights").get<std::vector<double>>();
            spec.work_cell_weights = s.at("work_cell_weights").get<std::vector<double>>();
            cfg.segments.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("synth config: ") + e.what());
    }
    return cfg;
}

SynthConfig demo_config() {
    SynthConfig c;
    c.parents = {{"Y", "Young", std::nullopt}, {"F", "Families", std::nullopt}, {"S", "Seniors", std::nullopt}};
    for (int j = 0; j < 8; ++j) c.cells.push_back({"c" + std::to_string(j + 1), 47.0 + 0.01 * j, 19.0 + 0.01 * j, 120});
    const char* parents[] = {"Y", "F", "S"};
    for (int i = 0; i < 12; ++i) {
        SegmentSpec s;
        s.code = std::string(parents[i / 4]) + std::to_string(i % 4 + 1);
        s.name = s.code;
        s.parent = parents[i / 4];
        s.population = 60 + 15 * ((i * 7) % 12);
        for (int j = 0; j < 8; ++j) {
            s.home_cell_weights.push_back(1.0 + ((i + 3 * j) % 5));
            s.work_cell_weights.push_back(1.0 + ((2 * i + j) % 7));
        }
        c.segments.push_back(std::move(s));
    }
    c.activity_rate = 0.3;
    return c;
}


}  // namespace cellmix::synth
