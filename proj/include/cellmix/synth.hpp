#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellmix/ingest.hpp"

namespace cellmix::synth {

/// SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);
/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view text);

struct SegmentSpec {
    std::string code;
    std::string name;
    std::optional<std::string> parent;
    std::int64_t population = 0;
    std::vector<double> home_cell_weights;  // one per cell
    std::vector<double> work_cell_weights;
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::vector<SegmentSpec> segments;
    /// Root segments referenced as parents; they hold no clients themselves.
    std::vector<Segment> parents;
    std::vector<Cell> cells;
    int days = 1;
    int slots_per_day = 288;
    double activity_rate = 0.5;
    std::string epoch = "2016-03-07T00:00:00";

    /// Throws InputError describing the first violated constraint.
    void validate() const;
};

struct SynthData {
    std::vector<CdrEvent> events;  // ordered by (slot, client_id)
    ClientDirectory directory;
    SegmentCatalog catalog;
    CellRegistry registry;
    std::int64_t epoch = 0;
};

/// Each client gets a home and a work cell and follows a fixed daily
/// schedule (work from 08:00 to 18:00, home otherwise), generating traffic
/// in a slot with probability activity_rate. Cell choices walk a per-segment
/// Weyl sequence so that every population prefix tracks the weights closely;
/// activity comes from std::mt19937_64 seeded per client through SplitMix64.
/// Identical configs give identical output.
SynthData generate(const SynthConfig& config);

/// Copy of the config with one segment's population multiplied and rounded.
/// Existing clients keep their identities and draws.
SynthConfig scale_population(const SynthConfig& config, std::string_view segment, double factor);

/// Writes cdr.csv, clients.csv, segments.csv and cells.csv into `dir`.
void write_files(const SynthData& data, const std::filesystem::path& dir);

/// Twelve subsegments under three parents over eight cells.
SynthConfig demo_config();

/// Reads a generator config from JSON (fields mirror SynthConfig).
SynthConfig config_from_json(std::string_view text);

}  // namespace cellmix::synth
