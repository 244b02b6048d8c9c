#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cellmix/campaign.hpp"
#include "cellmix/footprint.hpp"
#include "cellmix/ingest.hpp"
#include "cellmix/lp.hpp"

namespace fixture {

inline std::filesystem::path dir() { return CELLMIX_FIXTURE_DIR; }

inline std::ifstream open(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + p.string());
    return in;
}

struct Toy {
    cellmix::SegmentCatalog catalog;
    cellmix::ClientDirectory directory;
    cellmix::CellRegistry registry;
    cellmix::CdrParseResult parse;
    cellmix::FootprintTensor tensor;
};

// Two segments (60 and 40 clients), two cells of capacity 200, three slots.
inline Toy toy() {
    Toy t;
    const auto d = dir() / "toy";
    auto seg = open(d / "segments.csv");
    t.catalog = cellmix::parse_segments(seg);
    auto cl = open(d / "clients.csv");
    t.directory = cellmix::parse_clients(cl, t.catalog);
    auto ce = open(d / "cells.csv");
    t.registry = cellmix::parse_cells(ce);
    auto cdr = open(d / "cdr.csv");
    t.parse = cellmix::parse_cdr(cdr, t.directory);
    t.tensor = cellmix::build_footprint(t.parse.events, t.directory, t.catalog, t.registry);
    return t;
}

inline std::vector<std::string> toy_args(const std::string& sub) {
    const auto d = (dir() / "toy").string();
    return {"cellmix", sub, "--cdr", d + "/cdr.csv", "--clients", d + "/clients.csv",
            "--segments", d + "/segments.csv", "--cells", d + "/cells.csv"};
}

// Six operator segments whose LP optimum is x = (0, 0.13, 0, 1.45, 4.85, 0.92).
inline const std::vector<std::string> kOperatorCodes{"CC", "CA", "MJM", "QA", "T", "VA"};
inline const std::vector<std::string> kOperatorNames{"Corporate clients", "Cost aware",    "Modern John/Mary",
                                                     "Quality aware",     "Traditional",   "Value aware"};
inline const std::vector<double> kOperatorPopulation{139, 4003, 5963, 5805, 6007, 5093};
inline const std::vector<double> kOperatorX{0, 0.13, 0, 1.45, 4.85, 0.92};
inline const std::vector<std::string> kOperatorCells{"cT", "cCC", "cMJM", "cCA", "cVA", "cQA", "cM2", "cX"};
inline const std::vector<double> kOperatorCapacities{97, 97, 97, 537, 557, 29, 100, 50000};

inline cellmix::FootprintTensor operator_tensor() {
    enum { CC, CA, MJM, QA, T, VA };
    cellmix::FootprintTensor::Builder b(kOperatorCodes, 2, kOperatorCells);
    b.add(T, 0, 0, 20);
    b.add(CC, 0, 1, 70).add(T, 0, 1, 20);
    b.add(MJM, 0, 2, 70).add(T, 0, 2, 20);
    b.add(CA, 0, 3, 400).add(T, 0, 3, 100);
    b.add(VA, 0, 4, 500).add(T, 0, 4, 20);
    b.add(QA, 0, 5, 20);
    b.add(MJM, 0, 6, 100);
    for (std::size_t i = 0; i < 6; ++i) {
        b.add(i, 1, 7, kOperatorPopulation[i]);
        b.set_total(i, kOperatorPopulation[i]);
    }
    return std::move(b).build();
}

inline cellmix::SegmentCatalog operator_catalog() {
    std::vector<cellmix::Segment> segs;
    for (std::size_t i = 0; i < 6; ++i) segs.push_back({kOperatorCodes[i], kOperatorNames[i], std::nullopt});
    return cellmix::SegmentCatalog(segs);
}

inline cellmix::CellRegistry operator_registry() {
    std::vector<cellmix::Cell> cells;
    for (std::size_t j = 0; j < kOperatorCells.size(); ++j)
        cells.push_back({kOperatorCells[j], 47.0, 19.0 + 0.01 * static_cast<double>(j),
                         static_cast<std::int64_t>(kOperatorCapacities[j])});
    return cellmix::CellRegistry(cells);
}

inline std::vector<double> operator_s_star() {
    std::vector<double> s;
    for (std::size_t i = 0; i < 6; ++i) s.push_back(kOperatorX[i] * kOperatorPopulation[i]);
    return s;
}

inline cellmix::CampaignAction action_a() { return {"A", {{"T", {0.05, 0.07}}, {"QA", {0.05, 0.07}}}}; }
inline cellmix::CampaignAction action_b() { return {"B", {{"QA", {0.08, 0.10}}, {"T", {0.01, 0.03}}}}; }

// Random non-negative LP, maximize c.x over Ax <= b with x >= 0.
inline cellmix::lp::Problem random_problem(std::mt19937_64& rng, std::size_t max_n, std::size_t max_m,
                                           bool allow_zero_rows = true) {
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53); };
    cellmix::lp::Problem p;
    p.n = 1 + rng() % max_n;
    const std::size_t m = 1 + rng() % max_m;
    for (std::size_t i = 0; i < p.n; ++i) p.objective.push_back(std::round(uni(0, 10)));
    for (std::size_t r = 0; r < m; ++r) {
        cellmix::lp::Row row;
        for (std::size_t i = 0; i < p.n; ++i) {
            // Sparse, small integers so that ties and degeneracy actually occur.
            if (rng() % 3 == 0 && allow_zero_rows) continue;
            row.coefficients.push_back({i, std::round(uni(0, 6))});
        }
        row.rhs = std::round(uni(0, 20));
        row.tag = "r" + std::to_string(r);
        p.rows.push_back(std::move(row));
    }
    return p;
}

}  // namespace fixture
