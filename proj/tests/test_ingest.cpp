#include <algorithm>
#include <random>
#include <sstream>

#include "cellmix/csv.hpp"
#include "cellmix/error.hpp"
#include "cellmix/ingest.hpp"
#include "cellmix/tensor_io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace cellmix;

namespace {

SegmentCatalog two_level() {
    return SegmentCatalog({{"Y", "Young", std::nullopt},
                           {"Y1", "Students", "Y"},
                           {"O", "Old", std::nullopt},
                           {"Y2", "Starters", "Y"},
                           {"O1", "Retired", "O"}});
}

}  // namespace

TEST_CASE("csv sniffs the delimiter and handles quotes") {
    std::istringstream semi("\xEF\xBB\xBF" "a;b;c\n1;\"x;y\";3\n\n4;5;6\n");
    const auto t = csv::Table::read(semi);
    CHECK(t.header() == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows().size() == 2);
    CHECK(t.rows()[0].fields[1] == "x;y");
    CHECK(t.rows()[1].line == 4);
    CHECK(t.find("c") == 2u);
    CHECK_FALSE(t.find("d"));
    CHECK_THROWS_AS(t.require("d"), InputError);

    std::istringstream tabs("a\tb\n\"he said \"\"hi\"\"\"\t2\n");
    const auto u = csv::Table::read(tabs);
    CHECK(u.rows()[0].fields[0] == "he said \"hi\"");
}

TEST_CASE("timestamps round-trip on the naive local clock") {
    const auto t = parse_timestamp("2016-03-07T00:05:00");
    REQUIRE(t);
    CHECK(format_timestamp(*t) == "2016-03-07T00:05:00");
    CHECK(parse_timestamp("2016-03-07 23:59") == *parse_timestamp("2016-03-07T23:59:00"));
    CHECK(parse_timestamp("2016-03-07T00:05:00.750") == *t);
    CHECK_FALSE(parse_timestamp("2016-02-30T00:00:00"));
    CHECK_FALSE(parse_timestamp("yesterday"));
    CHECK_FALSE(parse_timestamp("2016-03-07T24:00:00"));
}

TEST_CASE("segment catalog validates its hierarchy") {
    CHECK_NOTHROW(two_level());
    CHECK_THROWS_AS(SegmentCatalog({{"A", "a", std::nullopt}, {"A", "b", std::nullopt}}), InputError);
    CHECK_THROWS_AS(SegmentCatalog({{"A", "a", "Z"}}), InputError);
    CHECK_THROWS_AS(SegmentCatalog({{"A", "a", "B"}, {"B", "b", "A"}}), InputError);
    const auto cat = two_level();
    CHECK(cat.name_of("Y1") == "Students");
    CHECK(cat.name_of("nope") == "nope");
}

TEST_CASE("cells and clients are validated") {
    std::istringstream bad_cap("cell_id,latitude,longitude,capacity\nc1,47,19,0\n");
    CHECK_THROWS_AS(parse_cells(bad_cap), InputError);
    std::istringstream bad_lat("cell_id,latitude,longitude,capacity\nc1,147,19,5\n");
    CHECK_THROWS_AS(parse_cells(bad_lat), InputError);
    std::istringstream missing("cell_id,latitude,capacity\nc1,47,5\n");
    CHECK_THROWS_AS(parse_cells(missing), InputError);

    const auto cat = two_level();
    std::istringstream unknown("client_id,segment_code\nu1,ZZ\n");
    CHECK_THROWS_AS(parse_clients(unknown, cat), InputError);
    std::istringstream dup("client_id,segment_code\nu1,Y1\nu1,O1\n");
    CHECK_THROWS_AS(parse_clients(dup, cat), InputError);
}

TEST_CASE("cdr parsing snaps to the grid and reports bad records") {
    const auto cat = two_level();
    const ClientDirectory dir({{"a", "Y1"}, {"b", "O1"}}, cat);
    std::istringstream cdr(
        "cell_id,timestamp,client_id\n"
        "c1,2016-03-07T10:02:31,a\n"
        "c2,2016-03-07T10:05:00,b\n"
        "c1,garbage,a\n"
        "c1,2016-03-07T10:06:00,ghost\n"
        "c1,2016-03-07T10:07\n");
    const auto res = parse_cdr(cdr, dir);
    REQUIRE(res.events.size() == 2);
    CHECK(res.snapped == 1);
    CHECK(format_timestamp(res.epoch) == "2016-03-07T00:00:00");
    CHECK(res.events[0].slot == 120);  // 10:00
    CHECK(res.events[1].slot == 121);
    REQUIRE(res.errors.size() == 3);
    CHECK(res.errors[0].line == 4);
    CHECK(res.errors[1].message.find("ghost") != std::string::npos);

    std::istringstream again("timestamp,client_id,cell_id\n2016-03-07T10:00:00,a,c1\n");
    const auto early = parse_cdr(again, dir, {parse_timestamp("2016-03-07T11:00:00")});
    CHECK(early.events.empty());
    CHECK(early.errors.size() == 1);
}

TEST_CASE("toy fixture aggregates into the expected footprint") {
    const auto t = fixture::toy();
    CHECK(t.parse.errors.empty());
    const auto& f = t.tensor;
    CHECK(f.segments() == std::vector<std::string>{"1", "2"});
    CHECK(f.cells() == std::vector<std::string>{"c1", "c2"});
    CHECK(f.slot_count() == 3);
    CHECK(f.totals() == std::vector<double>{60, 40});
    CHECK(f.at(0, 0, 0) == 40);
    CHECK(f.at(1, 0, 1) == 20);
    CHECK(f.at(0, 0, 1) == 20);
    CHECK(f.at(1, 1, 1) == 40);
    // Clients seen by both cells in one slot count in both.
    CHECK(f.load(2, 0) == 50);
    CHECK(f.load(2, 1) == 30);
    CHECK(f.at(1, 2, 0) + f.at(1, 2, 1) == 45);  // v21..v25 in both cells
    CHECK(f.peak_load() == 50);
    CHECK(f.active().size() == 6);
}

TEST_CASE("slot index from the epoch") {
    const auto cat = two_level();
    const ClientDirectory dir({{"u1", "Y1"}}, cat);
    std::istringstream cdr("timestamp,client_id,cell_id\n2016-03-07T08:05:00,u1,c2\n2016-03-07T08:07:31,u1,c2\n");
    const auto res = parse_cdr(cdr, dir, {parse_timestamp("2016-03-07T00:00")});
    REQUIRE(res.events.size() == 2);
    CHECK(res.events[0].slot == 97);
    CHECK(res.events[1].slot == 97);
    CHECK(res.snapped == 1);
    std::istringstream empty("timestamp,client_id,cell_id\n");
    const auto none = parse_cdr(empty, dir);
    CHECK(none.events.empty());
    CHECK(none.snapped == 0);
}

TEST_CASE("property: aggregation ignores event order and loads are slice sums") {
    auto t = fixture::toy();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto ev = t.parse.events;
        std::shuffle(ev.begin(), ev.end(), rng);
        const auto f = build_footprint(ev, t.directory, t.catalog, t.registry);
        CHECK(f == t.tensor);
    }
    for (std::size_t r = 0; r < t.tensor.active().size(); ++r) {
        double sum = 0;
        for (double v : t.tensor.slice(r)) sum += v;
        CHECK(sum == t.tensor.load(r));
    }
}

TEST_CASE("duplicate events count once and unknown cells are listed") {
    const auto cat = two_level();
    const ClientDirectory dir({{"a", "Y1"}, {"b", "O1"}}, cat);
    const CellRegistry reg({{"c1", 0, 0, 10}});
    std::vector<CdrEvent> ev{{"a", "c1", 0}, {"a", "c1", 0}, {"b", "c1", 0}, {"a", "c1", 3}};
    const auto f = build_footprint(ev, dir, cat, reg);
    CHECK(f.segments() == std::vector<std::string>{"Y1", "O1"});
    CHECK(f.at(0, 0, 0) == 1);
    CHECK(f.totals() == std::vector<double>{1, 1});
    CHECK(f.slot_count() == 4);

    ev.push_back({"a", "zz", 1});
    ev.push_back({"b", "yy", 1});
    try {
        build_footprint(ev, dir, cat, reg);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("yy, zz") != std::string::npos);
    }
}

TEST_CASE("roll-up preserves loads and population") {
    const auto cat = two_level();
    const ClientDirectory dir({{"a", "Y1"}, {"b", "O1"}, {"c", "Y2"}, {"d", "Y2"}}, cat);
    const CellRegistry reg({{"c1", 0, 0, 10}, {"c2", 0, 0, 10}});
    const std::vector<CdrEvent> ev{{"a", "c1", 0}, {"b", "c1", 0}, {"c", "c2", 1}, {"d", "c1", 1}, {"a", "c2", 1}};
    const auto fine = build_footprint(ev, dir, cat, reg);
    const auto coarse = roll_up(fine, cat);
    CHECK(coarse.segments() == std::vector<std::string>{"Y", "O"});
    CHECK(coarse.same_loads(fine));
    CHECK(coarse.totals() == std::vector<double>{3, 1});
    CHECK(coarse.at(0, 1, 1) == 2);
    CHECK_THROWS_AS(roll_up(coarse, cat), InputError);
}

TEST_CASE("tensor cache round-trips and rejects foreign files") {
    const auto f = fixture::toy().tensor;
    std::stringstream buf;
    tensor_io::write(buf, f);
    const auto back = tensor_io::read(buf);
    CHECK(back == f);

    const auto op = fixture::operator_tensor();
    std::stringstream buf2;
    tensor_io::write(buf2, op);
    CHECK(tensor_io::read(buf2) == op);

    std::stringstream junk("NOPE....");
    CHECK_THROWS_AS(tensor_io::read(junk), InputError);
    std::string bytes;
    {
        std::stringstream b;
        tensor_io::write(b, f);
        bytes = b.str();
    }
    std::stringstream cut(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(tensor_io::read(cut), InputError);

    const auto doc = nlohmann::json::parse(tensor_io::to_json_text(f));
    CHECK(doc["kind"] == "footprint_tensor");
    CHECK(doc["slices"].size() == 6);
    CHECK(doc["totals"][0] == 60);
}

TEST_CASE("footprint tensor rejects inconsistent input") {
    FootprintTensor::Builder b({"a"}, 1, {"c"});
    b.add(0, 0, 0, 5).set_total(0, 3);
    CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);
    FootprintTensor::Builder neg({"a"}, 1, {"c"});
    neg.add(0, 0, 0, -1);
    CHECK_THROWS_AS(std::move(neg).build(), std::invalid_argument);
}
