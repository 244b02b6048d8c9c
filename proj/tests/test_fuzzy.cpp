#include <cmath>
#include <random>

#include "cellmix/fuzzy.hpp"
#include "cellmix/portfolio.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cellmix;
using namespace cellmix::fuzzy;

TEST_CASE("hedges and negation") {
    CHECK(hedge(Membership(0.9), Hedge::very).value() == doctest::Approx(0.81));
    CHECK(hedge(Membership(0.81), Hedge::rather).value() == doctest::Approx(0.9));
    CHECK(hedge(Membership(1), Hedge::extremely).value() == 1);
    CHECK_THROWS_AS(hedge(Membership(0.5), Hedge::hardly), std::invalid_argument);
    CHECK(negate(Membership(0)).value() == 1);
    CHECK(negate(Membership(0.63)).value() == doctest::Approx(0.37));
    CHECK_THROWS_AS(Membership(1.5), std::invalid_argument);
    CHECK_THROWS_AS(Membership(-0.1), std::invalid_argument);
    CHECK(Membership(1 + 1e-14).value() == 1);
}

TEST_CASE("hedge labels") {
    CHECK(parse_hedge("very") == Hedge::very);
    CHECK(to_string(Hedge::extremely) == "extremely");
    CHECK_THROWS_AS(parse_hedge("somewhat"), std::invalid_argument);
}

TEST_CASE("strongest hedge examples and exact thresholds") {
    CHECK(strongest_hedge(Membership(1)) == Hedge::extremely);
    CHECK(strongest_hedge(Membership(400.0 / 420)) == Hedge::very);
    CHECK(strongest_hedge(Membership(0.952)) == Hedge::very);
    CHECK(strongest_hedge(Membership(0.06)) == Hedge::hardly);
    CHECK(strongest_hedge(Membership(0.025)) == Hedge::hardly);
    CHECK(strongest_hedge(Membership(27010 / 42757.15)) == Hedge::hardly);
    CHECK(strongest_hedge(Membership(0.81)) == Hedge::rather);
    CHECK(strongest_hedge(Membership(0.8099)) == Hedge::hardly);

    const double very_edge = std::sqrt(0.9), extreme_edge = std::cbrt(0.9);
    CHECK(strongest_hedge(Membership(very_edge)) == Hedge::very);
    CHECK(strongest_hedge(Membership(std::nextafter(very_edge, 0.0))) == Hedge::rather);
    CHECK(strongest_hedge(Membership(extreme_edge)) == Hedge::extremely);
    CHECK(strongest_hedge(Membership(std::nextafter(extreme_edge, 0.0))) == Hedge::very);
    CHECK(very_edge == doctest::Approx(0.9487).epsilon(1e-4));
    CHECK(extreme_edge == doctest::Approx(0.9655).epsilon(1e-4));

    CHECK(strongest_hedge(Membership(0.72), 0.5) == Hedge::very);
    CHECK(strongest_hedge(Membership(0.7), 0.5) == Hedge::rather);
}

TEST_CASE("tiers") {
    CHECK(anchor(to_tier(Membership(0.95))) == 1);
    CHECK(anchor(to_tier(Membership(0.63))) == 0.6);
    CHECK(anchor(to_tier(Membership(0))) == 0);
    CHECK(anchor(to_tier(Membership(0.5))) == 0.6);
    CHECK(anchor(to_tier(Membership(0.25))) == 0.4);
    CHECK(anchor(to_tier(Membership(0.05))) == 0.1);
    for (double a : {0.0, 0.1, 0.4, 0.6, 0.9, 1.0}) CHECK(anchor(to_tier(Membership(a))) == a);
    CHECK(describe(to_tier(Membership(0.9))) == "mostly but not fully in");
}

TEST_CASE("display rounding") {
    CHECK(format2(400.0 / 420) == "0.95");
    CHECK(format2(0.125) == "0.13");
    CHECK(format2(0.045) == "0.05");
    CHECK(format2(0) == "0.00");
    CHECK(format2(1) == "1.00");
}

TEST_CASE("query desired on the published vector") {
    const auto d = normalize_desirability(fixture::kOperatorX);
    const auto very = query_desired(d, fixture::kOperatorCodes, fixture::kOperatorNames, Hedge::very);
    CHECK(very.codes == std::vector<std::string>{"T"});
    CHECK(very.sentence == "Segments very desired: Traditional.");
    const auto rather = query_desired(d, fixture::kOperatorCodes, fixture::kOperatorNames, Hedge::rather);
    CHECK(rather.codes == std::vector<std::string>{"T"});
    const std::vector<double> zeros(6, 0.0);
    const auto none = query_desired(zeros, fixture::kOperatorCodes, fixture::kOperatorNames, Hedge::hardly);
    CHECK(none.codes.empty());
    CHECK(none.sentence == "No segments are hardly desired.");

    const std::vector<double> two{1, 0.97};
    const std::vector<std::string> codes{"a", "b"}, names{"Alpha", "Beta"};
    const auto both = query_desired(two, codes, names, Hedge::extremely);
    CHECK(both.sentence == "Segments extremely desired: Alpha, Beta.");
    CHECK_THROWS_AS(query_desired(two, codes, std::vector<std::string>{"x"}, Hedge::very), std::invalid_argument);
}

TEST_CASE("query efficiency") {
    const auto toy = query_efficiency(400, 420);
    CHECK(toy.membership.value() == doctest::Approx(0.952).epsilon(1e-3));
    CHECK(toy.hedge == Hedge::very);
    CHECK(toy.sentence == "The infrastructure is very efficiently exploited.");
    const auto op = query_efficiency(27010, 42757.15);
    CHECK(op.membership.value() == doctest::Approx(0.63).epsilon(5e-3));
    CHECK(op.hedge == Hedge::hardly);
    CHECK(query_efficiency(5, 5).hedge == Hedge::extremely);
    CHECK_THROWS_AS(query_efficiency(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(query_efficiency(2, 1), std::invalid_argument);
}

TEST_CASE("phrase table is data") {
    const auto t = PhraseTable::from_json(
        R"({"efficiency": "Netz {hedge} effizient.", "hedge_words": {"very": "sehr"}})");
    CHECK(query_efficiency(400, 420, kDefaultCloseness, t).sentence == "Netz sehr effizient.");
    CHECK(t.word(Hedge::rather) == "rather");
    CHECK_THROWS(PhraseTable::from_json("[1]"));
    CHECK_THROWS(PhraseTable::from_json(R"({"hedge_words": {"mildly": "x"}})"));
    CHECK(render("{a} and {b} and {a}", {{"a", "1"}, {"b", "2"}}) == "1 and 2 and 1");
}

TEST_CASE("property: hedge monotonicity and ladder order") {
    std::mt19937_64 rng(5);
    Hedge prev = Hedge::hardly;
    for (int i = 0; i <= 10000; ++i) {
        const Membership f(i / 10000.0);
        const double e = hedge(f, Hedge::extremely).value(), v = hedge(f, Hedge::very).value(),
                     r = hedge(f, Hedge::rather).value();
        CHECK(e <= v);
        CHECK(v <= f.value());
        CHECK(f.value() <= r);
        const Hedge h = strongest_hedge(f);
        CHECK(static_cast<int>(h) >= static_cast<int>(prev));
        prev = h;
        CHECK(negate(negate(f)).value() == doctest::Approx(f.value()).epsilon(1e-15));
        const auto tier = to_tier(f);
        CHECK(to_tier(Membership(anchor(tier))) == tier);
    }
    for (int i = 0; i < 2000; ++i) {
        const double c = 0.01 + 0.98 * ((rng() >> 11) * 0x1.0p-53);
        const Membership f((rng() >> 11) * 0x1.0p-53);
        const Hedge h = strongest_hedge(f, c);
        const bool any = h != Hedge::hardly;
        if (any) CHECK(hedge(f, h).value() >= c * (1 - 1e-12));
        if (h != Hedge::extremely) {
            const Hedge next = static_cast<Hedge>(static_cast<int>(h) + 1);
            CHECK(hedge(f, next).value() < c * (1 + 1e-12));
        }
    }
}
