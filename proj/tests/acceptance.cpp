// End-to-end acceptance checks; prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "cellmix/campaign.hpp"
#include "cellmix/cli.hpp"
#include "cellmix/fuzzy.hpp"
#include "cellmix/granularity.hpp"
#include "cellmix/lp.hpp"
#include "cellmix/portfolio.hpp"
#include "cellmix/synth.hpp"
#include "support.hpp"

using namespace cellmix;

namespace {

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

void c1_toy_lp() {
    const auto t = fixture::toy();
    const auto s = lp::solve(build_lp(t.tensor, t.registry, {}));
    expect(s.status == lp::Status::optimal, "toy LP not optimal");
    expect(near(s.x[0], 5, 1e-6) && near(s.x[1], 3, 1e-6), "x = (" + fmt(s.x[0]) + ", " + fmt(s.x[1]) + ")");
    expect(near(s.objective, 420, 1e-6), "objective " + fmt(s.objective));
    const auto r = optimize(t.tensor, t.registry, {});
    expect(near(r.x_star[0], 5, 1e-6) && near(r.x_star[1], 3, 1e-6), "tensor path x differs");
    expect(near(r.max_obj, 420, 1e-6), "tensor path objective " + fmt(r.max_obj));
}

void c2_oracle_agreement() {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 200; ++k) {
        const auto p = fixture::random_problem(rng, 3, 6);
        const auto s = lp::solve(p);
        const auto o = lp::enumerate_vertices(p);
        expect(s.status == o.status, "instance " + std::to_string(k) + ": status " + lp::to_string(s.status) +
                                         " vs " + lp::to_string(o.status));
        if (s.status == lp::Status::optimal)
            expect(near(s.objective, o.objective, 1e-6 * std::max(1.0, std::abs(o.objective))),
                   "instance " + std::to_string(k) + ": objective " + fmt(s.objective) + " vs " + fmt(o.objective));
    }
}

void c3_desirability() {
    const auto d = normalize_desirability(fixture::kOperatorX);
    const std::vector<double> expected{0, 0.0268, 0, 0.2990, 1, 0.1897};
    for (std::size_t i = 0; i < d.size(); ++i)
        expect(near(d[i], expected[i], 1e-3), fixture::kOperatorCodes[i] + " desirability " + fmt(d[i]));
    const auto q = fuzzy::query_desired(d, fixture::kOperatorCodes, fixture::kOperatorNames, fuzzy::Hedge::very);
    expect(q.codes == std::vector<std::string>{"T"}, "very desired set differs from {T}");
    // The operator tensor reproduces the same optimum.
    const auto r = optimize(fixture::operator_tensor(), fixture::kOperatorCapacities, {});
    for (std::size_t i = 0; i < 6; ++i)
        expect(near(r.x_star[i], fixture::kOperatorX[i], 1e-6), "operator x differs at " + fixture::kOperatorCodes[i]);
}

void c4_action_a() {
    const auto s_star = fixture::operator_s_star();
    const auto a = assess(fixture::operator_tensor(), fixture::kOperatorCapacities, fixture::action_a(), s_star);
    expect(a.new_clients.lo == 590 && a.new_clients.hi == 826,
           "new clients [" + std::to_string(a.new_clients.lo) + ", " + std::to_string(a.new_clients.hi) + "]");
    expect(near(a.f_opt_base, 0.63, 0.005), "f_optimal " + fmt(a.f_opt_base));
    double sum_star = 0, sum = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        sum_star += s_star[i];
        sum += fixture::kOperatorPopulation[i];
    }
    const double ratio = sum_star / sum;
    expect(near(ratio, 1.57, 0.02), "optimal/current ratio " + fmt(ratio));
}

void c5_compare() {
    CampaignAssessment a, b;
    a.action = "A";
    a.expected_potential = 0.06;
    b.action = "B";
    b.expected_potential = 0.025;
    const auto c = compare(a, b);
    expect(near(c.delta, 0.035, 1e-12), "delta " + fmt(c.delta));
    expect(c.same_tier, "tiers differ");
    expect(c.verdict == "No difference", "verdict '" + c.verdict + "'");
    const auto real = assess(fixture::operator_tensor(), fixture::kOperatorCapacities, fixture::action_a(),
                             fixture::operator_s_star());
    expect(near(real.potential.lo, 0.037, 1e-3) && near(real.potential.hi, 0.052, 1e-3),
           "action A potential [" + fmt(real.potential.lo) + ", " + fmt(real.potential.hi) + "]");
}

void c6_keep_clients() {
    const auto t = fixture::toy();
    PortfolioOptions keep;
    keep.keep_clients = true;
    const auto b = keep_clients_breakpoints(t.tensor, keep);
    expect(near(b.min_feasible, 50, 1e-9), "min feasible " + fmt(b.min_feasible));
    expect(b.release && near(*b.release, 200.0 / 3, 1e-6), "release " + (b.release ? fmt(*b.release) : "none"));
    for (double c : {10.0, 49.0, 49.999}) {
        keep.capacity_override = c;
        expect(optimize(t.tensor, t.registry, keep).status == lp::Status::infeasible,
               "keep-clients feasible at " + fmt(c));
    }
    keep.capacity_override = 50;
    expect(optimize(t.tensor, t.registry, keep).status == lp::Status::optimal, "keep-clients infeasible at 50");
}

void c7_linearity() {
    const auto t = fixture::toy();
    const auto pts = capacity_sweep(t.tensor, {}, 10, 200, 20);
    expect(pts.size() == 20, "sweep length " + std::to_string(pts.size()));
    PortfolioOptions unit;
    unit.capacity_override = 1;
    const double max_slope = optimize(t.tensor, t.registry, unit).max_obj;
    const double cur_slope = current_objective(t.tensor, t.registry, unit);
    expect(max_slope > 0 && cur_slope > 0, "zero objective at capacity 1");
    for (const auto& p : pts) {
        expect(std::abs(p.max_obj - max_slope * p.capacity) <= 1e-9 * p.max_obj,
               "max_obj not linear at " + fmt(p.capacity));
        expect(std::abs(p.current_obj - cur_slope * p.capacity) <= 1e-9 * p.current_obj,
               "current_obj not linear at " + fmt(p.capacity));
        expect(p.max_obj >= p.current_obj * (1 - 1e-12), "optimized below current at " + fmt(p.capacity));
    }
}

void c8_granularity() {
    const auto data = synth::generate(synth::demo_config());
    const auto fine = build_footprint(data.events, data.directory, data.catalog, data.registry);
    expect(fine.segment_count() == 12, "synthetic segment count " + std::to_string(fine.segment_count()));
    const auto caps = cell_capacities(fine, data.registry, {});
    const auto s = greedy_merge_sweep(fine, caps, {});
    expect(!s.error, "sweep stopped: " + s.error.value_or(""));
    expect(s.steps.size() == 11, "steps " + std::to_string(s.steps.size()));
    double prev = s.initial_max_obj;
    for (const auto& st : s.steps) {
        expect(st.max_obj_after <= prev * (1 + 1e-9), "objective rose after merging " + st.new_code);
        prev = st.max_obj_after;
    }
    const double coarse = optimize(roll_up(fine, data.catalog), caps, {}).max_obj;
    expect(coarse <= s.initial_max_obj * (1 + 1e-9), "roll-up raised the objective");

    const auto t = fixture::toy();
    const std::vector<double> toy_caps{200, 200};
    const auto toy = greedy_merge_sweep(t.tensor, toy_caps, {});
    expect(near(toy.initial_max_obj, 420, 1e-6) && toy.steps.size() == 1 && near(toy.steps[0].max_obj_after, 400, 1e-6),
           "toy trajectory differs from 420 -> 400");
}

void c9_proportionality() {
    synth::SynthConfig c;
    c.seed = 99;
    c.cells = {{"a", 0, 0, 100}, {"b", 0, 0, 100}, {"c", 0, 0, 100}};
    c.segments = {{"P", "P", std::nullopt, 2000, {2, 1, 0}, {0, 1, 3}},
                  {"Q", "Q", std::nullopt, 300, {0, 1, 1}, {1, 1, 0}}};
    const auto base = synth::generate(c);
    const auto twice = synth::generate(synth::scale_population(c, "P", 2));
    const auto fa = build_footprint(base.events, base.directory, base.catalog, base.registry);
    const auto fb = build_footprint(twice.events, twice.directory, twice.catalog, twice.registry);
    auto per_cell = [](const FootprintTensor& t) {
        std::vector<double> out(t.cell_count(), 0);
        for (std::size_t r = 0; r < t.active().size(); ++r) out[t.active()[r].cell] += t.slice(r)[0];
        return out;
    };
    const auto a = per_cell(fa), b = per_cell(fb);
    for (std::size_t j = 0; j < a.size(); ++j) {
        expect(a[j] > 0, "no footprint in cell " + std::to_string(j));
        expect(near(b[j] / a[j], 2, 0.1), "cell " + std::to_string(j) + " ratio " + fmt(b[j] / a[j]));
    }
}

std::string run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) throw Failure{"cellmix " + args[1] + " exited " + std::to_string(code) + ": " + err.str()};
    return out.str();
}

void c10_pipeline() {
    const auto dir = std::filesystem::temp_directory_path() / "cellmix_acceptance";
    std::filesystem::remove_all(dir);
    auto pipeline = [&](const std::string& tag) {
        const auto d = (dir / tag).string();
        run_cli({"cellmix", "synth", "--out-dir", d});
        run_cli({"cellmix", "ingest", "--cdr", d + "/cdr.csv", "--clients", d + "/clients.csv", "--segments",
                 d + "/segments.csv", "--cells", d + "/cells.csv", "--out", d + "/tensor.bin"});
        return run_cli({"cellmix", "optimize", "--format", "json", "--tensor", d + "/tensor.bin", "--cells",
                        d + "/cells.csv"});
    };
    const auto first = pipeline("one"), second = pipeline("two");
    std::filesystem::remove_all(dir);
    expect(!first.empty(), "empty document");
    expect(first == second, "documents differ between runs");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria{
        {"toy LP optimum x = (5, 3), objective 420", c1_toy_lp},
        {"simplex agrees with vertex enumeration on 200 instances", c2_oracle_agreement},
        {"desirability normalization and very-desired set {T}", c3_desirability},
        {"action A: 590..826 new clients, f = 0.63, ratio ~1.57", c4_action_a},
        {"compare 0.06 vs 0.025 gives no difference", c5_compare},
        {"keep-clients breakpoints 50 and 200/3", c6_keep_clients},
        {"objectives are linear in capacity", c7_linearity},
        {"coarser segmentations never gain", c8_granularity},
        {"doubling a segment doubles its footprint", c9_proportionality},
        {"synth, ingest, optimize is deterministic", c10_pipeline},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            criteria[i].second();
        } catch (const Failure& f) {
            ok = false;
            detail = f.what;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        // Timing budgets for the solver criteria.
        if (ok && i == 0 && ms > 1000) ok = false, detail = "took longer than 1 s";
        if (ok && i == 1 && ms > 10000) ok = false, detail = "took longer than 10 s";
        std::printf("%s %2zu  %s (%.0f ms)%s%s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), ms,
                    detail.empty() ? "" : ": ", detail.c_str());
        failed += ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
