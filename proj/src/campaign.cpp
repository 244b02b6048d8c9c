#include "cellmix/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cellmix/error.hpp"

namespace cellmix {

void CampaignAction::validate() const {
    for (const auto& [code, b] : boosts) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo < -1 || b.lo > b.hi)
            throw InputError("action '" + name + "': boost for '" + code + "' must satisfy -1 <= lo <= hi");
    }
}

std::vector<double> apply_action(std::span<const double> population, std::span<const std::string> codes,
                                 const CampaignAction& action, Endpoint endpoint) {
    action.validate();
    if (codes.size() != population.size()) throw std::invalid_argument("apply_action: codes and counts differ in length");
    std::vector<double> out(population.begin(), population.end());
    for (const auto& [code, b] : action.boosts) {
        const auto it = std::find(codes.begin(), codes.end(), code);
        if (it == codes.end()) throw InputError("action '" + action.name + "' names unknown segment '" + code + "'");
        const auto i = static_cast<std::size_t>(it - codes.begin());
        out[i] = population[i] * (1.0 + (endpoint == Endpoint::lo ? b.lo : b.hi));
        if (out[i] < 0) throw DomainError("action '" + action.name + "' drives segment '" + code + "' below zero");
    }
    return out;
}

FeasibilityCheck check_feasibility(const FootprintTensor& tensor, std::span<const double> capacities,
                                   std::span<const double> new_population) {
    const std::size_t k = tensor.segment_count();
    if (new_population.size() != k || capacities.size() != tensor.cell_count())
        throw std::invalid_argument("check_feasibility: dimension mismatch");
    std::vector<double> x(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double base = tensor.totals()[i];
        if (base > 0) {
            x[i] = new_population[i] / base;
        } else if (new_population[i] > 0) {
            throw DomainError("segment '" + tensor.segments()[i] +
                              "' has no historical footprint to scale from");
        }
    }
    FeasibilityCheck out;
    for (std::size_t r = 0; r < tensor.active().size(); ++r) {
        const auto slice = tensor.slice(r);
        double load = 0;
        for (std::size_t i = 0; i < k; ++i) load += slice[i] * x[i];
        const auto key = tensor.active()[r];
        const double cap = capacities[key.cell];
        if (load > cap + 1e-7 * std::max(1.0, cap)) {
            out.feasible = false;
            out.violated.push_back("t" + std::to_string(key.slot) + "/" + tensor.cells()[key.cell]);
        }
    }
    return out;
}

OptimalityScore f_optimal(std::span<const double> population, std::span<const double> optimal_population) {
    const double total = std::accumulate(population.begin(), population.end(), 0.0);
    const double best = std::accumulate(optimal_population.begin(), optimal_population.end(), 0.0);
    if (!(best > 0)) throw DomainError("f_optimal undefined: the optimal base is empty");
    const double ratio = total / best;
    OptimalityScore out;
    out.clamped = ratio > 1.0 + 1e-12;
    out.value = fuzzy::Membership(std::clamp(ratio, 0.0, 1.0));
    return out;
}

namespace {

fuzzy::Hedge hedge_of_potential(double potential, double closeness) {
    return fuzzy::strongest_hedge(fuzzy::Membership(std::clamp(potential, 0.0, 1.0)), closeness);
}

}  // namespace

CampaignAssessment assess(const FootprintTensor& tensor, std::span<const double> capacities,
                          const CampaignAction& action, std::span<const double> optimal_population, double closeness,
                          const fuzzy::PhraseTable& phrases) {
    const auto& base = tensor.totals();
    if (!check_feasibility(tensor, capacities, base).feasible)
        throw DomainError("the current customer base already overloads the network");

    CampaignAssessment out;
    out.action = action.name;
    out.f_opt_base = f_optimal(base, optimal_population).value.value();
    if (out.f_opt_base >= 1.0) throw DomainError("already optimal: campaign potential is undefined");

    const double base_total = std::accumulate(base.begin(), base.end(), 0.0);
    const auto& codes = tensor.segments();
    const auto lo = apply_action(base, codes, action, Endpoint::lo);
    const auto hi = apply_action(base, codes, action, Endpoint::hi);
    auto added = [&](const std::vector<double>& s) {
        return static_cast<std::int64_t>(std::trunc(std::accumulate(s.begin(), s.end(), 0.0) - base_total));
    };
    out.new_clients = {added(lo), added(hi)};

    const auto feas_lo = check_feasibility(tensor, capacities, lo);
    const auto feas_hi = check_feasibility(tensor, capacities, hi);
    out.feasible_at_lo = feas_lo.feasible;
    out.feasible_at_hi = feas_hi.feasible;
    out.violated_at_hi = feas_hi.violated;

    out.f_opt_new = {f_optimal(lo, optimal_population).value.value(), f_optimal(hi, optimal_population).value.value()};
    auto potential = [&](double f_new) { return (f_new - out.f_opt_base) / (1.0 - out.f_opt_base); };
    out.potential = {potential(out.f_opt_new.lo), potential(out.f_opt_new.hi)};
    out.expected_potential = out.potential.mid();
    out.hedge = hedge_of_potential(out.expected_potential, closeness);

    out.sentence = fuzzy::render(phrases.campaign, {{"action", action.name},
                                                    {"hedge", std::string(phrases.word(out.hedge))},
                                                    {"value", fuzzy::format2(out.expected_potential)}});
    if (!feas_hi.feasible) {
        std::string list;
        for (const auto& tag : feas_hi.violated) list += (list.empty() ? "" : phrases.list_separator) + tag;
        out.sentence += " " + fuzzy::render(phrases.campaign_infeasible, {{"action", action.name}, {"segments", list}});
    }
    return out;
}

CampaignComparison compare(const CampaignAssessment& first, const CampaignAssessment& second, double closeness,
                           const fuzzy::PhraseTable& phrases) {
    CampaignComparison out;
    out.delta = first.expected_potential - second.expected_potential;
    out.same_tier = hedge_of_potential(first.expected_potential, closeness) ==
                    hedge_of_potential(second.expected_potential, closeness);
    if (out.same_tier) {
        out.verdict = phrases.no_difference;
    } else {
        const auto& winner = out.delta >= 0 ? first.action : second.action;
        out.verdict = fuzzy::render(phrases.better, {{"action", winner}});
    }
    return out;
}

}  // namespace cellmix
