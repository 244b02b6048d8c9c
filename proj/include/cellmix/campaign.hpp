#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cellmix/footprint.hpp"
#include "cellmix/fuzzy.hpp"

namespace cellmix {

/// Closed interval [lo, hi].
template <class T>
struct Interval {
    T lo{};
    T hi{};

    double mid() const { return (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0; }
    bool operator==(const Interval&) const = default;
};

/// Planned relative growth per segment, e.g. {"T": [0.05, 0.07]}.
/// Unlisted segments do not change.
struct CampaignAction {
    std::string name;
    std::map<std::string, Interval<double>> boosts;

    /// Throws InputError unless -1 <= lo <= hi for every boost.
    void validate() const;
};

enum class Endpoint { lo, hi };

/// S_i * (1 + boost_i) at the chosen endpoint. Throws InputError for codes
/// not in `codes` and DomainError for negative results.
std::vector<double> apply_action(std::span<const double> population, std::span<const std::string> codes,
                                 const CampaignAction& action, Endpoint endpoint);

struct FeasibilityCheck {
    bool feasible = true;
    std::vector<std::string> violated;  // "t<slot>/<cell>" tags
};

/// Evaluates every footprint row at x_i = S_new_i / S_i against the capacities.
/// Throws DomainError when a segment with no population is asked to grow.
FeasibilityCheck check_feasibility(const FootprintTensor& tensor, std::span<const double> capacities,
                                   std::span<const double> new_population);

struct OptimalityScore {
    fuzzy::Membership value;
    bool clamped = false;  // sum(S) exceeded sum(S*)
};

/// sum(S) / sum(S*), clamped to [0, 1]. Throws DomainError if sum(S*) is zero.
OptimalityScore f_optimal(std::span<const double> population, std::span<const double> optimal_population);

struct CampaignAssessment {
    std::string action;
    Interval<std::int64_t> new_clients;  // truncated toward zero
    bool feasible_at_lo = true;
    bool feasible_at_hi = true;
    std::vector<std::string> violated_at_hi;
    double f_opt_base = 0;
    Interval<double> f_opt_new;
    Interval<double> potential;
    double expected_potential = 0;
    fuzzy::Hedge hedge = fuzzy::Hedge::hardly;
    std::string sentence;
};

/// Evaluates both interval endpoints of the action. All quantities are
/// monotone in the boosts, so the endpoints bound the whole interval.
/// Throws DomainError when the current base is infeasible or already optimal.
CampaignAssessment assess(const FootprintTensor& tensor, std::span<const double> capacities,
                          const CampaignAction& action, std::span<const double> optimal_population,
                          double closeness = fuzzy::kDefaultCloseness, const fuzzy::PhraseTable& phrases = {});

struct CampaignComparison {
    double delta = 0;
    bool same_tier = true;
    std::string verdict;
};

CampaignComparison compare(const CampaignAssessment& first, const CampaignAssessment& second,
                           double closeness = fuzzy::kDefaultCloseness, const fuzzy::PhraseTable& phrases = {});

}  // namespace cellmix
