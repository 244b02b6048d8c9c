#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellmix::fuzzy {

/// Grade of membership in [0, 1].
class Membership {
public:
    constexpr Membership() = default;
    /// Throws std::invalid_argument outside [0, 1]; round-off within 1e-12 is clamped.
    explicit Membership(double value);

    double value() const { return value_; }
    auto operator<=>(const Membership&) const = default;

private:
    double value_ = 0;
};

/// Hedge ladder, weakest first. `hardly` is the bottom rung: not even rather.
enum class Hedge { hardly = 0, rather = 1, very = 2, extremely = 3 };

std::string_view to_string(Hedge h);
/// Accepts the lowercase label; throws std::invalid_argument otherwise.
Hedge parse_hedge(std::string_view label);

/// rather = f^(1/2), very = f^2, extremely = f^3. `hardly` has no operator.
Membership hedge(Membership f, Hedge label);
Membership negate(Membership f);

inline constexpr double kDefaultCloseness = 0.9;

/// Strongest label whose hedged membership reaches `closeness`.
/// Comparisons are made on f against closeness^(1/p) so boundary values
/// classify upward exactly.
Hedge strongest_hedge(Membership f, double closeness = kDefaultCloseness);

/// Six-value membership scale.
enum class Tier { fully_out, mostly_out, more_or_less_out, more_or_less_in, mostly_in, fully_in };

inline constexpr std::array<double, 6> kTierAnchors{0.0, 0.1, 0.4, 0.6, 0.9, 1.0};

double anchor(Tier t);
std::string_view describe(Tier t);
/// Nearest anchor; exact midpoints go to the higher anchor.
Tier to_tier(Membership f);

/// Wording used for rendered answers. Placeholders: {hedge}, {segments},
/// {value}, {action}.
struct PhraseTable {
    std::array<std::string, 4> hedge_words{"hardly", "rather", "very", "extremely"};
    std::string desired = "Segments {hedge} desired: {segments}.";
    std::string desired_none = "No segments are {hedge} desired.";
    std::string efficiency = "The infrastructure is {hedge} efficiently exploited.";
    std::string campaign = "Action {action} has {hedge} efficient potential (expected {value}).";
    std::string campaign_infeasible = "Action {action} overloads the network: {segments}.";
    std::string no_difference = "No difference";
    std::string better = "Action {action} is better";
    std::string list_separator = ", ";

    std::string_view word(Hedge h) const { return hedge_words[static_cast<std::size_t>(h)]; }

    /// Overrides entries from a JSON object with the same field names
    /// (hedge_words given as an object label -> phrase).
    static PhraseTable from_json(std::string_view text);
};

/// Replaces every "{key}" with its value.
std::string render(std::string_view templ, std::initializer_list<std::pair<std::string_view, std::string>> values);

/// Round-half-up to two decimals, for display only.
std::string format2(double value);

struct DesiredAnswer {
    std::vector<std::size_t> indices;
    std::vector<std::string> codes;
    std::string sentence;
};

/// Segments whose strongest hedge is at least `label`.
DesiredAnswer query_desired(std::span<const double> desirability, std::span<const std::string> codes,
                            std::span<const std::string> names, Hedge label, double closeness = kDefaultCloseness,
                            const PhraseTable& phrases = {});

struct EfficiencyAnswer {
    Membership membership;
    Hedge hedge = Hedge::hardly;
    std::string sentence;
};

/// current_obj / max_obj with its hedge. Throws std::invalid_argument when max_obj <= 0
/// or current_obj exceeds max_obj beyond round-off.
EfficiencyAnswer query_efficiency(double current_obj, double max_obj, double closeness = kDefaultCloseness,
                                  const PhraseTable& phrases = {});

}  // namespace cellmix::fuzzy
