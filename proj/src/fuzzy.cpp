#include "cellmix/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace cellmix::fuzzy {

Membership::Membership(double value) {
    constexpr double slack = 1e-12;
    if (!(value >= -slack && value <= 1 + slack))
        throw std::invalid_argument("membership must lie in [0, 1], got " + std::to_string(value));
    value_ = std::clamp(value, 0.0, 1.0);
}

std::string_view to_string(Hedge h) {
    switch (h) {
        case Hedge::hardly: return "hardly";
        case Hedge::rather: return "rather";
        case Hedge::very: return "very";
        case Hedge::extremely: return "extremely";
    }
    return "?";
}

Hedge parse_hedge(std::string_view label) {
    for (Hedge h : {Hedge::hardly, Hedge::rather, Hedge::very, Hedge::extremely})
        if (to_string(h) == label) return h;
    throw std::invalid_argument("unknown hedge '" + std::string(label) + "'");
}

Membership hedge(Membership f, Hedge label) {
    switch (label) {
        case Hedge::rather: return Membership(std::sqrt(f.value()));
        case Hedge::very: return Membership(f.value() * f.value());
        case Hedge::extremely: return Membership(f.value() * f.value() * f.value());
        case Hedge::hardly: break;
    }
    throw std::invalid_argument("'hardly' has no hedge operator");
}

Membership negate(Membership f) { return Membership(1.0 - f.value()); }

Hedge strongest_hedge(Membership f, double closeness) {
    if (!(closeness > 0 && closeness < 1)) throw std::invalid_argument("closeness must lie in (0, 1)");
    const double v = f.value();
    if (v >= std::cbrt(closeness)) return Hedge::extremely;
    if (v >= std::sqrt(closeness)) return Hedge::very;
    if (v >= closeness * closeness) return Hedge::rather;
    return Hedge::hardly;
}

double anchor(Tier t) { return kTierAnchors[static_cast<std::size_t>(t)]; }

std::string_view describe(Tier t) {
    switch (t) {
        case Tier::fully_out: return "fully out";
        case Tier::mostly_out: return "mostly but not fully out";
        case Tier::more_or_less_out: return "more or less out";
        case Tier::more_or_less_in: return "more or less in";
        case Tier::mostly_in: return "mostly but not fully in";
        case Tier::fully_in: return "fully in";
    }
    return "?";
}

Tier to_tier(Membership f) {
    const double v = f.value();
    std::size_t best = 0;
    double best_dist = std::abs(v - kTierAnchors[0]);
    for (std::size_t i = 1; i < kTierAnchors.size(); ++i) {
        const double dist = std::abs(v - kTierAnchors[i]);
        // Anchors ascend, so a tie within round-off resolves to the higher one.
        if (dist <= best_dist + 1e-12) {
            best = i;
            best_dist = std::min(dist, best_dist);
        }
    }
    return static_cast<Tier>(best);
}

std::string render(std::string_view templ, std::initializer_list<std::pair<std::string_view, std::string>> values) {
    std::string out;
    out.reserve(templ.size() + 32);
    std::size_t i = 0;
    while (i < templ.size()) {
        if (templ[i] == '{') {
            const auto close = templ.find('}', i);
            if (close != std::string_view::npos) {
                const auto key = templ.substr(i + 1, close - i - 1);
                bool replaced = false;
                for (const auto& [k, v] : values) {
                    if (k == key) {
                        out += v;
                        replaced = true;
                        break;
                    }
                }
                if (replaced) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(templ[i++]);
    }
    return out;
}

std::string format2(double value) {
    const double scaled = std::floor(std::abs(value) * 100.0 + 0.5 + 1e-9);
    const auto cents = static_cast<long long>(scaled);
    std::string s = std::to_string(cents / 100) + "." + (cents % 100 < 10 ? "0" : "") + std::to_string(cents % 100);
    return (value < 0 && cents != 0 ? "-" : "") + s;
}

PhraseTable PhraseTable::from_json(std::string_view text) {
    PhraseTable t;
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw std::invalid_argument("phrase table must be a JSON object");
    auto set = [&](const char* key, std::string& field) {
        if (doc.contains(key)) field = doc.at(key).get<std::string>();
    };
    set("desired", t.desired);
    set("desired_none", t.desired_none);
    set("efficiency", t.efficiency);
    set("campaign", t.campaign);
    set("campaign_infeasible", t.campaign_infeasible);
    set("no_difference", t.no_difference);
    set("better", t.better);
    set("list_separator", t.list_separator);
    if (doc.contains("hedge_words")) {
        for (const auto& [label, phrase] : doc.at("hedge_words").items())
            t.hedge_words[static_cast<std::size_t>(parse_hedge(label))] = phrase.get<std::string>();
    }
    return t;
}

DesiredAnswer query_desired(std::span<const double> desirability, std::span<const std::string> codes,
                            std::span<const std::string> names, Hedge label, double closeness,
                            const PhraseTable& phrases) {
    if (codes.size() != desirability.size() || names.size() != desirability.size())
        throw std::invalid_argument("query_desired: codes, names and memberships differ in length");
    DesiredAnswer ans;
    std::string list;
    for (std::size_t i = 0; i < desirability.size(); ++i) {
        const Membership f(desirability[i]);
        // With no desirable segment at all, nothing is desired at any strength.
        if (f.value() == 0) continue;
        if (strongest_hedge(f, closeness) >= label) {
            ans.indices.push_back(i);
            ans.codes.push_back(codes[i]);
            if (!list.empty()) list += phrases.list_separator;
            list += names[i];
        }
    }
    const std::string word(phrases.word(label));
    ans.sentence = ans.codes.empty() ? render(phrases.desired_none, {{"hedge", word}})
                                     : render(phrases.desired, {{"hedge", word}, {"segments", list}});
    return ans;
}

EfficiencyAnswer query_efficiency(double current_obj, double max_obj, double closeness, const PhraseTable& phrases) {
    if (!(max_obj > 0)) throw std::invalid_argument("efficiency undefined: max_obj must be positive");
    if (current_obj < 0 || current_obj > max_obj * (1 + 1e-9))
        throw std::invalid_argument("efficiency needs 0 <= current_obj <= max_obj");
    EfficiencyAnswer ans;
    ans.membership = Membership(std::min(current_obj / max_obj, 1.0));
    ans.hedge = strongest_hedge(ans.membership, closeness);
    ans.sentence = render(phrases.efficiency, {{"hedge", std::string(phrases.word(ans.hedge))}});
    return ans;
}

}  // namespace cellmix::fuzzy
