#include "credreason/guideline.hpp"

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason {

std::string to_string(SignalPolarity polarity) {
    switch (polarity) {
        case SignalPolarity::favorable: return "favorable";
        case SignalPolarity::adverse: return "adverse";
        case SignalPolarity::context_dependent: return "context_dependent";
    }
    return "context_dependent";
}

std::string to_string(ObservationPolarity polarity) {
    switch (polarity) {
        case ObservationPolarity::higher: return "higher";
        case ObservationPolarity::lower: return "lower";
        case ObservationPolarity::present: return "present";
        case ObservationPolarity::absent: return "absent";
        case ObservationPolarity::increasing: return "increasing";
        case ObservationPolarity::decreasing: return "decreasing";
        case ObservationPolarity::more_stable: return "more_stable";
        case ObservationPolarity::less_stable: return "less_stable";
    }
    return "higher";
}

std::optional<ObservationPolarity> parse_observation_polarity(std::string_view name) {
    static const std::map<std::string, ObservationPolarity, std::less<>> table = {
        {"higher", ObservationPolarity::higher},
        {"lower", ObservationPolarity::lower},
        {"present", ObservationPolarity::present},
        {"absent", ObservationPolarity::absent},
        {"increasing", ObservationPolarity::increasing},
        {"decreasing", ObservationPolarity::decreasing},
        {"more_stable", ObservationPolarity::more_stable},
        {"less_stable", ObservationPolarity::less_stable},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

namespace {

const char* axis_name(FactorAxis axis) {
    switch (axis) {
        case FactorAxis::magnitude: return "magnitude";
        case FactorAxis::presence: return "presence";
        case FactorAxis::trend: return "trend";
        case FactorAxis::stability: return "stability";
    }
    return "magnitude";
}

SignalPolarity invert(SignalPolarity polarity) {
    switch (polarity) {
        case SignalPolarity::favorable: return SignalPolarity::adverse;
        case SignalPolarity::adverse: return SignalPolarity::favorable;
        case SignalPolarity::context_dependent: return SignalPolarity::context_dependent;
    }
    return SignalPolarity::context_dependent;
}

}  // namespace

const FactorTable& FactorTable::instance() {
    static FactorTable table;
    return table;
}

FactorTable::FactorTable() {
    factors_ = {
        {"industry_growth_outlook",
         "Industry Growth Outlook",
         {"industry growth", "growth outlook", "산업 성장"},
         FactorAxis::magnitude,
         SignalPolarity::favorable},
        {"competition_intensity",
         "Industry Competitive Intensity",
         {"competition intensity", "competitive intensity", "market competition", "경쟁 강도"},
         FactorAxis::magnitude,
         SignalPolarity::adverse},
        {"technological_disruption_risk",
         "Technological Disruption Risk",
         {"technological disruption", "technological change", "technology disruption", "기술 변화"},
         FactorAxis::magnitude,
         SignalPolarity::adverse},
        {"economic_cyclicality",
         "Economic Cyclicality",
         // One row of the guideline carries two phrasings; both resolve here.
         {"economic sensitivity", "business cyclical", "economic cyclicalities", "cyclicality",
          "경기 민감도"},
         FactorAxis::magnitude,
         SignalPolarity::adverse},
        {"government_support",
         "Government Support Programs",
         {"government support", "policy support", "정부 지원"},
         FactorAxis::presence,
         SignalPolarity::favorable},
        {"internal_control_risk",
         "Internal Control Risk",
         {"internal control", "내부 통제"},
         FactorAxis::magnitude,
         SignalPolarity::adverse},
        {"managerial_continuity",
         "Management Continuity",
         {"management continuity", "managerial continuity", "management stability", "경영 연속성"},
         FactorAxis::stability,
         SignalPolarity::favorable},
        {"employment_stability",
         "Employment Stability",
         {"employment stability", "workforce stability", "고용 안정"},
         FactorAxis::magnitude,
         SignalPolarity::favorable},
        {"certification_status",
         "Certifications",
         {"certification", "certifications", "innobiz", "인증"},
         FactorAxis::presence,
         SignalPolarity::favorable},
        {"search_volume_trend",
         "Search Volume Trend",
         {"search volume", "search trend", "public perception trend", "검색량 추이"},
         FactorAxis::trend,
         SignalPolarity::favorable},
    };
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        index_[to_lower(factors_[i].id)] = i;
        index_[to_lower(factors_[i].display_name)] = i;
        for (const auto& alias : factors_[i].aliases) index_[to_lower(alias)] = i;
    }
}

const Factor* FactorTable::find(std::string_view id_or_alias) const {
    auto it = index_.find(to_lower(id_or_alias));
    if (it == index_.end()) return nullptr;
    return &factors_[it->second];
}

SignalPolarity FactorTable::classify_signal(const Factor& factor,
                                            ObservationPolarity observation) const {
    bool positive_end = false;
    bool applicable = false;
    switch (factor.axis) {
        case FactorAxis::magnitude:
            applicable = observation == ObservationPolarity::higher ||
                         observation == ObservationPolarity::lower;
            positive_end = observation == ObservationPolarity::higher;
            break;
        case FactorAxis::presence:
            applicable = observation == ObservationPolarity::present ||
                         observation == ObservationPolarity::absent;
            positive_end = observation == ObservationPolarity::present;
            break;
        case FactorAxis::trend:
            applicable = observation == ObservationPolarity::increasing ||
                         observation == ObservationPolarity::decreasing;
            positive_end = observation == ObservationPolarity::increasing;
            break;
        case FactorAxis::stability:
            applicable = observation == ObservationPolarity::more_stable ||
                         observation == ObservationPolarity::less_stable;
            positive_end = observation == ObservationPolarity::more_stable;
            break;
    }
    if (!applicable) {
        throw ValidationError("observation polarity '" + to_string(observation) +
                              "' does not apply to factor '" + factor.id + "' (" +
                              axis_name(factor.axis) + " axis)");
    }
    return positive_end ? factor.positive_end : invert(factor.positive_end);
}

SignalPolarity FactorTable::classify_signal(std::string_view factor_id,
                                            ObservationPolarity observation) const {
    const Factor* factor = find(factor_id);
    if (!factor) {
        throw ValidationError("unknown factor '" + std::string(factor_id) + "'");
    }
    return classify_signal(*factor, observation);
}

nlohmann::ordered_json FactorTable::to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& factor : factors_) {
        nlohmann::ordered_json row;
        row["id"] = factor.id;
        row["display_name"] = factor.display_name;
        row["aliases"] = factor.aliases;
        row["axis"] = axis_name(factor.axis);
        row["positive_end_signal"] = to_string(factor.positive_end);
        out.push_back(row);
    }
    return out;
}

std::string to_string(DebateSide side) {
    return side == DebateSide::affirmative ? "affirmative" : "negative";
}

std::string evidence_fingerprint(std::string_view date, std::string_view source,
                                 std::string_view value) {
    std::string key;
    key.reserve(date.size() + source.size() + value.size() + 2);
    key.append(date);
    key.push_back('\x1f');
    key.append(source);
    key.push_back('\x1f');
    key.append(value);
    return fnv1a_hex(key);
}

void FactorUsageLedger::record_usage(DebateSide side, std::string_view factor_id,
                                     std::string_view fingerprint, int step_index) {
    auto& bucket = side == DebateSide::affirmative ? affirmative_ : negative_;
    bucket[{std::string(factor_id), std::string(fingerprint)}].push_back(
        FactorUse{step_index, std::string(fingerprint)});
    ++total_;
}

const std::map<std::pair<std::string, std::string>, std::vector<FactorUse>>&
FactorUsageLedger::entries(DebateSide side) const {
    return side == DebateSide::affirmative ? affirmative_ : negative_;
}

std::vector<FactorReuseFinding> FactorUsageLedger::check_factor_reuse() const {
    std::vector<FactorReuseFinding> findings;
    for (DebateSide side : {DebateSide::affirmative, DebateSide::negative}) {
        for (const auto& [key, uses] : entries(side)) {
            if (uses.size() < 2) continue;
            FactorReuseFinding finding;
            finding.side = side;
            finding.factor_id = key.first;
            finding.fingerprint = key.second;
            for (const auto& use : uses) finding.step_indices.push_back(use.step_index);
            findings.push_back(std::move(finding));
        }
    }
    return findings;
}

}  // namespace credreason
