#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace credreason {

// Favorable/adverse correspond to the (+)/(-) marks of the evaluation
// guideline; context_dependent is reserved for observations outside the table.
enum class SignalPolarity { favorable, adverse, context_dependent };

enum class ObservationPolarity {
    higher,
    lower,
    present,
    absent,
    increasing,
    decreasing,
    more_stable,
    less_stable,
};

std::string to_string(SignalPolarity polarity);
std::string to_string(ObservationPolarity polarity);
std::optional<ObservationPolarity> parse_observation_polarity(std::string_view name);

// Which pair of observation polarities a factor's interpretation rule reads.
enum class FactorAxis { magnitude, presence, trend, stability };

struct Factor {
    std::string id;
    std::string display_name;
    std::vector<std::string> aliases;  // free-text names recognised during extraction
    FactorAxis axis;
    // Polarity assigned to the "positive" end of the axis
    // (higher / present / increasing / more_stable).
    SignalPolarity positive_end;
};

// The ten-factor non-financial evaluation table. Immutable shared data.
class FactorTable {
public:
    static const FactorTable& instance();

    const std::vector<Factor>& factors() const { return factors_; }

    const Factor* find(std::string_view id_or_alias) const;

    // Interpretation of an observation under a factor's rule. Throws
    // ValidationError when the polarity does not apply to the factor's axis.
    SignalPolarity classify_signal(const Factor& factor, ObservationPolarity observation) const;
    SignalPolarity classify_signal(std::string_view factor_id, ObservationPolarity observation) const;

    nlohmann::ordered_json to_json() const;

private:
    FactorTable();
    std::vector<Factor> factors_;
    std::map<std::string, std::size_t, std::less<>> index_;  // id and aliases, lowercased
};

enum class DebateSide { affirmative, negative };

std::string to_string(DebateSide side);

// Fingerprint of one piece of evidence: digest of (date, source, value).
// "Different evidence" for the reuse policy means different years, values,
// or separate events, all of which change at least one of those fields.
std::string evidence_fingerprint(std::string_view date, std::string_view source,
                                 std::string_view value);

struct FactorUse {
    int step_index = 0;
    std::string fingerprint;
};

struct FactorReuseFinding {
    DebateSide side;
    std::string factor_id;
    std::string fingerprint;
    std::vector<int> step_indices;  // all steps that used the identical fingerprint
};

// Append-only record of which side used which factor with which evidence.
// The reuse policy is a reviewer check: recording never rejects.
class FactorUsageLedger {
public:
    void record_usage(DebateSide side, std::string_view factor_id, std::string_view fingerprint,
                      int step_index);

    std::size_t size() const { return total_; }

    const std::map<std::pair<std::string, std::string>, std::vector<FactorUse>>& entries(
        DebateSide side) const;

    // One finding per (side, factor) pair reused with an identical evidence
    // fingerprint. Reuse backed by distinct fingerprints is legitimate.
    std::vector<FactorReuseFinding> check_factor_reuse() const;

private:
    // key: (factor id, fingerprint)
    std::map<std::pair<std::string, std::string>, std::vector<FactorUse>> affirmative_;
    std::map<std::pair<std::string, std::string>, std::vector<FactorUse>> negative_;
    std::size_t total_ = 0;
};

}  // namespace credreason
