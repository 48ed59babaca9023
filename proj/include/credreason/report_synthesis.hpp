#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/kpd_debate.hpp"

namespace credreason {

struct SourceRef {
    std::string date;
    std::string source;
};

struct DebateTopic {
    std::string label;            // factor display name, or the factor id when untabled
    std::string factor_id;        // empty for the unattributed bucket
    int first_mention_step = 10;  // ordering key
    std::string pro;              // affirmative-team content, "" when absent
    std::string con;              // negative-team content, "" when absent
    std::vector<SourceRef> sources;  // every (date, source) pair, duplicates kept
};

// Balanced final report: both positions always present, no verdict anywhere.
struct DebateSummaryReport {
    std::vector<std::string> favorable_factor_summary;
    std::vector<std::string> adverse_factor_summary;
    std::vector<DebateTopic> topics;
    std::string objective_statement;
    std::string corporate_overview;
    std::string transcript_ref;
    bool degenerate = false;  // no extractable factors anywhere in the transcript
};

// Deterministic aggregation: one topic per factor cited anywhere in the
// transcript, pro from affirmative utterances mentioning it, con from
// negative ones, cross-examination and rebuttal content included. Every
// extracted citation lands in exactly one topic, so the report's (date,
// source) multiset equals the transcript's.
DebateSummaryReport aggregate(const Transcript& transcript,
                              const std::string& corporate_overview = "");

std::multiset<std::pair<std::string, std::string>> citation_multiset(const Transcript& transcript);
std::multiset<std::pair<std::string, std::string>> citation_multiset(
    const DebateSummaryReport& report);

// Task-format JSON: {"Debate Summary": {"Favorable Factor Summary",
// "Adverse Factor Summary", "topics"}} plus the additional top-level fields.
// Topic order is (first mention step, label); key order is fixed.
// Throws ValidationError on duplicate topic labels.
nlohmann::ordered_json render_report(const DebateSummaryReport& report);

DebateSummaryReport parse_report(const nlohmann::json& document);

// Optional backend pass that may rewrite topic prose. The rewrite is kept
// only when it preserves the topic's citation multiset; otherwise the
// deterministic text stands and the rejection is journaled.
DebateSummaryReport polish_report(const DebateSummaryReport& report, AgentRuntime& runtime);

}  // namespace credreason
