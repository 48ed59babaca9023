#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/agent_runtime.hpp"
#include "credreason/guideline.hpp"
#include "credreason/knowledge_pool.hpp"

namespace credreason {

enum class StepKind { constructive, cross_examination, rebuttal, closing };

std::string to_string(StepKind kind);

// One entry of the fixed ten-step schedule. The schedule is static data;
// nothing mutates it at runtime.
struct DebateStepSpec {
    int index = 0;
    const char* speaker = "";
    StepKind kind = StepKind::constructive;
    std::vector<int> context_indices;  // prompt rendering keeps this order
    std::optional<int> char_limit;
    std::optional<int> min_factor_signals;
    std::optional<int> required_question_count;
    bool allow_new_factors = true;
};

// The ten-step Karl Popper sequence:
//   1  A1 constructive   600 chars, 3+ factor signals
//   2  N3 cross-exam     3 questions on D1
//   3  N1 constructive   600 chars, 3+ factor signals
//   4  A3 cross-exam     3 questions on D3
//   5  A2 rebuttal       400 chars, answers D3
//   6  N1 cross-exam     3 questions on D5
//   7  N2 rebuttal       400 chars, answers D1
//   8  A1 cross-exam     3 questions on D7
//   9  A3 closing        600 chars, synthesizes {1,2,5,8}, no new factors
//   10 N3 closing        600 chars, synthesizes {3,4,7,6}, no new factors
const std::array<DebateStepSpec, 10>& debate_schedule();

struct CitationRef {
    std::string value;  // optional figure attached to the citation
    std::string date;   // empty or unparseable dates violate the citation policy
    std::string source;
    std::size_t pos = 0;  // byte offset in the utterance text
    bool from_sidecar = false;

    bool dated() const;
    std::string fingerprint() const;
};

struct FactorMention {
    std::string factor_id;
    std::size_t first_pos = 0;
};

struct ExtractedStructure {
    std::vector<CitationRef> citations;
    std::vector<FactorMention> factors;  // ordered by first occurrence
    int question_count = 0;
    std::string falsifiability_notes;
    std::size_t body_utf8_length = 0;  // statement length, sidecar excluded
    std::size_t body_byte_end = 0;     // byte offset where the sidecar begins
};

// Citations come from "(date, source)" / "(value, date, source)" patterns and
// from the structured sidecar block the templates request:
//   Factors: <factor ids>
//   Citations:
//   - <date> | <source> | <value>
//   Falsifiability: <counter-conditions>
// Factors are recognised by table ids, display names and registered aliases.
ExtractedStructure extract_structure(const std::string& text);

// Factor id each citation belongs to, parallel to structure.citations: the
// nearest factor mention at or before the citation, the first factor when the
// citation precedes every mention, "" when the utterance has no factors.
std::vector<std::string> attribute_citations(const ExtractedStructure& structure);

enum class ViolationKind {
    missing_citation,
    undated_citation,
    factor_reuse,
    char_limit_exceeded,
    insufficient_factor_signals,
    insufficient_questions,
    new_factor_in_closing,
    tool_permission,
    order_breach,
};

enum class Severity { hard, advisory };

std::string to_string(ViolationKind kind);
std::string to_string(Severity severity);

struct Violation {
    ViolationKind kind;
    Severity severity;
    int step_index = 0;
    std::string detail;

    nlohmann::ordered_json to_json() const;
};

struct Utterance {
    int step_index = 0;
    std::string speaker;
    std::string text;
    ExtractedStructure structure;
    bool used_web_search = false;
    std::vector<EvidenceItem> web_evidence;  // items fetched during this step
    double elapsed_seconds = 0;

    DebateSide side() const;
    std::vector<std::string> factor_ids() const;
};

// Runs the per-step checks in order: speaker, char limit, factor signals,
// question count, citation completeness, factor reuse, and for closings the
// no-new-factors closure against the context utterances. Never throws on
// content; everything surfaces as a Violation.
std::vector<Violation> validate_step(const Utterance& utterance, const DebateStepSpec& spec,
                                     FactorUsageLedger& ledger,
                                     const std::vector<const Utterance*>& context = {});

struct Transcript {
    std::string company_id;
    std::string model_id;
    std::string locale;
    std::string started_at;
    std::vector<Utterance> utterances;  // D1..D10 in order
    std::vector<Violation> violations;
    double elapsed_seconds_total = 0;

    const Utterance& closing_pro() const { return utterances.at(8); }
    const Utterance& closing_con() const { return utterances.at(9); }

    nlohmann::ordered_json to_json() const;
};

struct DebateParams {
    RecencyPolicy recency;
    int max_search = 3;   // m
    bool strict = true;   // hard violations abort; record-only continues
};

// Drives the schedule: one step at a time, in index order, validation after
// every step. Steps are strictly sequential within a session.
class DebateEngine {
public:
    DebateEngine(AgentRuntime& runtime, const KnowledgePool& pool, DebateParams params);

    Transcript run(const std::string& company_id);

    // Stepwise surface used by run(); executing out of schedule order is an
    // order breach and aborts regardless of strictness.
    void begin_session(const std::string& company_id);
    const Utterance& execute_step(int index);
    Transcript finish();

private:
    std::string step_task_text(const DebateStepSpec& spec,
                               const std::vector<EvidenceItem>& web_items) const;

    AgentRuntime& runtime_;
    const KnowledgePool& pool_;
    DebateParams params_;
    FactorUsageLedger ledger_;
    Transcript transcript_;
    std::string company_id_;
    int next_step_ = 1;
    bool session_open_ = false;
    EpochMillis session_start_ = 0;
};

}  // namespace credreason
