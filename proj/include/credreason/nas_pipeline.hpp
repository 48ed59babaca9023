#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/agent_runtime.hpp"
#include "credreason/knowledge_pool.hpp"

namespace credreason {

struct TopicEntry {
    std::string topic;
    std::string affirmative;
    std::string adverse;
};

// The single-pass analysis output. Field names map 1:1 onto the report
// schema keys ("Analysis Summary", "Favorable Factors Summary", ...).
struct AnalysisReport {
    std::string company_id;
    std::vector<std::string> favorable_summary;
    std::vector<std::string> adverse_summary;
    std::vector<TopicEntry> topics;
    std::string model_id;
    std::string started_at;
    double elapsed_seconds = 0;
};

// First balanced JSON object inside raw text, tolerating code fences and
// surrounding prose. Throws ValidationError with the scan offset when no
// parseable object exists.
nlohmann::json extract_first_json_object(const std::string& raw);

// Validates the report schema and maps keys onto AnalysisReport. Missing or
// mistyped keys raise ValidationError naming the key path.
AnalysisReport post_process(const std::string& raw);

// Report body under the schema's English key names; metadata excluded.
nlohmann::ordered_json render_analysis_report(const AnalysisReport& report);

// Full persisted document: body plus the "metadata" sibling object.
nlohmann::ordered_json render_analysis_document(const AnalysisReport& report);

// Task text for the analyst: guideline, per-factor summary digest, web
// evidence with verbatim (date, source) pairs, and the output-schema
// instructions.
std::string compose_nas_prompt(const CompanySummary& summary,
                               const std::vector<EvidenceItem>& web_items,
                               const std::string& guideline_text,
                               const std::string& schema_instruction);

enum class NasSearchMode { always, if_sparse };

struct NasParams {
    RecencyPolicy recency;
    int max_search = 3;  // m
    NasSearchMode search_mode = NasSearchMode::always;
    std::string out_path;  // persisted report; empty skips the file write
};

// The single-pass sequence: summarize, search, compose, generate,
// post-process, persist -- in that order, each exactly once. A stage failure
// aborts the run naming the stage; partial output stays in the journal only.
AnalysisReport run_nas(AgentRuntime& runtime, const KnowledgePool& pool,
                       const std::string& company_id, const NasParams& params);

}  // namespace credreason
