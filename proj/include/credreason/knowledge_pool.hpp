#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/date.hpp"

namespace credreason {

enum class EvidenceKind {
    disclosure,
    news,
    certification,
    patent,
    governance,
    statistic,
    search_trend,
};

std::string to_string(EvidenceKind kind);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view name);

enum class EvidenceOrigin { pool, web_search };

// One dated, sourced, factor-taggable fact about a company. All supported
// kinds are time-stamped, so date and source are mandatory.
struct EvidenceItem {
    std::string company_id;
    EvidenceKind kind = EvidenceKind::news;
    std::optional<std::string> factor_tag;  // canonical factor id when present
    std::string content;
    std::optional<double> value;
    std::string unit;
    CalendarDate date;
    std::string source;
    EvidenceOrigin origin = EvidenceOrigin::pool;
    std::string retrieved_at;  // ISO timestamp, required for web_search items
    std::size_t ingest_seq = 0;  // stable tie-break for equal dates

    std::string fingerprint() const;
    std::string value_string() const;
};

struct RecencyPolicy {
    int window_days = 90;  // R
    CalendarDate as_of;

    bool in_window(const CalendarDate& date) const {
        return date >= as_of.minus_days(window_days) && date <= as_of;
    }
};

struct CompanySummary {
    std::string company_id;
    std::string overview;
    // factor id -> evidence references, date-descending
    std::map<std::string, std::vector<const EvidenceItem*>> per_factor_digest;
};

struct IngestRejection {
    std::size_t record_index = 0;
    std::string field;
    std::string reason;
};

struct IngestWarning {
    std::size_t record_index = 0;
    std::string message;
};

struct IngestResult {
    std::string company_id;
    std::size_t accepted = 0;
    std::vector<IngestRejection> rejections;
    std::vector<IngestWarning> warnings;
};

struct RetrievalResult {
    bool company_known = false;
    std::vector<const EvidenceItem*> items;
};

// Company-scoped store of non-financial evidence. Immutable once loaded:
// ingest everything first, then read concurrently.
class KnowledgePool {
public:
    // One JSON document per company: {company_id, company_summary, company_data:[...]}.
    // Records lacking a date or source are rejected, never silently admitted.
    // Throws ConfigError when the document itself is malformed.
    IngestResult ingest_document(const nlohmann::json& raw_record,
                                 const std::string& company_id_hint = "");

    IngestResult ingest_file(const std::string& path);

    // Loads every *.json file in a directory, sorted by filename.
    std::vector<IngestResult> load_directory(const std::string& dir);

    bool has_company(const std::string& company_id) const;
    std::vector<std::string> company_ids() const;
    std::size_t item_count(const std::string& company_id) const;

    // Two-tier recency ordering: items inside [as_of - R, as_of] first, then
    // the rest; date-descending within each tier; ingestion order breaks ties.
    RetrievalResult retrieve(const std::string& company_id, const RecencyPolicy& policy) const;

    // Throws ConfigError("insufficient data ...") when the company has no items.
    CompanySummary summarize_company(const std::string& company_id) const;

private:
    struct CompanyRecord {
        std::string overview;
        std::vector<EvidenceItem> items;
    };
    std::map<std::string, CompanyRecord> companies_;
    std::size_t next_seq_ = 0;
};

}  // namespace credreason
