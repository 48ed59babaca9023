#include "credreason/knowledge_pool.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "credreason/errors.hpp"
#include "credreason/guideline.hpp"

namespace credreason {

std::string to_string(EvidenceKind kind) {
    switch (kind) {
        case EvidenceKind::disclosure: return "disclosure";
        case EvidenceKind::news: return "news";
        case EvidenceKind::certification: return "certification";
        case EvidenceKind::patent: return "patent";
        case EvidenceKind::governance: return "governance";
        case EvidenceKind::statistic: return "statistic";
        case EvidenceKind::search_trend: return "search_trend";
    }
    return "news";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view name) {
    static const std::map<std::string, EvidenceKind, std::less<>> table = {
        {"disclosure", EvidenceKind::disclosure}, {"news", EvidenceKind::news},
        {"certification", EvidenceKind::certification}, {"patent", EvidenceKind::patent},
        {"governance", EvidenceKind::governance}, {"statistic", EvidenceKind::statistic},
        {"search_trend", EvidenceKind::search_trend},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::string EvidenceItem::value_string() const {
    if (!value) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", *value);
    std::string out = buf;
    if (!unit.empty()) out += " " + unit;
    return out;
}

std::string EvidenceItem::fingerprint() const {
    return evidence_fingerprint(date.to_string(), source, value_string());
}

IngestResult KnowledgePool::ingest_document(const nlohmann::json& doc,
                                            const std::string& company_id_hint) {
    if (!doc.is_object()) throw ConfigError("pool document is not a JSON object");
    if (!doc.contains("company_id") || !doc["company_id"].is_string()) {
        throw ConfigError("pool document: missing or non-string field 'company_id'");
    }
    std::string company_id = doc["company_id"].get<std::string>();
    if (!company_id_hint.empty() && company_id != company_id_hint) {
        throw ConfigError("pool document: company_id '" + company_id + "' does not match '" +
                          company_id_hint + "'");
    }
    if (!doc.contains("company_data") || !doc["company_data"].is_array()) {
        throw ConfigError("pool document: missing or non-array field 'company_data'");
    }

    IngestResult result;
    result.company_id = company_id;
    auto& record = companies_[company_id];
    if (doc.contains("company_summary") && doc["company_summary"].is_string()) {
        record.overview = doc["company_summary"].get<std::string>();
    }

    const auto& table = FactorTable::instance();
    std::size_t index = 0;
    for (const auto& raw : doc["company_data"]) {
        const std::size_t record_index = index++;
        if (!raw.is_object()) {
            result.rejections.push_back({record_index, "record", "not a JSON object"});
            continue;
        }
        auto text_field = [&](const char* name) -> std::optional<std::string> {
            if (!raw.contains(name) || raw[name].is_null()) return std::nullopt;
            if (!raw[name].is_string()) return std::nullopt;
            return raw[name].get<std::string>();
        };

        auto kind_text = text_field("kind");
        if (!kind_text) {
            result.rejections.push_back({record_index, "kind", "missing"});
            continue;
        }
        auto kind = parse_evidence_kind(*kind_text);
        if (!kind) {
            result.rejections.push_back({record_index, "kind", "unknown kind '" + *kind_text + "'"});
            continue;
        }

        // All supported kinds are time-stamped; undated evidence is unusable
        // under the citation policy, so it is rejected here.
        auto date_text = text_field("date");
        if (!date_text || date_text->empty()) {
            result.rejections.push_back({record_index, "date", "missing date on time-stamped record"});
            continue;
        }
        auto date = CalendarDate::parse(*date_text);
        if (!date) {
            result.rejections.push_back({record_index, "date", "unparseable date '" + *date_text + "'"});
            continue;
        }

        auto source = text_field("source");
        if (!source || source->empty()) {
            result.rejections.push_back({record_index, "source", "missing source"});
            continue;
        }

        EvidenceItem item;
        item.company_id = company_id;
        item.kind = *kind;
        item.date = *date;
        item.source = *source;
        item.content = text_field("content").value_or("");
        if (raw.contains("value") && raw["value"].is_number()) {
            item.value = raw["value"].get<double>();
        }
        item.unit = text_field("unit").value_or("");
        if (auto tag = text_field("factor_tag"); tag && !tag->empty()) {
            if (const Factor* factor = table.find(*tag)) {
                item.factor_tag = factor->id;
            } else {
                // Tag validity is not an evidence invariant; keep the item,
                // drop the tag, and surface the mismatch.
                result.warnings.push_back(
                    {record_index, "unknown factor_tag '" + *tag + "' cleared"});
            }
        }
        item.origin = EvidenceOrigin::pool;
        item.ingest_seq = next_seq_++;
        record.items.push_back(std::move(item));
        ++result.accepted;
    }
    return result;
}

IngestResult KnowledgePool::ingest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pool file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("pool file " + path + ": " + e.what());
    }
    return ingest_document(doc);
}

std::vector<IngestResult> KnowledgePool::load_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("pool directory not found: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<IngestResult> results;
    results.reserve(paths.size());
    for (const auto& path : paths) results.push_back(ingest_file(path));
    return results;
}

bool KnowledgePool::has_company(const std::string& company_id) const {
    return companies_.count(company_id) > 0;
}

std::vector<std::string> KnowledgePool::company_ids() const {
    std::vector<std::string> ids;
    ids.reserve(companies_.size());
    for (const auto& [id, _] : companies_) ids.push_back(id);
    return ids;
}

std::size_t KnowledgePool::item_count(const std::string& company_id) const {
    auto it = companies_.find(company_id);
    return it == companies_.end() ? 0 : it->second.items.size();
}

RetrievalResult KnowledgePool::retrieve(const std::string& company_id,
                                        const RecencyPolicy& policy) const {
    RetrievalResult result;
    auto it = companies_.find(company_id);
    if (it == companies_.end()) return result;  // company_known stays false
    result.company_known = true;
    result.items.reserve(it->second.items.size());
    for (const auto& item : it->second.items) result.items.push_back(&item);
    std::stable_sort(result.items.begin(), result.items.end(),
                     [&](const EvidenceItem* a, const EvidenceItem* b) {
                         bool a_in = policy.in_window(a->date);
                         bool b_in = policy.in_window(b->date);
                         if (a_in != b_in) return a_in;  // window tier first
                         if (a->date != b->date) return b->date < a->date;
                         return a->ingest_seq < b->ingest_seq;
                     });
    return result;
}

CompanySummary KnowledgePool::summarize_company(const std::string& company_id) const {
    auto it = companies_.find(company_id);
    if (it == companies_.end() || it->second.items.empty()) {
        throw ConfigError("insufficient data: no evidence for company '" + company_id + "'");
    }
    CompanySummary summary;
    summary.company_id = company_id;
    summary.overview = it->second.overview;
    for (const auto& item : it->second.items) {
        if (item.factor_tag) summary.per_factor_digest[*item.factor_tag].push_back(&item);
    }
    for (auto& [factor, items] : summary.per_factor_digest) {
        std::stable_sort(items.begin(), items.end(),
                         [](const EvidenceItem* a, const EvidenceItem* b) {
                             if (a->date != b->date) return b->date < a->date;
                             return a->ingest_seq < b->ingest_seq;
                         });
    }
    return summary;
}

}  // namespace credreason
