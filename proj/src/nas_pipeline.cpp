#include "credreason/nas_pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason {

nlohmann::json extract_first_json_object(const std::string& raw) {
    std::size_t scan = 0;
    while ((scan = raw.find('{', scan)) != std::string::npos) {
        // Walk the balanced object, honouring strings and escapes.
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        std::size_t end = std::string::npos;
        for (std::size_t i = scan; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    end = i;
                    break;
                }
            }
        }
        if (end != std::string::npos) {
            auto candidate = raw.substr(scan, end - scan + 1);
            auto parsed = nlohmann::json::parse(candidate, nullptr, false);
            if (!parsed.is_discarded()) return parsed;
        }
        ++scan;
    }
    throw ValidationError("no parseable JSON object found (scanned " +
                          std::to_string(raw.size()) + " bytes)");
}

namespace {

const nlohmann::json& require_key(const nlohmann::json& node, const char* key,
                                  const std::string& path) {
    if (!node.is_object() || !node.contains(key)) {
        throw ValidationError("schema error at " + path + ": missing key '" + key + "'");
    }
    return node[key];
}

std::vector<std::string> string_list(const nlohmann::json& node, const std::string& path) {
    if (!node.is_array()) throw ValidationError("schema error at " + path + ": expected array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_string()) {
            throw ValidationError("schema error at " + path + "[" + std::to_string(i) +
                                  "]: expected string");
        }
        out.push_back(node[i].get<std::string>());
    }
    return out;
}

std::string string_at(const nlohmann::json& node, const char* key, const std::string& path) {
    const auto& value = require_key(node, key, path);
    if (!value.is_string()) {
        throw ValidationError("schema error at " + path + "." + key + ": expected string");
    }
    return value.get<std::string>();
}

}  // namespace

AnalysisReport post_process(const std::string& raw) {
    nlohmann::json doc = extract_first_json_object(raw);
    const auto& summary = require_key(doc, "Analysis Summary", "$");
    AnalysisReport report;
    report.favorable_summary = string_list(
        require_key(summary, "Favorable Factors Summary", "$.\"Analysis Summary\""),
        "$.\"Analysis Summary\".\"Favorable Factors Summary\"");
    report.adverse_summary = string_list(
        require_key(summary, "Adverse Factors Summary", "$.\"Analysis Summary\""),
        "$.\"Analysis Summary\".\"Adverse Factors Summary\"");
    const auto& topics = require_key(summary, "topics", "$.\"Analysis Summary\"");
    if (!topics.is_array()) throw ValidationError("schema error at topics: expected array");
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const std::string path = "topics[" + std::to_string(i) + "]";
        TopicEntry entry;
        entry.topic = string_at(topics[i], "topic", path);
        entry.affirmative = string_at(topics[i], "Affirmative", path);
        entry.adverse = string_at(topics[i], "Adverse", path);
        report.topics.push_back(std::move(entry));
    }
    return report;
}

nlohmann::ordered_json render_analysis_report(const AnalysisReport& report) {
    nlohmann::ordered_json summary;
    summary["Favorable Factors Summary"] = report.favorable_summary;
    summary["Adverse Factors Summary"] = report.adverse_summary;
    summary["topics"] = nlohmann::ordered_json::array();
    for (const auto& topic : report.topics) {
        nlohmann::ordered_json entry;
        entry["topic"] = topic.topic;
        entry["Affirmative"] = topic.affirmative;
        entry["Adverse"] = topic.adverse;
        summary["topics"].push_back(std::move(entry));
    }
    nlohmann::ordered_json out;
    out["Analysis Summary"] = std::move(summary);
    return out;
}

nlohmann::ordered_json render_analysis_document(const AnalysisReport& report) {
    nlohmann::ordered_json out = render_analysis_report(report);
    out["metadata"] = {{"company_id", report.company_id},
                       {"model_id", report.model_id},
                       {"started_at", report.started_at},
                       {"elapsed_seconds", report.elapsed_seconds}};
    return out;
}

std::string compose_nas_prompt(const CompanySummary& summary,
                               const std::vector<EvidenceItem>& web_items,
                               const std::string& guideline_text,
                               const std::string& schema_instruction) {
    std::string prompt = guideline_text;
    prompt += "\n\n[Company Summary]\n";
    if (!summary.overview.empty()) prompt += summary.overview + "\n";
    for (const auto& [factor, items] : summary.per_factor_digest) {
        prompt += "\n" + factor + ":\n";
        for (const auto* item : items) {
            prompt += "- (" + item->date.to_string() + ", " + item->source + ") " + item->content;
            if (item->value) prompt += " (" + item->value_string() + ")";
            prompt += "\n";
        }
    }
    prompt += "\n[Latest Web Search Results]\n";
    if (web_items.empty()) {
        prompt += "(none)\n";
    } else {
        for (const auto& item : web_items) {
            prompt += "- (" + item.date.to_string() + ", " + item.source + ") " + item.content + "\n";
        }
    }
    prompt += "\n" + schema_instruction;
    return prompt;
}

AnalysisReport run_nas(AgentRuntime& runtime, const KnowledgePool& pool,
                       const std::string& company_id, const NasParams& params) {
    RunJournal& journal = runtime.journal();
    const EpochMillis started = runtime.clock().now_millis();
    const std::string started_at = Clock::iso8601(started);
    journal.record("nas_start", {{"company_id", company_id},
                                 {"recency_days", params.recency.window_days},
                                 {"as_of", params.recency.as_of.to_string()},
                                 {"max_search", params.max_search}});

    std::string stage = "summarize";
    try {
        journal.record("stage", {{"name", "summarize"}});
        CompanySummary summary = pool.summarize_company(company_id);

        stage = "search";
        journal.record("stage", {{"name", "search"}});
        std::vector<EvidenceItem> web_items;
        bool do_search = params.search_mode == NasSearchMode::always;
        if (params.search_mode == NasSearchMode::if_sparse) {
            // Sparse means no in-window news coverage at all.
            auto retrieval = pool.retrieve(company_id, params.recency);
            bool has_recent_news = false;
            for (const auto* item : retrieval.items) {
                if (item->kind == EvidenceKind::news && params.recency.in_window(item->date)) {
                    has_recent_news = true;
                    break;
                }
            }
            do_search = !has_recent_news;
        }
        if (do_search && params.max_search > 0) {
            SearchBudget budget{params.max_search, 0};
            auto result = runtime.pipeline_search(company_id + " latest news", params.recency,
                                                  budget);
            web_items = std::move(result.items);
        }

        stage = "compose";
        journal.record("stage", {{"name", "compose"}});
        std::string task = compose_nas_prompt(summary, web_items, runtime.templates().guideline(),
                                              runtime.templates().nas_analysis());
        task = substitute_placeholder(std::move(task), "company_name", company_id);
        task = substitute_placeholder(std::move(task), "output_language_instruction",
                                      locale_instruction(runtime.config().locale));
        PromptBundle bundle = runtime.make_bundle("nas_analyst", std::move(task), {});
        bundle.step_index = 1;

        stage = "generate";
        journal.record("stage", {{"name", "generate"}});
        std::string raw = runtime.generate(runtime.role("nas_analyst"), bundle, 1);

        stage = "post_process";
        journal.record("stage", {{"name", "post_process"}});
        AnalysisReport report = post_process(raw);
        report.company_id = company_id;
        report.model_id = runtime.config().model_id;
        report.started_at = started_at;
        report.elapsed_seconds =
            static_cast<double>(runtime.clock().now_millis() - started) / 1000.0;

        stage = "persist";
        journal.record("stage", {{"name", "persist"}});
        if (!params.out_path.empty()) {
            auto parent = std::filesystem::path(params.out_path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            std::ofstream out(params.out_path, std::ios::trunc);
            if (!out) throw ConfigError("cannot write report file: " + params.out_path);
            out << render_analysis_document(report).dump(2) << "\n";
        }
        journal.record("nas_end", {{"topics", report.topics.size()},
                                   {"elapsed_seconds", report.elapsed_seconds}});
        return report;
    } catch (const Error& e) {
        journal.record("nas_abort", {{"stage", stage}, {"error", e.what()}});
        throw Error(e.category(), "nas stage '" + stage + "': " + e.what());
    }
}

}  // namespace credreason
