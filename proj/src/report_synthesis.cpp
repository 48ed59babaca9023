#include "credreason/report_synthesis.hpp"

#include <algorithm>
#include <map>

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason {

namespace {

constexpr const char* kUnattributedLabel = "Uncategorized Evidence";

// Sentence segmentation over the statement body. Terminators: ASCII .!? and
// the full-width 。！？ forms common in Korean output.
std::vector<std::string> split_sentences(std::string_view body) {
    std::vector<std::string> sentences;
    std::string current;
    std::size_t i = 0;
    auto flush = [&]() {
        std::string trimmed = trim(current);
        if (!trimmed.empty()) sentences.push_back(std::move(trimmed));
        current.clear();
    };
    while (i < body.size()) {
        unsigned char c = static_cast<unsigned char>(body[i]);
        if (c == '.' || c == '!' || c == '?') {
            current.push_back(static_cast<char>(c));
            ++i;
            flush();
            continue;
        }
        if (c == 0xE3 && i + 2 < body.size() &&
            static_cast<unsigned char>(body[i + 1]) == 0x80 &&
            static_cast<unsigned char>(body[i + 2]) == 0x82) {  // U+3002
            current.append(body.substr(i, 3));
            i += 3;
            flush();
            continue;
        }
        if (c == 0xEF && i + 2 < body.size() &&
            static_cast<unsigned char>(body[i + 1]) == 0xBC &&
            (static_cast<unsigned char>(body[i + 2]) == 0x81 ||   // ！
             static_cast<unsigned char>(body[i + 2]) == 0x9F)) {  // ？
            current.append(body.substr(i, 3));
            i += 3;
            flush();
            continue;
        }
        if (c == '\n') {
            ++i;
            flush();
            continue;
        }
        current.push_back(static_cast<char>(c));
        ++i;
    }
    flush();
    return sentences;
}

bool mentions_factor(const std::string& sentence, const Factor& factor) {
    if (contains_ci(sentence, factor.id) || contains_ci(sentence, factor.display_name)) return true;
    for (const auto& alias : factor.aliases) {
        if (contains_ci(sentence, alias)) return true;
    }
    return false;
}

// Sentences of the utterance body that mention the factor; falls back to the
// first sentence when the factor only appears in the sidecar.
std::string contribution(const Utterance& utterance, const Factor* factor) {
    std::string_view body = std::string_view(utterance.text)
                                .substr(0, utterance.structure.body_byte_end);
    auto sentences = split_sentences(body);
    if (sentences.empty()) return "";
    std::string picked;
    if (factor) {
        for (const auto& sentence : sentences) {
            if (mentions_factor(sentence, *factor)) {
                if (!picked.empty()) picked += " ";
                picked += sentence;
            }
        }
    }
    if (picked.empty()) picked = sentences.front();
    return "D" + std::to_string(utterance.step_index) + ": " + picked;
}

std::string first_sentence(const std::string& text) {
    auto sentences = split_sentences(text);
    return sentences.empty() ? "" : sentences.front();
}

}  // namespace

DebateSummaryReport aggregate(const Transcript& transcript, const std::string& corporate_overview) {
    if (transcript.utterances.size() != 10) {
        throw ValidationError("aggregation requires a complete 10-utterance transcript (got " +
                              std::to_string(transcript.utterances.size()) + ")");
    }
    const auto& table = FactorTable::instance();
    DebateSummaryReport report;
    report.corporate_overview = corporate_overview;
    report.objective_statement =
        "Balanced assessment of " + transcript.company_id +
        "'s loan repayment capacity from non-financial evidence; both positions preserved, "
        "no verdict rendered.";

    std::map<std::string, DebateTopic> topics;  // keyed by factor id ("" = unattributed)
    auto topic_for = [&](const std::string& factor_id, int step) -> DebateTopic& {
        auto [it, inserted] = topics.try_emplace(factor_id);
        DebateTopic& topic = it->second;
        if (inserted) {
            topic.factor_id = factor_id;
            const Factor* factor = factor_id.empty() ? nullptr : table.find(factor_id);
            topic.label = factor ? factor->display_name
                                 : (factor_id.empty() ? kUnattributedLabel : factor_id);
            topic.first_mention_step = step;
        }
        topic.first_mention_step = std::min(topic.first_mention_step, step);
        return topic;
    };

    for (const auto& utterance : transcript.utterances) {
        const bool affirmative = utterance.side() == DebateSide::affirmative;
        for (const auto& mention : utterance.structure.factors) {
            DebateTopic& topic = topic_for(mention.factor_id, utterance.step_index);
            std::string text = contribution(utterance, table.find(mention.factor_id));
            if (text.empty()) continue;
            std::string& side_text = affirmative ? topic.pro : topic.con;
            if (!side_text.empty()) side_text += "\n";
            side_text += text;
        }
        // Citations follow their attributed factor so that the report carries
        // exactly the transcript's (date, source) multiset.
        auto owners = attribute_citations(utterance.structure);
        for (std::size_t i = 0; i < owners.size(); ++i) {
            const auto& citation = utterance.structure.citations[i];
            DebateTopic& topic = topic_for(owners[i], utterance.step_index);
            topic.sources.push_back({citation.date, citation.source});
        }
    }

    bool any_factor = false;
    for (const auto& [factor_id, _] : topics) {
        if (!factor_id.empty()) any_factor = true;
    }
    if (!any_factor) {
        // Nothing extractable: emit the degenerate report with empty topics.
        report.degenerate = true;
        return report;
    }

    for (auto& [_, topic] : topics) report.topics.push_back(std::move(topic));
    std::sort(report.topics.begin(), report.topics.end(),
              [](const DebateTopic& a, const DebateTopic& b) {
                  if (a.first_mention_step != b.first_mention_step) {
                      return a.first_mention_step < b.first_mention_step;
                  }
                  return a.label < b.label;
              });

    for (const auto& topic : report.topics) {
        if (!topic.pro.empty()) {
            report.favorable_factor_summary.push_back(topic.label + ": " +
                                                      first_sentence(topic.pro));
        }
        if (!topic.con.empty()) {
            report.adverse_factor_summary.push_back(topic.label + ": " +
                                                    first_sentence(topic.con));
        }
    }
    return report;
}

std::multiset<std::pair<std::string, std::string>> citation_multiset(const Transcript& transcript) {
    std::multiset<std::pair<std::string, std::string>> out;
    for (const auto& utterance : transcript.utterances) {
        for (const auto& citation : utterance.structure.citations) {
            out.insert({citation.date, citation.source});
        }
    }
    return out;
}

std::multiset<std::pair<std::string, std::string>> citation_multiset(
    const DebateSummaryReport& report) {
    std::multiset<std::pair<std::string, std::string>> out;
    for (const auto& topic : report.topics) {
        for (const auto& source : topic.sources) out.insert({source.date, source.source});
    }
    return out;
}

nlohmann::ordered_json render_report(const DebateSummaryReport& report) {
    std::set<std::string> labels;
    for (const auto& topic : report.topics) {
        if (!labels.insert(topic.label).second) {
            throw ValidationError("duplicate topic label '" + topic.label + "'");
        }
    }

    nlohmann::ordered_json summary;
    summary["Favorable Factor Summary"] = report.favorable_factor_summary;
    summary["Adverse Factor Summary"] = report.adverse_factor_summary;
    summary["topics"] = nlohmann::ordered_json::array();
    for (const auto& topic : report.topics) {
        nlohmann::ordered_json entry;
        entry["topic"] = topic.label;
        entry["pro"] = topic.pro;  // empty strings stay, never omitted
        entry["con"] = topic.con;
        entry["sources"] = nlohmann::ordered_json::array();
        for (const auto& source : topic.sources) {
            entry["sources"].push_back({{"date", source.date}, {"source", source.source}});
        }
        summary["topics"].push_back(std::move(entry));
    }

    nlohmann::ordered_json out;
    out["Debate Summary"] = std::move(summary);
    out["Objective Statement"] = report.objective_statement;
    out["Corporate Overview"] = report.corporate_overview;
    out["Transcript Reference"] = report.transcript_ref;
    if (report.degenerate) out["Warning"] = "no extractable factors in transcript";
    return out;
}

DebateSummaryReport parse_report(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("Debate Summary")) {
        throw ValidationError("schema error at $: missing key 'Debate Summary'");
    }
    const auto& summary = document["Debate Summary"];
    DebateSummaryReport report;
    auto read_list = [&](const char* key, std::vector<std::string>& target) {
        if (!summary.contains(key) || !summary[key].is_array()) {
            throw ValidationError(std::string("schema error: missing array '") + key + "'");
        }
        for (const auto& entry : summary[key]) target.push_back(entry.get<std::string>());
    };
    read_list("Favorable Factor Summary", report.favorable_factor_summary);
    read_list("Adverse Factor Summary", report.adverse_factor_summary);
    if (!summary.contains("topics") || !summary["topics"].is_array()) {
        throw ValidationError("schema error: missing array 'topics'");
    }
    int step = 1;
    for (const auto& raw : summary["topics"]) {
        DebateTopic topic;
        topic.label = raw.value("topic", "");
        topic.pro = raw.value("pro", "");
        topic.con = raw.value("con", "");
        topic.first_mention_step = step++;
        if (raw.contains("sources") && raw["sources"].is_array()) {
            for (const auto& source : raw["sources"]) {
                topic.sources.push_back({source.value("date", ""), source.value("source", "")});
            }
        }
        report.topics.push_back(std::move(topic));
    }
    report.objective_statement = document.value("Objective Statement", "");
    report.corporate_overview = document.value("Corporate Overview", "");
    report.transcript_ref = document.value("Transcript Reference", "");
    return report;
}

DebateSummaryReport polish_report(const DebateSummaryReport& report, AgentRuntime& runtime) {
    PromptBundle bundle = runtime.make_bundle(
        "aggregator",
        "Rewrite the prose of this debate summary for fluency. Keep the JSON structure, the "
        "topic labels, and every (date, source) pair exactly as given.\n\n" +
            render_report(report).dump(2),
        {});
    bundle.step_index = 11;  // after the ten debate steps

    std::string response;
    try {
        response = runtime.generate(runtime.role("aggregator"), bundle, 11);
    } catch (const Error& e) {
        runtime.journal().record("polish_rejected", {{"reason", e.what()}});
        return report;
    }
    try {
        DebateSummaryReport polished = parse_report(nlohmann::json::parse(response));
        polished.transcript_ref = report.transcript_ref;
        polished.degenerate = report.degenerate;
        if (citation_multiset(polished) != citation_multiset(report)) {
            runtime.journal().record("polish_rejected",
                                     {{"reason", "citation multiset not preserved"}});
            return report;
        }
        runtime.journal().record("polish_applied", {});
        return polished;
    } catch (const std::exception& e) {
        runtime.journal().record("polish_rejected", {{"reason", e.what()}});
        return report;
    }
}

}  // namespace credreason
