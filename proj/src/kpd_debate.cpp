#include "credreason/kpd_debate.hpp"

#include <algorithm>
#include <set>

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason {

std::string to_string(StepKind kind) {
    switch (kind) {
        case StepKind::constructive: return "constructive";
        case StepKind::cross_examination: return "cross_examination";
        case StepKind::rebuttal: return "rebuttal";
        case StepKind::closing: return "closing";
    }
    return "constructive";
}

const std::array<DebateStepSpec, 10>& debate_schedule() {
    static const std::array<DebateStepSpec, 10> schedule = {{
        {1, "A1", StepKind::constructive, {}, 600, 3, std::nullopt, true},
        {2, "N3", StepKind::cross_examination, {1}, std::nullopt, std::nullopt, 3, true},
        {3, "N1", StepKind::constructive, {}, 600, 3, std::nullopt, true},
        {4, "A3", StepKind::cross_examination, {3}, std::nullopt, std::nullopt, 3, true},
        {5, "A2", StepKind::rebuttal, {3}, 400, std::nullopt, std::nullopt, true},
        {6, "N1", StepKind::cross_examination, {5}, std::nullopt, std::nullopt, 3, true},
        {7, "N2", StepKind::rebuttal, {1}, 400, std::nullopt, std::nullopt, true},
        {8, "A1", StepKind::cross_examination, {7}, std::nullopt, std::nullopt, 3, true},
        {9, "A3", StepKind::closing, {1, 2, 5, 8}, 600, std::nullopt, std::nullopt, false},
        {10, "N3", StepKind::closing, {3, 4, 7, 6}, 600, std::nullopt, std::nullopt, false},
    }};
    return schedule;
}

bool CitationRef::dated() const { return CalendarDate::parse(date).has_value(); }

std::string CitationRef::fingerprint() const { return evidence_fingerprint(date, source, value); }

namespace {

bool is_iso_date(const std::string& text) { return CalendarDate::parse(text).has_value(); }

bool ascii_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Case-insensitive substring scan with ASCII word boundaries. Non-ASCII
// neighbours never block a match: Korean particles attach directly to nouns.
std::vector<std::size_t> find_all_bounded(const std::string& haystack_lower,
                                          const std::string& needle_lower,
                                          const std::string& original) {
    std::vector<std::size_t> positions;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(needle_lower, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !ascii_word_char(original[pos - 1]);
        std::size_t end = pos + needle_lower.size();
        bool right_ok = end >= original.size() || !ascii_word_char(original[end]);
        if (left_ok && right_ok) positions.push_back(pos);
        pos += 1;
    }
    return positions;
}

struct SidecarMarker {
    std::size_t line_start;
    std::string keyword;  // factors | citations | falsifiability
};

bool line_starts_with_ci(const std::string& line, const char* prefix) {
    std::string trimmed = trim(line);
    std::string lowered = to_lower(trimmed);
    return lowered.rfind(prefix, 0) == 0;
}

}  // namespace

ExtractedStructure extract_structure(const std::string& text) {
    ExtractedStructure out;
    const std::string lowered = to_lower(text);

    // Question punctuation: ASCII '?' and full-width U+FF1F.
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '?') ++out.question_count;
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xEF &&
            static_cast<unsigned char>(text[i + 1]) == 0xBC &&
            static_cast<unsigned char>(text[i + 2]) == 0x9F) {
            ++out.question_count;
        }
    }

    // Inline parenthesised citations.
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '(' && text[i] != '[') continue;
        char close = text[i] == '(' ? ')' : ']';
        std::size_t end = text.find(close, i + 1);
        if (end == std::string::npos || end - i > 200) continue;
        std::string inner = text.substr(i + 1, end - i - 1);
        if (inner.find('(') != std::string::npos || inner.find('[') != std::string::npos) continue;
        auto parts = split(inner, ',');
        for (auto& part : parts) part = trim(part);
        CitationRef citation;
        citation.pos = i;
        if (parts.size() == 2 && is_iso_date(parts[0])) {
            citation.date = parts[0];
            citation.source = parts[1];
        } else if (parts.size() == 3 && is_iso_date(parts[1])) {
            citation.value = parts[0];
            citation.date = parts[1];
            citation.source = parts[2];
        } else {
            continue;
        }
        out.citations.push_back(std::move(citation));
    }

    // Structured sidecar blocks.
    std::size_t offset = 0;
    bool in_citation_block = false;
    while (offset <= text.size()) {
        std::size_t eol = text.find('\n', offset);
        std::string line = text.substr(offset, eol == std::string::npos ? std::string::npos
                                                                        : eol - offset);
        std::string trimmed = trim(line);
        std::string lowered_line = to_lower(trimmed);

        if (lowered_line.rfind("citations:", 0) == 0) {
            in_citation_block = true;
        } else if (in_citation_block && !trimmed.empty() && trimmed[0] == '-') {
            std::string entry = trim(trimmed.substr(1));
            auto parts = split(entry, '|');
            for (auto& part : parts) part = trim(part);
            CitationRef citation;
            citation.pos = offset;
            citation.from_sidecar = true;
            if (!parts.empty()) citation.date = parts[0];
            if (parts.size() > 1) citation.source = parts[1];
            if (parts.size() > 2) citation.value = parts[2];
            out.citations.push_back(std::move(citation));
        } else {
            if (!trimmed.empty()) in_citation_block = false;
            if (lowered_line.rfind("falsifiability:", 0) == 0) {
                out.falsifiability_notes = trim(trimmed.substr(std::string("falsifiability:").size()));
            }
        }
        if (eol == std::string::npos) break;
        offset = eol + 1;
    }

    // Factor mentions: ids, display names and aliases anywhere in the text,
    // which covers the "Factors:" sidecar line as well.
    const auto& table = FactorTable::instance();
    std::map<std::string, std::size_t> first_pos;
    for (const auto& factor : table.factors()) {
        std::vector<std::string> names;
        names.push_back(factor.id);
        names.push_back(factor.display_name);
        for (const auto& alias : factor.aliases) names.push_back(alias);
        for (const auto& name : names) {
            auto positions = find_all_bounded(lowered, to_lower(name), text);
            if (positions.empty()) continue;
            auto it = first_pos.find(factor.id);
            if (it == first_pos.end() || positions.front() < it->second) {
                first_pos[factor.id] = positions.front();
            }
        }
    }
    for (const auto& [factor_id, pos] : first_pos) {
        out.factors.push_back({factor_id, pos});
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const FactorMention& a, const FactorMention& b) {
                  if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
                  return a.factor_id < b.factor_id;
              });

    // Deduplicate identical citation tuples: a sidecar entry repeating an
    // inline citation is one piece of evidence, not two.
    std::vector<CitationRef> unique;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (auto& citation : out.citations) {
        auto key = std::make_tuple(citation.value, citation.date, citation.source);
        if (seen.insert(key).second) unique.push_back(std::move(citation));
    }
    std::sort(unique.begin(), unique.end(),
              [](const CitationRef& a, const CitationRef& b) { return a.pos < b.pos; });
    out.citations = std::move(unique);

    // Statement length counts Unicode scalars up to the first sidecar marker;
    // the structured block is bookkeeping, not speech.
    std::size_t body_end = text.size();
    for (const char* marker : {"factors:", "citations:", "falsifiability:"}) {
        std::size_t line_start = 0;
        while (line_start < text.size()) {
            std::size_t eol = text.find('\n', line_start);
            std::string line = text.substr(
                line_start, eol == std::string::npos ? std::string::npos : eol - line_start);
            if (line_starts_with_ci(line, marker)) {
                body_end = std::min(body_end, line_start);
                break;
            }
            if (eol == std::string::npos) break;
            line_start = eol + 1;
        }
    }
    out.body_utf8_length = utf8_length(std::string_view(text).substr(0, body_end));
    out.body_byte_end = body_end;
    return out;
}

std::vector<std::string> attribute_citations(const ExtractedStructure& structure) {
    std::vector<std::string> owners;
    owners.reserve(structure.citations.size());
    for (const auto& citation : structure.citations) {
        const FactorMention* best = nullptr;
        for (const auto& mention : structure.factors) {
            if (mention.first_pos <= citation.pos &&
                (!best || mention.first_pos > best->first_pos)) {
                best = &mention;
            }
        }
        if (!best && !structure.factors.empty()) best = &structure.factors.front();
        owners.push_back(best ? best->factor_id : std::string{});
    }
    return owners;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::missing_citation: return "missing_citation";
        case ViolationKind::undated_citation: return "undated_citation";
        case ViolationKind::factor_reuse: return "factor_reuse";
        case ViolationKind::char_limit_exceeded: return "char_limit_exceeded";
        case ViolationKind::insufficient_factor_signals: return "insufficient_factor_signals";
        case ViolationKind::insufficient_questions: return "insufficient_questions";
        case ViolationKind::new_factor_in_closing: return "new_factor_in_closing";
        case ViolationKind::tool_permission: return "tool_permission";
        case ViolationKind::order_breach: return "order_breach";
    }
    return "order_breach";
}

std::string to_string(Severity severity) { return severity == Severity::hard ? "hard" : "advisory"; }

nlohmann::ordered_json Violation::to_json() const {
    nlohmann::ordered_json out;
    out["kind"] = to_string(kind);
    out["severity"] = to_string(severity);
    out["step"] = step_index;
    out["detail"] = detail;
    return out;
}

DebateSide Utterance::side() const {
    return speaker.rfind("A", 0) == 0 ? DebateSide::affirmative : DebateSide::negative;
}

std::vector<std::string> Utterance::factor_ids() const {
    std::vector<std::string> ids;
    ids.reserve(structure.factors.size());
    for (const auto& mention : structure.factors) ids.push_back(mention.factor_id);
    return ids;
}

std::vector<Violation> validate_step(const Utterance& utterance, const DebateStepSpec& spec,
                                     FactorUsageLedger& ledger,
                                     const std::vector<const Utterance*>& context) {
    std::vector<Violation> violations;
    auto add = [&](ViolationKind kind, Severity severity, std::string detail) {
        violations.push_back({kind, severity, spec.index, std::move(detail)});
    };

    if (utterance.speaker != spec.speaker) {
        add(ViolationKind::order_breach, Severity::hard,
            "speaker mismatch: expected " + std::string(spec.speaker) + ", got " +
                utterance.speaker);
    }

    if (spec.char_limit && utterance.structure.body_utf8_length >
                               static_cast<std::size_t>(*spec.char_limit)) {
        add(ViolationKind::char_limit_exceeded, Severity::advisory,
            "statement length " + std::to_string(utterance.structure.body_utf8_length) +
                " exceeds limit " + std::to_string(*spec.char_limit));
    }

    if (spec.min_factor_signals &&
        static_cast<int>(utterance.structure.factors.size()) < *spec.min_factor_signals) {
        add(ViolationKind::insufficient_factor_signals, Severity::advisory,
            "found " + std::to_string(utterance.structure.factors.size()) +
                " distinct factor signals, need " + std::to_string(*spec.min_factor_signals));
    }

    if (spec.required_question_count &&
        utterance.structure.question_count < *spec.required_question_count) {
        add(ViolationKind::insufficient_questions, Severity::advisory,
            "found " + std::to_string(utterance.structure.question_count) + " questions, need " +
                std::to_string(*spec.required_question_count));
    }

    // Citation policy: every citation needs an explicit date and source.
    // Defects in web-sourced content are hard; pool paraphrase is advisory.
    const Severity citation_severity = utterance.used_web_search ? Severity::hard
                                                                 : Severity::advisory;
    for (const auto& citation : utterance.structure.citations) {
        if (!citation.dated()) {
            add(ViolationKind::undated_citation, citation_severity,
                "citation lacks a parseable date (source: '" + citation.source + "')");
        }
        if (trim(citation.source).empty()) {
            add(ViolationKind::missing_citation, citation_severity,
                "citation lacks a source (date: '" + citation.date + "')");
        }
    }
    if (utterance.structure.citations.empty() && spec.kind != StepKind::cross_examination) {
        add(ViolationKind::missing_citation, citation_severity,
            "no citations present in a " + to_string(spec.kind) + " statement");
    }

    // Factor reuse ledger: only argument-bearing kinds feed the ledger.
    // Cross-examinations question prior factors and closings restate them;
    // neither is a fresh use of the label.
    if (spec.kind == StepKind::constructive || spec.kind == StepKind::rebuttal) {
        const DebateSide side = utterance.side();
        const auto owners = attribute_citations(utterance.structure);
        for (const auto& mention : utterance.structure.factors) {
            std::vector<std::string> fingerprints;
            for (std::size_t i = 0; i < owners.size(); ++i) {
                if (owners[i] == mention.factor_id) {
                    fingerprints.push_back(utterance.structure.citations[i].fingerprint());
                }
            }
            // A factor argued without evidence records an empty fingerprint,
            // so two baseless uses of the same label still surface as reuse.
            if (fingerprints.empty()) fingerprints.push_back(evidence_fingerprint("", "", ""));
            for (const auto& fingerprint : fingerprints) {
                const auto& entries = ledger.entries(side);
                auto it = entries.find({mention.factor_id, fingerprint});
                if (it != entries.end() && !it->second.empty()) {
                    add(ViolationKind::factor_reuse, Severity::advisory,
                        to_string(side) + " side reused factor '" + mention.factor_id +
                            "' with identical evidence (first used at step " +
                            std::to_string(it->second.front().step_index) + ")");
                }
                ledger.record_usage(side, mention.factor_id, fingerprint, spec.index);
            }
        }
    }

    if (!spec.allow_new_factors) {
        std::set<std::string> allowed;
        for (const Utterance* prior : context) {
            for (const auto& mention : prior->structure.factors) allowed.insert(mention.factor_id);
        }
        for (const auto& mention : utterance.structure.factors) {
            if (!allowed.count(mention.factor_id)) {
                add(ViolationKind::new_factor_in_closing, Severity::hard,
                    "closing introduces factor '" + mention.factor_id +
                        "' absent from its context set");
            }
        }
    }

    return violations;
}

nlohmann::ordered_json Transcript::to_json() const {
    auto utterance_json = [](const Utterance& utterance) {
        nlohmann::ordered_json step;
        step["index"] = utterance.step_index;
        step["speaker"] = utterance.speaker;
        step["kind"] = to_string(debate_schedule()[static_cast<std::size_t>(
                                                       utterance.step_index - 1)].kind);
        step["text"] = utterance.text;
        step["citations"] = nlohmann::ordered_json::array();
        for (const auto& citation : utterance.structure.citations) {
            nlohmann::ordered_json c;
            if (!citation.value.empty()) c["value"] = citation.value;
            c["date"] = citation.date;
            c["source"] = citation.source;
            step["citations"].push_back(c);
        }
        step["factors"] = utterance.factor_ids();
        if (!utterance.structure.falsifiability_notes.empty()) {
            step["falsifiability"] = utterance.structure.falsifiability_notes;
        }
        step["question_count"] = utterance.structure.question_count;
        step["used_web_search"] = utterance.used_web_search;
        step["elapsed_seconds"] = utterance.elapsed_seconds;
        return step;
    };

    nlohmann::ordered_json out;
    out["session"] = {{"company_id", company_id}, {"model_id", model_id}, {"locale", locale}};
    out["metadata"] = {{"started_at", started_at}, {"elapsed_seconds_total", elapsed_seconds_total}};
    out["steps"] = nlohmann::ordered_json::array();
    for (const auto& utterance : utterances) {
        auto step = utterance_json(utterance);
        step["violations"] = nlohmann::ordered_json::array();
        for (const auto& violation : violations) {
            if (violation.step_index == utterance.step_index) {
                step["violations"].push_back(violation.to_json());
            }
        }
        out["steps"].push_back(std::move(step));
    }
    if (utterances.size() == 10) {
        out["closing_pro"] = utterance_json(closing_pro());
        out["closing_con"] = utterance_json(closing_con());
    }
    return out;
}

DebateEngine::DebateEngine(AgentRuntime& runtime, const KnowledgePool& pool, DebateParams params)
    : runtime_(runtime), pool_(pool), params_(params) {}

void DebateEngine::begin_session(const std::string& company_id) {
    if (!pool_.has_company(company_id)) {
        throw ConfigError("insufficient data: unknown company '" + company_id + "'");
    }
    company_id_ = company_id;
    transcript_ = Transcript{};
    transcript_.company_id = company_id;
    transcript_.model_id = runtime_.config().model_id;
    transcript_.locale = runtime_.config().locale;
    session_start_ = runtime_.clock().now_millis();
    transcript_.started_at = Clock::iso8601(session_start_);
    ledger_ = FactorUsageLedger{};
    next_step_ = 1;
    session_open_ = true;
    runtime_.journal().record("debate_start", {{"company_id", company_id},
                                               {"recency_days", params_.recency.window_days},
                                               {"as_of", params_.recency.as_of.to_string()},
                                               {"max_search", params_.max_search},
                                               {"strict", params_.strict}});
}

std::string DebateEngine::step_task_text(const DebateStepSpec& spec,
                                         const std::vector<EvidenceItem>& web_items) const {
    std::string task = runtime_.templates().task_prompt(spec.index);
    task = substitute_placeholder(std::move(task), "company_name", company_id_);
    task = substitute_placeholder(std::move(task), "output_language_instruction",
                                  locale_instruction(runtime_.config().locale));

    auto retrieval = pool_.retrieve(company_id_, params_.recency);
    task += "\n\n[Company data]\n";
    for (const auto* item : retrieval.items) {
        task += "- (" + item->date.to_string() + ", " + item->source + ")";
        if (item->factor_tag) task += " [" + *item->factor_tag + "]";
        task += " " + item->content;
        if (item->value) task += " (" + item->value_string() + ")";
        task += "\n";
    }
    if (!web_items.empty()) {
        task += "\n[Web search results]\n";
        for (const auto& item : web_items) {
            task += "- (" + item.date.to_string() + ", " + item.source + ") " + item.content + "\n";
        }
    }
    return task;
}

const Utterance& DebateEngine::execute_step(int index) {
    if (!session_open_) throw ConfigError("no debate session in progress");
    if (index != next_step_) {
        Violation breach{ViolationKind::order_breach, Severity::hard, index,
                         "attempted step " + std::to_string(index) + " while step " +
                             std::to_string(next_step_) + " is due"};
        transcript_.violations.push_back(breach);
        runtime_.journal().record("order_breach", {{"attempted", index}, {"expected", next_step_}});
        throw ValidationError(breach.detail);
    }
    const DebateStepSpec& spec = debate_schedule()[static_cast<std::size_t>(index - 1)];
    const AgentRole& speaker = runtime_.role(spec.speaker);
    const EpochMillis step_start = runtime_.clock().now_millis();

    std::vector<std::string> context_texts;
    std::vector<const Utterance*> context_utterances;
    for (int prior_index : spec.context_indices) {
        const Utterance& prior = transcript_.utterances.at(static_cast<std::size_t>(prior_index - 1));
        context_texts.push_back(prior.text);
        context_utterances.push_back(&prior);
    }

    nlohmann::ordered_json context_json = nlohmann::ordered_json::array();
    for (int prior_index : spec.context_indices) context_json.push_back(prior_index);
    runtime_.journal().record("step_start", {{"index", index},
                                             {"speaker", spec.speaker},
                                             {"kind", to_string(spec.kind)},
                                             {"context", context_json}});

    // A scripted step may request a search; the permission gate decides.
    std::vector<EvidenceItem> web_items;
    auto scripted = runtime_.backend().scripted_entry(spec.speaker, index);
    if (scripted && scripted->search_query) {
        SearchBudget budget{params_.max_search, 0};
        try {
            auto result = runtime_.web_search(speaker, *scripted->search_query, params_.recency,
                                              budget, index);
            web_items = std::move(result.items);
        } catch (const PermissionError& e) {
            Violation violation{ViolationKind::tool_permission, Severity::hard, index, e.what()};
            transcript_.violations.push_back(violation);
            if (params_.strict) {
                runtime_.journal().record("debate_abort",
                                          {{"step", index}, {"reason", violation.detail}});
                session_open_ = false;
                throw ValidationError("hard violation at step " + std::to_string(index) + ": " +
                                      violation.detail);
            }
        }
    }

    PromptBundle bundle = runtime_.make_bundle(spec.speaker, step_task_text(spec, web_items),
                                               context_texts);
    bundle.step_index = index;

    std::string response = runtime_.generate(speaker, bundle, index);

    Utterance utterance;
    utterance.step_index = index;
    utterance.speaker = spec.speaker;
    utterance.text = std::move(response);
    utterance.structure = extract_structure(utterance.text);
    utterance.used_web_search = !web_items.empty();
    utterance.web_evidence = std::move(web_items);
    utterance.elapsed_seconds =
        static_cast<double>(runtime_.clock().now_millis() - step_start) / 1000.0;

    auto violations = validate_step(utterance, spec, ledger_, context_utterances);

    nlohmann::ordered_json violations_json = nlohmann::ordered_json::array();
    for (const auto& violation : violations) violations_json.push_back(violation.to_json());
    runtime_.journal().record("step_end", {{"index", index},
                                           {"factors", utterance.factor_ids()},
                                           {"citations", utterance.structure.citations.size()},
                                           {"violations", violations_json},
                                           {"elapsed_seconds", utterance.elapsed_seconds}});

    transcript_.utterances.push_back(std::move(utterance));
    bool hard_violation = false;
    std::string hard_detail;
    for (auto& violation : violations) {
        if (violation.severity == Severity::hard && !hard_violation) {
            hard_violation = true;
            hard_detail = violation.detail;
        }
        transcript_.violations.push_back(std::move(violation));
    }
    if (hard_violation && params_.strict) {
        runtime_.journal().record("debate_abort", {{"step", index}, {"reason", hard_detail}});
        session_open_ = false;
        throw ValidationError("hard violation at step " + std::to_string(index) + ": " +
                              hard_detail);
    }

    ++next_step_;
    return transcript_.utterances.back();
}

Transcript DebateEngine::finish() {
    if (!session_open_) throw ConfigError("no debate session in progress");
    if (next_step_ <= 10) {
        throw ValidationError("debate incomplete: next step would be " + std::to_string(next_step_));
    }
    // The reuse policy review runs once over the whole session as well; any
    // findings not already attached per step are advisory duplicates, so the
    // per-step results stand as the session's violation list.
    transcript_.elapsed_seconds_total =
        static_cast<double>(runtime_.clock().now_millis() - session_start_) / 1000.0;
    runtime_.journal().record("debate_end",
                              {{"violations", transcript_.violations.size()},
                               {"elapsed_seconds_total", transcript_.elapsed_seconds_total}});
    session_open_ = false;
    return std::move(transcript_);
}

Transcript DebateEngine::run(const std::string& company_id) {
    begin_session(company_id);
    for (int step = 1; step <= 10; ++step) execute_step(step);
    return finish();
}

}  // namespace credreason
