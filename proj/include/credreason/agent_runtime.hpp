#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/clock.hpp"
#include "credreason/journal.hpp"
#include "credreason/knowledge_pool.hpp"

namespace credreason {

// Debate roles plus the two non-debate roles. Only A1, A2, N1 and N2 hold the
// web-search permission; synthesis roles argue from prior discourse alone, and
// the single-pass analyst's search happens in its pipeline, not in the role.
struct AgentRole {
    std::string id;            // A1, A2, A3, N1, N2, N3, aggregator, nas_analyst
    std::string team;          // affirmative | negative | neutral
    bool search_allowed = false;
    std::string system_prompt;
};

struct PromptBundle {
    std::string role_id;
    int step_index = 1;  // schedule position; single-pass analysis uses 1
    std::string system_text;
    std::string task_text;
    std::vector<std::string> context;  // prior utterance texts, schedule order
    std::string locale;

    std::string render_user_message() const;
    std::string digest() const;
};

struct ScriptedEntry {
    std::string text;
    std::optional<std::string> search_query;  // step asks for a search first
};

enum class BackendMode { scripted, remote };

struct BackendDescriptor {
    BackendMode mode = BackendMode::scripted;
    std::string model_id;
    std::string endpoint;                      // remote only
    std::string api_key_env = "CREDREASON_API_KEY";
    std::string script_path;                   // scripted only
    nlohmann::json sampling;                   // passed through to the provider verbatim
};

// Generation backend. Scripted playback and the HTTP chat-completion client
// share this surface so pipelines cannot tell them apart.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string generate(const std::string& model_id, const PromptBundle& bundle) = 0;
    virtual BackendMode mode() const = 0;

    // Search request attached to the scripted step, when the script has one.
    virtual std::optional<ScriptedEntry> scripted_entry(const std::string& role_id,
                                                        int step_index) const {
        (void)role_id;
        (void)step_index;
        return std::nullopt;
    }
};

// Plays back a transcript keyed by (role, step). A gap in the transcript is a
// configuration error, not a generation failure.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(const nlohmann::json& script);
    static std::unique_ptr<ScriptedBackend> from_file(const std::string& path);

    std::string generate(const std::string& model_id, const PromptBundle& bundle) override;
    BackendMode mode() const override { return BackendMode::scripted; }
    std::optional<ScriptedEntry> scripted_entry(const std::string& role_id,
                                                int step_index) const override;

private:
    std::map<std::string, ScriptedEntry> entries_;  // key "ROLE:step"
};

// HTTP JSON chat-completion client:
//   request  {model, messages:[{role, content}]}
//   response {choices:[{message:{content}}]}
// Transport errors are retried twice with backoff, then fail the step.
class RemoteBackend final : public Backend {
public:
    RemoteBackend(std::string endpoint, std::string api_key, nlohmann::json sampling = {});

    std::string generate(const std::string& model_id, const PromptBundle& bundle) override;
    BackendMode mode() const override { return BackendMode::remote; }

    void set_max_retries(int retries) { max_retries_ = retries; }
    void set_retry_delay_ms(int ms) { retry_delay_ms_ = ms; }

private:
    std::string host_;
    int port_ = 80;
    std::string path_prefix_;
    std::string api_key_;
    nlohmann::json sampling_;
    int max_retries_ = 2;
    int retry_delay_ms_ = 200;
};

struct SearchHit {
    std::string title;
    std::string snippet;
    std::string date;  // ISO, may be empty for defective provider rows
    std::string source;
    std::string url;
};

// Search provider interface: request {query, max_items, date_floor}.
class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<SearchHit> search(const std::string& query, int max_items,
                                          const std::string& date_floor) = 0;
};

// Fixture-backed provider for scripted runs and tests. Hits may be keyed by
// query; the "*" key matches anything.
class StubSearchProvider final : public SearchProvider {
public:
    StubSearchProvider() = default;
    explicit StubSearchProvider(const nlohmann::json& fixture);
    static std::unique_ptr<StubSearchProvider> from_file(const std::string& path);

    std::vector<SearchHit> search(const std::string& query, int max_items,
                                  const std::string& date_floor) override;

    int call_count() const { return calls_; }

private:
    std::map<std::string, std::vector<SearchHit>> hits_by_query_;
    int calls_ = 0;
};

class HttpSearchProvider final : public SearchProvider {
public:
    explicit HttpSearchProvider(std::string endpoint, std::string api_key = "");

    std::vector<SearchHit> search(const std::string& query, int max_items,
                                  const std::string& date_floor) override;

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    std::string api_key_;
};

// m search calls per budget; a call may keep at most the remaining call count
// in items, so a fresh budget admits at most m items from the first call.
struct SearchBudget {
    int max_calls = 0;
    int calls_used = 0;

    int remaining() const { return max_calls - calls_used; }
    bool exhausted() const { return remaining() <= 0; }
};

struct WebSearchResult {
    bool budget_exhausted = false;
    std::vector<EvidenceItem> items;
};

// Prompt template directory layout:
//   guideline.txt, debate_rules.txt, nas_analysis.txt, factors.json,
//   roles/<id>.txt, tasks/task_01.txt .. task_10.txt
class PromptTemplates {
public:
    static PromptTemplates load(const std::string& dir);

    const std::string& guideline() const { return guideline_; }
    const std::string& debate_rules() const { return debate_rules_; }
    const std::string& nas_analysis() const { return nas_analysis_; }
    std::string role_prompt(const std::string& role_id) const;
    std::string task_prompt(int step_index) const;

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::string guideline_;
    std::string debate_rules_;
    std::string nas_analysis_;
    std::map<std::string, std::string> roles_;
    std::map<int, std::string> tasks_;
};

struct RuntimeConfig {
    std::string template_dir;
    std::string locale = "ko";  // output language tag
    std::string company_name;
    std::string model_id = "scripted";
};

std::string locale_instruction(const std::string& locale);

// Owns the role set, prompt rendering, backend dispatch and the search
// permission gate. One runtime per session; the journal is single-writer.
class AgentRuntime {
public:
    AgentRuntime(RuntimeConfig config, Backend& backend, SearchProvider& search_provider,
                 RunJournal& journal, Clock& clock);

    // Exactly the six debate roles plus the aggregator.
    const std::vector<AgentRole>& debate_agents() const { return debate_agents_; }
    const AgentRole& role(const std::string& role_id) const;
    const PromptTemplates& templates() const { return templates_; }

    PromptBundle make_bundle(const std::string& role_id, std::string task_text,
                             std::vector<std::string> context) const;

    // Dispatches to the backend and journals (role, step, prompt digest, response).
    std::string generate(const AgentRole& role, const PromptBundle& bundle, int step_index);

    // Permission is checked first and a denial never touches the budget.
    // An exhausted budget returns the empty "budget exhausted" result without
    // calling the provider.
    WebSearchResult web_search(const AgentRole& role, const std::string& query,
                               const RecencyPolicy& policy, SearchBudget& budget, int step_index);

    // Search performed by the single-pass pipeline itself rather than through
    // an agent tool call; same budget and recency machinery, no role gate.
    WebSearchResult pipeline_search(const std::string& query, const RecencyPolicy& policy,
                                    SearchBudget& budget);

    Backend& backend() { return backend_; }
    RunJournal& journal() { return journal_; }
    Clock& clock() { return clock_; }
    const RuntimeConfig& config() const { return config_; }

private:
    WebSearchResult run_search(const std::string& caller, const std::string& query,
                               const RecencyPolicy& policy, SearchBudget& budget, int step_index);

    RuntimeConfig config_;
    PromptTemplates templates_;
    Backend& backend_;
    SearchProvider& search_provider_;
    RunJournal& journal_;
    Clock& clock_;
    std::vector<AgentRole> debate_agents_;
    std::map<std::string, AgentRole> roles_;
};

}  // namespace credreason
