#include "credreason/agent_runtime.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct ParsedUrl {
    bool https = false;
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    std::string rest = url;
    if (rest.rfind("https://", 0) == 0) {
        out.https = true;
        out.port = 443;
        rest = rest.substr(8);
    } else if (rest.rfind("http://", 0) == 0) {
        rest = rest.substr(7);
    } else {
        throw ConfigError("endpoint must start with http:// or https://: " + url);
    }
    auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = authority.find(':');
    if (colon == std::string::npos) {
        out.host = authority;
    } else {
        out.host = authority.substr(0, colon);
        out.port = std::stoi(authority.substr(colon + 1));
    }
    if (out.host.empty()) throw ConfigError("endpoint has no host: " + url);
    return out;
}

std::string script_key(const std::string& role_id, int step_index) {
    return role_id + ":" + std::to_string(step_index);
}

}  // namespace

std::string PromptBundle::render_user_message() const {
    std::string out = task_text;
    if (!context.empty()) {
        out += "\n\n[Prior discourse context]\n";
        for (std::size_t i = 0; i < context.size(); ++i) {
            out += "--- context " + std::to_string(i + 1) + " ---\n";
            out += context[i];
            out += "\n";
        }
    }
    return out;
}

std::string PromptBundle::digest() const {
    std::string all = system_text;
    all += '\x1e';
    all += render_user_message();
    return fnv1a_hex(all);
}

ScriptedBackend::ScriptedBackend(const nlohmann::json& script) {
    const nlohmann::json* steps = &script;
    if (script.is_object() && script.contains("steps")) steps = &script["steps"];
    if (!steps->is_object()) throw ConfigError("scripted transcript must be a JSON object");
    for (const auto& [key, value] : steps->items()) {
        ScriptedEntry entry;
        if (value.is_string()) {
            entry.text = value.get<std::string>();
        } else if (value.is_object()) {
            if (!value.contains("text") || !value["text"].is_string()) {
                throw ConfigError("scripted entry '" + key + "' missing string field 'text'");
            }
            entry.text = value["text"].get<std::string>();
            if (value.contains("search_query") && value["search_query"].is_string()) {
                entry.search_query = value["search_query"].get<std::string>();
            }
        } else {
            throw ConfigError("scripted entry '" + key + "' must be a string or object");
        }
        entries_[key] = std::move(entry);
    }
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("script file " + path + ": " + e.what());
    }
    return std::make_unique<ScriptedBackend>(doc);
}

std::string ScriptedBackend::generate(const std::string& model_id, const PromptBundle& bundle) {
    (void)model_id;
    auto it = entries_.find(script_key(bundle.role_id, bundle.step_index));
    if (it == entries_.end()) {
        throw ConfigError("scripted transcript has no entry for (" + bundle.role_id + ", step " +
                          std::to_string(bundle.step_index) + ")");
    }
    return it->second.text;
}

std::optional<ScriptedEntry> ScriptedBackend::scripted_entry(const std::string& role_id,
                                                             int step_index) const {
    auto it = entries_.find(script_key(role_id, step_index));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

RemoteBackend::RemoteBackend(std::string endpoint, std::string api_key, nlohmann::json sampling)
    : api_key_(std::move(api_key)), sampling_(std::move(sampling)) {
    auto url = parse_url(endpoint);
    if (url.https) throw ConfigError("https endpoints are not supported in this build: " + endpoint);
    host_ = url.host;
    port_ = url.port;
    path_prefix_ = url.path;
}

std::string RemoteBackend::generate(const std::string& model_id, const PromptBundle& bundle) {
    nlohmann::ordered_json request;
    request["model"] = model_id;
    request["messages"] = nlohmann::ordered_json::array();
    request["messages"].push_back({{"role", "system"}, {"content", bundle.system_text}});
    request["messages"].push_back({{"role", "user"}, {"content", bundle.render_user_message()}});
    if (sampling_.is_object()) {
        for (const auto& [key, value] : sampling_.items()) request[key] = value;
    }
    const std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(retry_delay_ms_ * attempt));
        }
        httplib::Client client(host_, port_);
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto response = client.Post(path_prefix_.c_str(), headers, body, "application/json");
        if (!response) {
            last_error = "transport error: " + httplib::to_string(response.error());
            continue;  // retryable
        }
        if (response->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(response->status);
            continue;  // retryable
        }
        if (response->status != 200) {
            throw BackendError("chat completion failed: HTTP " + std::to_string(response->status) +
                               " " + response->body);
        }
        try {
            auto parsed = nlohmann::json::parse(response->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("malformed chat completion response: ") + e.what());
        }
    }
    throw BackendError("chat completion failed after retries: " + last_error, true);
}

StubSearchProvider::StubSearchProvider(const nlohmann::json& fixture) {
    auto parse_hits = [](const nlohmann::json& list) {
        std::vector<SearchHit> hits;
        for (const auto& raw : list) {
            SearchHit hit;
            hit.title = raw.value("title", "");
            hit.snippet = raw.value("snippet", "");
            hit.date = raw.value("date", "");
            hit.source = raw.value("source", "");
            hit.url = raw.value("url", "");
            hits.push_back(std::move(hit));
        }
        return hits;
    };
    if (fixture.is_array()) {
        hits_by_query_["*"] = parse_hits(fixture);
    } else if (fixture.is_object()) {
        for (const auto& [query, list] : fixture.items()) {
            hits_by_query_[query] = parse_hits(list);
        }
    } else if (!fixture.is_null()) {
        throw ConfigError("search fixture must be a JSON array or object");
    }
}

std::unique_ptr<StubSearchProvider> StubSearchProvider::from_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("search fixture " + path + ": " + e.what());
    }
    return std::make_unique<StubSearchProvider>(doc);
}

std::vector<SearchHit> StubSearchProvider::search(const std::string& query, int max_items,
                                                  const std::string& date_floor) {
    (void)date_floor;
    ++calls_;
    auto it = hits_by_query_.find(query);
    if (it == hits_by_query_.end()) it = hits_by_query_.find("*");
    if (it == hits_by_query_.end()) return {};
    auto hits = it->second;
    if (static_cast<int>(hits.size()) > max_items) hits.resize(static_cast<std::size_t>(max_items));
    return hits;
}

HttpSearchProvider::HttpSearchProvider(std::string endpoint, std::string api_key)
    : api_key_(std::move(api_key)) {
    auto url = parse_url(endpoint);
    if (url.https) throw ConfigError("https endpoints are not supported in this build: " + endpoint);
    host_ = url.host;
    port_ = url.port;
    path_ = url.path;
}

std::vector<SearchHit> HttpSearchProvider::search(const std::string& query, int max_items,
                                                  const std::string& date_floor) {
    nlohmann::ordered_json request;
    request["query"] = query;
    request["max_items"] = max_items;
    request["date_floor"] = date_floor;

    httplib::Client client(host_, port_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto response = client.Post(path_.c_str(), headers, request.dump(), "application/json");
    if (!response) {
        throw BackendError("search provider transport error: " + httplib::to_string(response.error()),
                           true);
    }
    if (response->status != 200) {
        throw BackendError("search provider failed: HTTP " + std::to_string(response->status), true);
    }
    std::vector<SearchHit> hits;
    try {
        auto parsed = nlohmann::json::parse(response->body);
        const auto& list = parsed.is_array() ? parsed : parsed.at("results");
        for (const auto& raw : list) {
            SearchHit hit;
            hit.title = raw.value("title", "");
            hit.snippet = raw.value("snippet", "");
            hit.date = raw.value("date", "");
            hit.source = raw.value("source", "");
            hit.url = raw.value("url", "");
            hits.push_back(std::move(hit));
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed search provider response: ") + e.what());
    }
    return hits;
}

PromptTemplates PromptTemplates::load(const std::string& dir) {
    namespace fs = std::filesystem;
    PromptTemplates templates;
    templates.dir_ = dir;
    auto require = [&](const std::string& relative) {
        fs::path path = fs::path(dir) / relative;
        if (!fs::is_regular_file(path)) {
            throw ConfigError("missing prompt template: " + path.string());
        }
        return read_file(path.string());
    };
    templates.guideline_ = require("guideline.txt");
    templates.debate_rules_ = require("debate_rules.txt");
    templates.nas_analysis_ = require("nas_analysis.txt");
    for (const std::string role :
         {"a1", "a2", "a3", "n1", "n2", "n3", "aggregator", "nas_analyst"}) {
        fs::path path = fs::path(dir) / "roles" / (role + ".txt");
        if (!fs::is_regular_file(path)) {
            std::string label = role;
            std::transform(label.begin(), label.end(), label.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            throw ConfigError("missing role template for " + label + ": " + path.string());
        }
        templates.roles_[role] = read_file(path.string());
    }
    for (int step = 1; step <= 10; ++step) {
        char name[32];
        std::snprintf(name, sizeof(name), "tasks/task_%02d.txt", step);
        templates.tasks_[step] = require(name);
    }
    return templates;
}

std::string PromptTemplates::role_prompt(const std::string& role_id) const {
    auto it = roles_.find(to_lower(role_id));
    if (it == roles_.end()) throw ConfigError("no template for role " + role_id);
    return it->second;
}

std::string PromptTemplates::task_prompt(int step_index) const {
    auto it = tasks_.find(step_index);
    if (it == tasks_.end()) throw ConfigError("no task template for step " + std::to_string(step_index));
    return it->second;
}

std::string locale_instruction(const std::string& locale) {
    if (locale == "ko") return "All responses must be written in Korean.";
    if (locale == "en") return "All responses must be written in English.";
    return "All responses must be written in the '" + locale + "' locale language.";
}

AgentRuntime::AgentRuntime(RuntimeConfig config, Backend& backend, SearchProvider& search_provider,
                           RunJournal& journal, Clock& clock)
    : config_(std::move(config)),
      templates_(PromptTemplates::load(config_.template_dir)),
      backend_(backend),
      search_provider_(search_provider),
      journal_(journal),
      clock_(clock) {
    struct RoleSpec {
        const char* id;
        const char* team;
        bool search_allowed;
    };
    // The tool policy: web search for A1, A2, N1, N2 only.
    static constexpr RoleSpec specs[] = {
        {"A1", "affirmative", true}, {"A2", "affirmative", true}, {"A3", "affirmative", false},
        {"N1", "negative", true},    {"N2", "negative", true},    {"N3", "negative", false},
        {"aggregator", "neutral", false}, {"nas_analyst", "neutral", false},
    };
    for (const auto& spec : specs) {
        AgentRole role;
        role.id = spec.id;
        role.team = spec.team;
        role.search_allowed = spec.search_allowed;
        std::string prompt = templates_.debate_rules() + "\n" + templates_.role_prompt(spec.id);
        if (std::string(spec.id) == "nas_analyst") {
            prompt = templates_.role_prompt(spec.id);
        }
        prompt = substitute_placeholder(std::move(prompt), "company_name", config_.company_name);
        prompt = substitute_placeholder(std::move(prompt), "output_language_instruction",
                                        locale_instruction(config_.locale));
        role.system_prompt = std::move(prompt);
        if (role.team != "neutral") debate_agents_.push_back(role);
        roles_[role.id] = std::move(role);
    }
    roles_.at("aggregator");  // all eight present by construction
}

const AgentRole& AgentRuntime::role(const std::string& role_id) const {
    auto it = roles_.find(role_id);
    if (it == roles_.end()) throw ConfigError("unknown agent role: " + role_id);
    return it->second;
}

PromptBundle AgentRuntime::make_bundle(const std::string& role_id, std::string task_text,
                                       std::vector<std::string> context) const {
    PromptBundle bundle;
    bundle.role_id = role_id;
    bundle.system_text = role(role_id).system_prompt;
    bundle.task_text = std::move(task_text);
    bundle.context = std::move(context);
    bundle.locale = config_.locale;
    return bundle;
}

std::string AgentRuntime::generate(const AgentRole& role, const PromptBundle& bundle,
                                   int step_index) {
    std::string response = backend_.generate(config_.model_id, bundle);
    journal_.record("generate", {{"role", role.id},
                                 {"step", step_index},
                                 {"prompt_digest", bundle.digest()},
                                 {"context_size", bundle.context.size()},
                                 {"response", response}});
    return response;
}

WebSearchResult AgentRuntime::web_search(const AgentRole& role, const std::string& query,
                                         const RecencyPolicy& policy, SearchBudget& budget,
                                         int step_index) {
    if (!role.search_allowed) {
        journal_.record("search_denied",
                        {{"role", role.id}, {"step", step_index}, {"query", query}});
        throw PermissionError("web search denied for role " + role.id);
    }
    return run_search(role.id, query, policy, budget, step_index);
}

WebSearchResult AgentRuntime::pipeline_search(const std::string& query,
                                              const RecencyPolicy& policy, SearchBudget& budget) {
    return run_search("pipeline", query, policy, budget, 0);
}

WebSearchResult AgentRuntime::run_search(const std::string& caller, const std::string& query,
                                         const RecencyPolicy& policy, SearchBudget& budget,
                                         int step_index) {
    WebSearchResult result;
    if (budget.exhausted()) {
        journal_.record("search_skipped", {{"role", caller},
                                           {"step", step_index},
                                           {"query", query},
                                           {"reason", "budget exhausted"}});
        result.budget_exhausted = true;
        return result;
    }

    const std::string date_floor = policy.as_of.minus_days(policy.window_days).to_string();
    const int item_cap = budget.remaining();
    std::vector<SearchHit> hits;
    std::string last_error;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        try {
            hits = search_provider_.search(query, item_cap, date_floor);
            last_error.clear();
            break;
        } catch (const BackendError& e) {
            last_error = e.what();
            if (!e.retryable()) throw;
        }
    }
    if (!last_error.empty()) throw BackendError("search failed after retries: " + last_error);

    budget.calls_used += 1;
    std::size_t dropped = 0;
    for (const auto& hit : hits) {
        if (result.items.size() >= static_cast<std::size_t>(item_cap)) break;
        auto date = CalendarDate::parse(hit.date);
        if (!date || hit.source.empty()) {
            ++dropped;  // undated or unsourced hits are unusable under the citation policy
            continue;
        }
        EvidenceItem item;
        item.company_id = config_.company_name;
        item.kind = EvidenceKind::news;
        item.content = hit.title.empty() ? hit.snippet : hit.title + ". " + hit.snippet;
        item.date = *date;
        item.source = hit.source;
        item.origin = EvidenceOrigin::web_search;
        item.retrieved_at = clock_.now_iso8601();
        result.items.push_back(std::move(item));
    }
    journal_.record("search_ok", {{"role", caller},
                                  {"step", step_index},
                                  {"query", query},
                                  {"returned", hits.size()},
                                  {"kept", result.items.size()},
                                  {"dropped_undated_or_unsourced", dropped}});
    return result;
}

}  // namespace credreason
