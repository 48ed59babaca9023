#include "credreason/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "credreason/agent_runtime.hpp"
#include "credreason/errors.hpp"
#include "credreason/eval_stats.hpp"
#include "credreason/journal.hpp"
#include "credreason/knowledge_pool.hpp"
#include "credreason/kpd_debate.hpp"
#include "credreason/nas_pipeline.hpp"
#include "credreason/reasoning_metrics.hpp"
#include "credreason/report_synthesis.hpp"

namespace credreason::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    int recency_days = 90;
    int max_search = 3;
    std::string model_id = "gpt-4o";
    std::string backend = "scripted";
    std::string script_path;
    std::string endpoint;
    std::string search_endpoint;
    std::string search_fixture;
    std::string api_key_env = "CREDREASON_API_KEY";
    std::string locale = "ko";
    std::string pool_dir;
    std::string template_dir = "templates";
    std::string out_dir;
    std::string as_of;          // empty = today per clock
    std::string clock = "";     // wall | fixed; empty = fixed for scripted, wall for remote
    std::string run_id = "run";
    std::string search = "always";  // nas: always | if-sparse
    bool strict = true;
    bool polish = false;
    int jobs = 1;
    std::vector<std::string> companies;
};

void apply_environment(RunConfig& config) {
    if (const char* value = std::getenv("CREDREASON_TEMPLATES")) config.template_dir = value;
    if (const char* value = std::getenv("CREDREASON_LOCALE")) config.locale = value;
    if (const char* value = std::getenv("CREDREASON_MODEL")) config.model_id = value;
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    config.recency_days = doc.value("recency_days", config.recency_days);
    config.max_search = doc.value("max_search", config.max_search);
    config.model_id = doc.value("model_id", config.model_id);
    config.backend = doc.value("backend", config.backend);
    config.script_path = doc.value("script", config.script_path);
    config.endpoint = doc.value("endpoint", config.endpoint);
    config.search_endpoint = doc.value("search_endpoint", config.search_endpoint);
    config.search_fixture = doc.value("search_fixture", config.search_fixture);
    config.locale = doc.value("locale", config.locale);
    config.pool_dir = doc.value("pool", config.pool_dir);
    config.template_dir = doc.value("templates", config.template_dir);
    config.out_dir = doc.value("out", config.out_dir);
    config.as_of = doc.value("as_of", config.as_of);
    config.clock = doc.value("clock", config.clock);
    config.run_id = doc.value("run_id", config.run_id);
    config.search = doc.value("search", config.search);
    config.strict = doc.value("strict", config.strict);
    config.polish = doc.value("polish", config.polish);
    config.jobs = doc.value("jobs", config.jobs);
}

// The config file path must be known before CLI11 parses the rest, so the
// argument list is scanned for --config up front.
std::string find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return "";
}

struct Session {
    std::unique_ptr<Clock> clock;
    std::unique_ptr<Backend> backend;
    std::unique_ptr<SearchProvider> search_provider;
    std::unique_ptr<RunJournal> journal;
    std::unique_ptr<AgentRuntime> runtime;
    RecencyPolicy recency;
};

std::string resolved_clock(const RunConfig& config) {
    if (!config.clock.empty()) return config.clock;
    return config.backend == "scripted" ? "fixed" : "wall";
}

Session open_session(const RunConfig& config, const std::string& company_id,
                     const std::string& journal_path) {
    Session session;
    const std::string clock_mode = resolved_clock(config);
    if (clock_mode == "fixed") {
        session.clock = std::make_unique<FixedClock>();
    } else if (clock_mode == "wall") {
        session.clock = std::make_unique<WallClock>();
    } else {
        throw ConfigError("unknown clock mode: " + clock_mode);
    }

    if (config.backend == "scripted") {
        if (config.script_path.empty()) {
            throw ConfigError("scripted backend requires --script FILE");
        }
        session.backend = ScriptedBackend::from_file(config.script_path);
        // Scripted runs never open a network path; searches go to the stub.
        if (!config.search_fixture.empty()) {
            session.search_provider = StubSearchProvider::from_file(config.search_fixture);
        } else {
            session.search_provider = std::make_unique<StubSearchProvider>();
        }
    } else if (config.backend == "remote") {
        if (config.endpoint.empty()) throw ConfigError("remote backend requires --endpoint URL");
        const char* key = std::getenv(config.api_key_env.c_str());
        if (!key || !*key) {
            throw ConfigError("remote backend requires credentials in $" + config.api_key_env);
        }
        session.backend = std::make_unique<RemoteBackend>(config.endpoint, key);
        if (!config.search_endpoint.empty()) {
            session.search_provider = std::make_unique<HttpSearchProvider>(config.search_endpoint,
                                                                           key);
        } else if (!config.search_fixture.empty()) {
            session.search_provider = StubSearchProvider::from_file(config.search_fixture);
        } else {
            session.search_provider = std::make_unique<StubSearchProvider>();
        }
    } else {
        throw ConfigError("unknown backend: " + config.backend);
    }

    session.journal = std::make_unique<RunJournal>(journal_path, *session.clock);

    RuntimeConfig runtime_config;
    runtime_config.template_dir = config.template_dir;
    runtime_config.locale = config.locale;
    runtime_config.company_name = company_id;
    runtime_config.model_id = config.model_id;
    session.runtime = std::make_unique<AgentRuntime>(runtime_config, *session.backend,
                                                     *session.search_provider, *session.journal,
                                                     *session.clock);

    session.recency.window_days = config.recency_days;
    if (config.recency_days < 1) throw ConfigError("recency window must be >= 1 day");
    if (config.max_search < 0) throw ConfigError("max search count must be >= 0");
    if (!config.as_of.empty()) {
        auto parsed = CalendarDate::parse(config.as_of);
        if (!parsed) throw ConfigError("bad --as-of date: " + config.as_of);
        session.recency.as_of = *parsed;
    } else {
        session.recency.as_of = Clock::date_of(session.clock->now_millis());
    }
    return session;
}

void write_text_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

nlohmann::ordered_json config_to_json(const RunConfig& config, const std::string& command) {
    nlohmann::ordered_json out;
    out["command"] = command;
    out["companies"] = config.companies;
    out["pool"] = config.pool_dir;
    out["templates"] = config.template_dir;
    out["recency_days"] = config.recency_days;
    out["max_search"] = config.max_search;
    out["model_id"] = config.model_id;
    out["backend"] = config.backend;
    out["script"] = config.script_path;
    out["search_fixture"] = config.search_fixture;
    out["locale"] = config.locale;
    out["as_of"] = config.as_of;
    out["clock"] = resolved_clock(config);
    out["run_id"] = config.run_id;
    out["search"] = config.search;
    out["strict"] = config.strict;
    out["polish"] = config.polish;
    return out;
}

RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig config;
    config.companies = doc.value("companies", std::vector<std::string>{});
    config.pool_dir = doc.value("pool", "");
    config.template_dir = doc.value("templates", "templates");
    config.recency_days = doc.value("recency_days", 90);
    config.max_search = doc.value("max_search", 3);
    config.model_id = doc.value("model_id", "gpt-4o");
    config.backend = doc.value("backend", "scripted");
    config.script_path = doc.value("script", "");
    config.search_fixture = doc.value("search_fixture", "");
    config.locale = doc.value("locale", "ko");
    config.as_of = doc.value("as_of", "");
    config.clock = doc.value("clock", "");
    config.run_id = doc.value("run_id", "run");
    config.search = doc.value("search", "always");
    config.strict = doc.value("strict", true);
    config.polish = doc.value("polish", false);
    return config;
}

std::string artifact_name(const std::string& company, const std::string& run_id,
                          const std::string& suffix) {
    return company + "_" + run_id + "_" + suffix;
}

// One nas or debate execution for a single company; returns artifact names.
std::vector<std::string> execute_company(const RunConfig& config, const std::string& command,
                                         const std::string& company, const fs::path& out_dir,
                                         std::ostream& out, std::mutex& out_mutex) {
    std::vector<std::string> artifacts;
    const std::string journal_name = artifact_name(company, config.run_id, "journal.jsonl");
    Session session = open_session(config, company, (out_dir / journal_name).string());
    artifacts.push_back(journal_name);

    KnowledgePool pool;
    pool.load_directory(config.pool_dir);

    if (command == "nas") {
        NasParams params;
        params.recency = session.recency;
        params.max_search = config.max_search;
        params.search_mode = config.search == "if-sparse" ? NasSearchMode::if_sparse
                                                          : NasSearchMode::always;
        const std::string report_name = artifact_name(company, config.run_id, "nas_report.json");
        params.out_path = (out_dir / report_name).string();
        AnalysisReport report = run_nas(*session.runtime, pool, company, params);
        artifacts.push_back(report_name);
        std::lock_guard<std::mutex> lock(out_mutex);
        out << company << ": nas report with " << report.topics.size() << " topics -> "
            << params.out_path << "\n";
    } else {
        DebateParams params;
        params.recency = session.recency;
        params.max_search = config.max_search;
        params.strict = config.strict;
        DebateEngine engine(*session.runtime, pool, params);
        Transcript transcript = engine.run(company);

        const std::string transcript_name = artifact_name(company, config.run_id,
                                                          "transcript.json");
        write_text_file(out_dir / transcript_name, transcript.to_json().dump(2) + "\n");
        artifacts.push_back(transcript_name);

        std::string overview;
        try {
            overview = pool.summarize_company(company).overview;
        } catch (const Error&) {
            overview.clear();
        }
        DebateSummaryReport report = aggregate(transcript, overview);
        report.transcript_ref = transcript_name;
        if (config.polish) report = polish_report(report, *session.runtime);
        const std::string summary_name = artifact_name(company, config.run_id,
                                                       "debate_summary.json");
        write_text_file(out_dir / summary_name, render_report(report).dump(2) + "\n");
        artifacts.push_back(summary_name);

        std::lock_guard<std::mutex> lock(out_mutex);
        out << company << ": transcript with " << transcript.utterances.size() << " steps, "
            << transcript.violations.size() << " violation(s)";
        if (report.degenerate) out << " [warning: no extractable factors]";
        out << " -> " << (out_dir / summary_name).string() << "\n";
    }
    return artifacts;
}

int run_pipeline_command(const RunConfig& config, const std::string& command, std::ostream& out) {
    if (config.companies.empty()) throw UsageError("at least one --company is required");
    if (config.pool_dir.empty()) throw UsageError("--pool DIR is required");

    fs::path out_dir = config.out_dir.empty() ? fs::path("runs") / (command + "_" + config.run_id)
                                              : fs::path(config.out_dir);
    fs::create_directories(out_dir);

    std::vector<std::string> artifacts;
    std::mutex out_mutex;
    std::mutex artifacts_mutex;
    std::vector<std::string> errors;

    const int workers = std::max(1, std::min<int>(config.jobs,
                                                  static_cast<int>(config.companies.size())));
    if (workers == 1) {
        for (const auto& company : config.companies) {
            auto names = execute_company(config, command, company, out_dir, out, out_mutex);
            artifacts.insert(artifacts.end(), names.begin(), names.end());
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&]() {
                while (true) {
                    std::size_t index = next.fetch_add(1);
                    if (index >= config.companies.size()) return;
                    try {
                        auto names = execute_company(config, command, config.companies[index],
                                                     out_dir, out, out_mutex);
                        std::lock_guard<std::mutex> lock(artifacts_mutex);
                        artifacts.insert(artifacts.end(), names.begin(), names.end());
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(artifacts_mutex);
                        errors.push_back(config.companies[index] + ": " + e.what());
                    }
                }
            });
        }
        for (auto& thread : threads) thread.join();
        if (!errors.empty()) throw ValidationError("session failures: " + errors.front());
    }

    nlohmann::ordered_json run_config = config_to_json(config, command);
    run_config["artifacts"] = artifacts;
    write_text_file(out_dir / "run_config.json", run_config.dump(2) + "\n");
    return 0;
}

int run_ingest(const RunConfig& config, std::ostream& out) {
    if (config.pool_dir.empty()) throw UsageError("--pool DIR is required");
    KnowledgePool pool;
    auto results = pool.load_directory(config.pool_dir);

    nlohmann::ordered_json report;
    report["pool"] = config.pool_dir;
    report["companies"] = nlohmann::ordered_json::array();
    std::size_t total_items = 0;
    std::size_t total_rejections = 0;
    for (const auto& result : results) {
        nlohmann::ordered_json entry;
        entry["company_id"] = result.company_id;
        entry["accepted"] = result.accepted;
        entry["rejections"] = nlohmann::ordered_json::array();
        for (const auto& rejection : result.rejections) {
            entry["rejections"].push_back({{"record", rejection.record_index},
                                           {"field", rejection.field},
                                           {"reason", rejection.reason}});
        }
        entry["warnings"] = nlohmann::ordered_json::array();
        for (const auto& warning : result.warnings) {
            entry["warnings"].push_back({{"record", warning.record_index},
                                         {"message", warning.message}});
        }
        total_items += result.accepted;
        total_rejections += result.rejections.size();
        report["companies"].push_back(std::move(entry));
        out << result.company_id << ": " << result.accepted << " item(s), "
            << result.rejections.size() << " rejection(s)\n";
    }
    out << "total: " << total_items << " item(s), " << total_rejections << " rejection(s)\n";

    if (!config.out_dir.empty()) {
        write_text_file(fs::path(config.out_dir) / "ingest_report.json", report.dump(2) + "\n");
    }
    return 0;
}

ReasoningTree tree_from_report_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("report file " + path + ": " + e.what());
    }
    if (doc.contains("Analysis Summary")) {
        AnalysisReport report = post_process(doc.dump());
        return build_tree_from_report(report);
    }
    if (doc.contains("Debate Summary")) {
        return build_tree_from_report(parse_report(doc));
    }
    throw ValidationError("report file " + path +
                          ": neither an analysis report nor a debate summary");
}

void print_rei(std::ostream& out, const std::string& label, const ReasoningTree& tree,
               const ReiResult& result) {
    out << label << (tree.heuristic ? " (heuristic)" : "") << "\n";
    out << "  breadth        " << result.breadth << "\n";
    out << "  depth_profile  ";
    for (std::size_t i = 0; i < result.depth_profile.size(); ++i) {
        if (i) out << ",";
        out << result.depth_profile[i];
    }
    out << "\n";
    out << "  REI            " << result.rei << "\n";
}

int run_rei(const std::string& tree_path, const std::string& report_path,
            const std::string& compare_path, const std::string& out_path, std::ostream& out) {
    if (tree_path.empty() == report_path.empty()) {
        throw UsageError("exactly one of --tree or --report is required");
    }
    ReasoningTree tree = tree_path.empty() ? tree_from_report_file(report_path)
                                           : load_tree_file(tree_path);
    ReiResult result = compute_rei(tree);
    print_rei(out, tree_path.empty() ? report_path : tree_path, tree, result);

    nlohmann::ordered_json doc = result.to_json();
    doc["heuristic"] = tree.heuristic;

    if (!compare_path.empty()) {
        ReasoningTree other = fs::path(compare_path).extension() == ".json" &&
                                      nlohmann::json::parse(read_text_file(compare_path))
                                          .contains("branches")
                                  ? load_tree_file(compare_path)
                                  : tree_from_report_file(compare_path);
        ReiResult other_result = compute_rei(other);
        print_rei(out, compare_path, other, other_result);
        out << "delta REI      " << (other_result.rei - result.rei) << "\n";
        nlohmann::ordered_json comparison;
        comparison["first"] = doc;
        comparison["second"] = other_result.to_json();
        comparison["second"]["heuristic"] = other.heuristic;
        doc = std::move(comparison);
    }
    if (!out_path.empty()) write_text_file(out_path, doc.dump(2) + "\n");
    return 0;
}

int run_stats(const std::string& kind, const std::string& in_path, const std::string& method,
              const std::string& out_path, std::ostream& out) {
    nlohmann::ordered_json result;
    if (kind == "wilcoxon") {
        auto pairs = stats::load_paired_csv(in_path);
        auto chosen = method == "exact" ? stats::WilcoxonMethod::exact
                                        : stats::WilcoxonMethod::normal_approx;
        result = stats::wilcoxon_signed_rank(pairs, chosen).to_json();
        // Medians of both columns ride along; the harness reports them with
        // every paired test.
        std::vector<double> a, b;
        for (const auto& pair : pairs) {
            a.push_back(pair.score_a);
            b.push_back(pair.score_b);
        }
        result["median_a"] = stats::median(a);
        result["median_b"] = stats::median(b);
    } else if (kind == "sus") {
        auto responses = stats::load_sus_csv(in_path);
        std::vector<double> scores;
        for (const auto& response : responses) scores.push_back(stats::sus_score(response));
        result["scores"] = scores;
        result["median"] = stats::median(scores);
        double sum = 0;
        for (double score : scores) sum += score;
        result["mean"] = scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
    } else if (kind == "latency") {
        auto summaries = stats::latency_summary(stats::load_latency_csv(in_path));
        for (const auto& [system, summary] : summaries) {
            nlohmann::ordered_json entry;
            entry["per_company"] = summary.per_company;
            entry["mean"] = summary.mean;
            result[system] = std::move(entry);
        }
    } else if (kind == "median") {
        result["median"] = stats::median(stats::load_values(in_path));
    } else {
        throw UsageError("unknown stats subcommand: " + kind);
    }
    out << result.dump(2) << "\n";
    if (!out_path.empty()) write_text_file(out_path, result.dump(2) + "\n");
    return 0;
}

int run_replay(const std::string& journal_dir, std::ostream& out) {
    fs::path source_dir(journal_dir);
    fs::path config_path = source_dir / "run_config.json";
    if (!fs::is_regular_file(config_path)) {
        throw ConfigError("no run_config.json under " + journal_dir);
    }
    nlohmann::json doc = nlohmann::json::parse(read_text_file(config_path));
    RunConfig config = config_from_json(doc);
    const std::string command = doc.value("command", "");
    if (command != "nas" && command != "debate") {
        throw ConfigError("run_config.json has no replayable command");
    }
    if (config.backend != "scripted") throw ConfigError("replay requires a scripted run");
    if (resolved_clock(config) != "fixed") throw ConfigError("replay requires a fixed-clock run");

    fs::path replay_dir = source_dir / "replay_tmp";
    fs::remove_all(replay_dir);
    config.out_dir = replay_dir.string();

    std::ostringstream sink;
    run_pipeline_command(config, command, sink);

    std::vector<std::string> artifacts = doc.value("artifacts", std::vector<std::string>{});
    bool all_identical = true;
    for (const auto& name : artifacts) {
        std::string original = read_text_file(source_dir / name);
        std::string replayed = read_text_file(replay_dir / name);
        bool identical = original == replayed;
        all_identical = all_identical && identical;
        out << name << ": " << (identical ? "identical" : "MISMATCH") << "\n";
    }
    fs::remove_all(replay_dir);
    if (!all_identical) throw ValidationError("replay produced differing artifacts");
    out << "replay ok: " << artifacts.size() << " artifact(s) byte-identical\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    apply_environment(config);
    try {
        std::string config_path = find_config_flag(args);
        if (!config_path.empty()) apply_config_file(config, config_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    }

    CLI::App app{"credit reasoning engine: single-pass analysis and ten-step structured debate"};
    app.require_subcommand(1);
    std::string config_file;  // parsed again so CLI11 accepts the flag
    app.add_option("--config", config_file, "JSON config file");

    auto add_common = [&](CLI::App* cmd, bool needs_backend) {
        cmd->add_option("--pool", config.pool_dir, "directory of company pool JSON files");
        cmd->add_option("--templates", config.template_dir, "prompt template directory");
        cmd->add_option("--out", config.out_dir, "output directory");
        cmd->add_option("--run-id", config.run_id, "run identifier used in artifact names");
        if (needs_backend) {
            cmd->add_option("--company", config.companies, "company identifier (repeatable)");
            cmd->add_option("--recency-days", config.recency_days, "recency window R in days");
            cmd->add_option("--max-search", config.max_search, "max web search count m");
            cmd->add_option("--model", config.model_id, "LLM model identifier T");
            cmd->add_option("--backend", config.backend, "scripted | remote");
            cmd->add_option("--script", config.script_path, "scripted transcript JSON");
            cmd->add_option("--endpoint", config.endpoint, "chat completion endpoint URL");
            cmd->add_option("--search-endpoint", config.search_endpoint,
                            "search provider endpoint URL");
            cmd->add_option("--search-fixture", config.search_fixture,
                            "stub search fixture JSON");
            cmd->add_option("--locale", config.locale, "output language tag (default ko)");
            cmd->add_option("--as-of", config.as_of, "recency anchor date YYYY-MM-DD");
            cmd->add_option("--clock", config.clock, "wall | fixed");
            cmd->add_option("--jobs", config.jobs, "parallel sessions over companies");
        }
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "load a pool directory and report rejections");
    add_common(ingest_cmd, false);

    auto* nas_cmd = app.add_subcommand("nas", "single-pass analysis report");
    add_common(nas_cmd, true);
    nas_cmd->add_option("--search", config.search, "always | if-sparse");

    auto* debate_cmd = app.add_subcommand("debate", "ten-step structured debate");
    add_common(debate_cmd, true);
    bool record_only = false;
    debate_cmd->add_flag("--record-only", record_only,
                         "record hard violations instead of aborting");
    bool strict_flag = false;
    debate_cmd->add_flag("--strict", strict_flag, "abort on hard violations (default)");
    debate_cmd->add_flag("--polish", config.polish, "backend rewrite of the summary prose");

    auto* rei_cmd = app.add_subcommand("rei", "reasoning tree metrics");
    std::string tree_path, report_path, compare_path, rei_out;
    rei_cmd->add_option("--tree", tree_path, "hand-authored tree JSON");
    rei_cmd->add_option("--report", report_path, "analysis report or debate summary JSON");
    rei_cmd->add_option("--compare", compare_path, "second tree/report to compare");
    rei_cmd->add_option("--out", rei_out, "write metrics JSON here");

    auto* stats_cmd = app.add_subcommand("stats", "evaluation statistics");
    stats_cmd->require_subcommand(1);
    std::string stats_in, stats_method = "normal", stats_out;
    for (const char* name : {"wilcoxon", "sus", "latency", "median"}) {
        auto* sub = stats_cmd->add_subcommand(name);
        sub->add_option("--in", stats_in, "input CSV")->required();
        sub->add_option("--out", stats_out, "write results JSON here");
        if (std::string(name) == "wilcoxon") {
            sub->add_option("--method", stats_method, "normal | exact");
        }
    }

    auto* replay_cmd = app.add_subcommand("replay", "re-execute a journaled scripted run");
    std::string replay_dir;
    replay_cmd->add_option("--journal", replay_dir, "run directory with run_config.json")
        ->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::usage);
    }

    if (record_only) config.strict = false;
    if (strict_flag) config.strict = true;

    try {
        if (ingest_cmd->parsed()) return run_ingest(config, out);
        if (nas_cmd->parsed()) return run_pipeline_command(config, "nas", out);
        if (debate_cmd->parsed()) return run_pipeline_command(config, "debate", out);
        if (rei_cmd->parsed()) return run_rei(tree_path, report_path, compare_path, rei_out, out);
        if (stats_cmd->parsed()) {
            for (auto* sub : stats_cmd->get_subcommands()) {
                return run_stats(sub->get_name(), stats_in, stats_method, stats_out, out);
            }
        }
        if (replay_cmd->parsed()) return run_replay(replay_dir, out);
        throw UsageError("no subcommand given");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace credreason::cli
