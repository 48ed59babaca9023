#include "credreason/reasoning_metrics.hpp"

#include <fstream>
#include <numeric>

#include "credreason/errors.hpp"
#include "credreason/kpd_debate.hpp"
#include "credreason/nas_pipeline.hpp"
#include "credreason/report_synthesis.hpp"
#include "credreason/text.hpp"

namespace credreason {

nlohmann::ordered_json ReiResult::to_json() const {
    nlohmann::ordered_json out;
    out["breadth"] = breadth;
    out["depth_profile"] = depth_profile;
    out["rei"] = rei;
    return out;
}

ReasoningTree load_tree(const nlohmann::json& document) {
    if (!document.is_object()) throw ValidationError("tree document must be a JSON object");
    ReasoningTree tree;
    if (!document.contains("root_claim") || !document["root_claim"].is_string()) {
        throw ValidationError("tree document: missing string field 'root_claim'");
    }
    tree.root_claim = document["root_claim"].get<std::string>();
    if (!document.contains("branches") || !document["branches"].is_array()) {
        throw ValidationError("tree document: missing array field 'branches'");
    }
    std::size_t index = 0;
    for (const auto& raw : document["branches"]) {
        const std::string where = "branches[" + std::to_string(index++) + "]";
        if (!raw.is_object()) throw ValidationError(where + ": expected object");
        ReasoningBranch branch;
        branch.topic = raw.value("topic", "");
        if (!raw.contains("nodes") || !raw["nodes"].is_array()) {
            throw ValidationError(where + ": missing array field 'nodes'");
        }
        for (const auto& level : raw["nodes"]) {
            if (!level.is_array()) throw ValidationError(where + ": each level must be an array");
            std::vector<std::string> statements;
            for (const auto& statement : level) {
                if (!statement.is_string()) {
                    throw ValidationError(where + ": statements must be strings");
                }
                statements.push_back(statement.get<std::string>());
            }
            branch.levels.push_back(std::move(statements));
        }
        if (branch.levels.empty()) {
            throw ValidationError(where + " ('" + branch.topic + "'): branch has depth 0");
        }
        tree.branches.push_back(std::move(branch));
    }
    return tree;
}

ReasoningTree load_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tree file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("tree file " + path + ": " + e.what());
    }
    return load_tree(doc);
}

namespace {

bool has_cited_evidence(const std::string& text) {
    if (!extract_structure(text).citations.empty()) return true;
    return contains_ci(text, "source:") || contains_ci(text, "출처");
}

bool has_implication(const std::string& text) {
    return text.find("→") != std::string::npos ||  // →
           text.find("->") != std::string::npos || contains_ci(text, " implies ") ||
           contains_ci(text, " therefore ");
}

std::string first_sentence_of(const std::string& text) {
    auto structure = extract_structure(text);
    std::string body = text.substr(0, structure.body_byte_end);
    auto stop = body.find_first_of(".!?\n");
    std::string sentence = stop == std::string::npos ? body : body.substr(0, stop + 1);
    return trim(sentence);
}

// Shared level heuristic: a claim is level 1, cited evidence adds a level,
// and an implication (or rebuttal-response pairing) adds a third on top of
// evidence. Implication without evidence stays at level 1: the chain is
// claim -> evidence -> implication.
ReasoningBranch build_branch(const std::string& topic, const std::string& combined,
                             bool rebuttal_chain) {
    ReasoningBranch branch;
    branch.topic = topic;
    std::string claim = first_sentence_of(combined);
    if (claim.empty()) claim = topic;
    branch.levels.push_back({claim});
    if (!has_cited_evidence(combined)) return branch;

    std::vector<std::string> evidence;
    for (const auto& citation : extract_structure(combined).citations) {
        evidence.push_back("(" + citation.date + ", " + citation.source + ")");
    }
    if (evidence.empty()) evidence.push_back("cited evidence");
    branch.levels.push_back(std::move(evidence));

    if (has_implication(combined) || rebuttal_chain) {
        branch.levels.push_back({rebuttal_chain && !has_implication(combined)
                                     ? "rebuttal-response chain"
                                     : "stated implication"});
    }
    return branch;
}

}  // namespace

ReasoningTree build_tree_from_report(const AnalysisReport& report) {
    ReasoningTree tree;
    tree.heuristic = true;
    tree.root_claim = "Assessment of " + report.company_id + " repayment capacity";
    for (const auto& topic : report.topics) {
        std::string combined = topic.affirmative;
        if (!combined.empty() && !topic.adverse.empty()) combined += "\n";
        combined += topic.adverse;
        tree.branches.push_back(build_branch(topic.topic, combined, false));
    }
    return tree;
}

ReasoningTree build_tree_from_report(const DebateSummaryReport& report) {
    ReasoningTree tree;
    tree.heuristic = true;
    tree.root_claim = "Balanced debate assessment of repayment capacity";
    for (const auto& topic : report.topics) {
        std::string combined = topic.pro;
        if (!combined.empty() && !topic.con.empty()) combined += "\n";
        combined += topic.con;
        for (const auto& source : topic.sources) {
            combined += "\n(" + source.date + ", " + source.source + ")";
        }
        bool rebuttal_chain = !topic.pro.empty() && !topic.con.empty();
        tree.branches.push_back(build_branch(topic.label, combined, rebuttal_chain));
    }
    return tree;
}

ReiResult compute_rei(const ReasoningTree& tree) {
    ReiResult result;
    result.breadth = static_cast<int>(tree.branches.size());
    for (const auto& branch : tree.branches) result.depth_profile.push_back(branch.depth());
    result.rei = std::accumulate(result.depth_profile.begin(), result.depth_profile.end(), 0);
    return result;
}

}  // namespace credreason
