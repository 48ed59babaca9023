#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace credreason {

struct AnalysisReport;       // nas_pipeline.hpp
struct DebateSummaryReport;  // report_synthesis.hpp

// One topical branch under the root claim. Depth is the number of
// hierarchical argumentation levels in the branch; the root contributes none.
struct ReasoningBranch {
    std::string topic;
    std::vector<std::vector<std::string>> levels;  // statements per level

    int depth() const { return static_cast<int>(levels.size()); }
};

struct ReasoningTree {
    std::string root_claim;
    std::vector<ReasoningBranch> branches;
    bool heuristic = false;  // true when derived from report text, not hand-authored
};

struct ReiResult {
    int breadth = 0;
    std::vector<int> depth_profile;
    int rei = 0;  // sum of branch depths

    nlohmann::ordered_json to_json() const;
};

// Tree file format:
//   {"root_claim": str, "branches": [{"topic": str, "nodes": [[str,...], ...]}]}
// where nodes is the list of levels and depth = its length.
// Hand-authored trees are the canonical REI input.
ReasoningTree load_tree(const nlohmann::json& document);
ReasoningTree load_tree_file(const std::string& path);

// Heuristic branch construction from report text, one branch per topic:
// level 1 = claim present, level 2 = claim + cited evidence,
// level 3 = claim + evidence + implication or rebuttal-response chain.
ReasoningTree build_tree_from_report(const AnalysisReport& report);
ReasoningTree build_tree_from_report(const DebateSummaryReport& report);

ReiResult compute_rei(const ReasoningTree& tree);

}  // namespace credreason
