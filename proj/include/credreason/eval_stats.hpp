#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace credreason::stats {

// One rater x company unit with the two system scores.
struct PairedSample {
    std::string unit_id;
    double score_a = 0.0;  // single-pass system
    double score_b = 0.0;  // debate system
};

enum class WilcoxonMethod { normal_approx, exact };

struct WilcoxonResult {
    int n_effective = 0;     // pairs remaining after zero-difference exclusion
    double w_statistic = 0;  // min of the signed rank sums
    double z = 0;            // from the positive-rank sum, uncorrected normal approx
    double p_two_sided = 0;
    double effect_r = 0;     // z / sqrt(n_effective)
    WilcoxonMethod method = WilcoxonMethod::normal_approx;

    nlohmann::ordered_json to_json() const;
};

// Differences are taken as score_a - score_b, zero differences are excluded,
// |d| is ranked with average ranks for ties. The normal approximation applies
// no continuity and no tie correction. The exact method enumerates the null
// distribution of the rank sum over all 2^n sign assignments (n <= 25).
WilcoxonResult wilcoxon_signed_rank(const std::vector<PairedSample>& pairs,
                                    WilcoxonMethod method = WilcoxonMethod::normal_approx);

struct SusResponse {
    std::vector<int> items;  // exactly 10, each 1..5
};

// Standard SUS scoring: odd items contribute (score-1), even items (5-score),
// total times 2.5. Result is in [0,100] in steps of 2.5.
double sus_score(const SusResponse& response);

struct LatencyRecord {
    std::string system_id;
    std::string company_id;
    double seconds = 0;
};

struct LatencySummary {
    std::map<std::string, double> per_company;
    double mean = 0;  // arithmetic mean over companies, rounded to 2 decimals
};

std::map<std::string, LatencySummary> latency_summary(const std::vector<LatencyRecord>& records);

double median(std::vector<double> values);

double normal_cdf(double x);

// CSV loaders for the evaluation harness input formats.
std::vector<PairedSample> load_paired_csv(const std::string& path);
std::vector<LatencyRecord> load_latency_csv(const std::string& path);
std::vector<SusResponse> load_sus_csv(const std::string& path);
std::vector<double> load_values(const std::string& path);

}  // namespace credreason::stats
