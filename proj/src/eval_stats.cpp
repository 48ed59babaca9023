#include "credreason/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "credreason/errors.hpp"
#include "credreason/text.hpp"

namespace credreason::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Average ranks of |d|, doubled so that tied half-ranks stay integral.
std::vector<long> doubled_ranks(const std::vector<double>& abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });
    std::vector<long> ranks2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
        // ranks i+1 .. j+1 share the average; doubled average = (i+1) + (j+1)
        long doubled_avg = static_cast<long>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks2[order[k]] = doubled_avg;
        i = j + 1;
    }
    return ranks2;
}

// P(min(W+, W-) <= observed) over all 2^n equally likely sign assignments,
// computed from the exact distribution of the doubled positive rank sum.
double exact_p_value(const std::vector<long>& ranks2, long w_min2) {
    long total2 = std::accumulate(ranks2.begin(), ranks2.end(), 0L);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
    counts[0] = 1;
    long reached = 0;
    for (long rank : ranks2) {
        for (long v = reached; v >= 0; --v) {
            if (counts[static_cast<std::size_t>(v)]) {
                counts[static_cast<std::size_t>(v + rank)] += counts[static_cast<std::size_t>(v)];
            }
        }
        reached += rank;
    }
    // min(W+, W-) <= w  <=>  W+ <= w or W+ >= total - w
    std::uint64_t tail = 0;
    for (long v = 0; v <= total2; ++v) {
        if (v <= w_min2 || v >= total2 - w_min2) tail += counts[static_cast<std::size_t>(v)];
    }
    return static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(ranks2.size()));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<PairedSample>& pairs,
                                    WilcoxonMethod method) {
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& pair : pairs) {
        if (!std::isfinite(pair.score_a) || !std::isfinite(pair.score_b)) {
            throw ValidationError("non-finite score in pair '" + pair.unit_id + "'");
        }
        double d = pair.score_a - pair.score_b;
        if (d != 0.0) diffs.push_back(d);  // zero differences are excluded
    }
    if (diffs.empty()) {
        throw ValidationError("wilcoxon test undefined: all differences are zero");
    }
    const int n = static_cast<int>(diffs.size());
    if (method == WilcoxonMethod::exact && n > 25) {
        throw ValidationError("exact method limited to n <= 25 (got n=" + std::to_string(n) + ")");
    }

    std::vector<double> abs_diffs(diffs.size());
    std::transform(diffs.begin(), diffs.end(), abs_diffs.begin(),
                   [](double d) { return std::fabs(d); });
    std::vector<long> ranks2 = doubled_ranks(abs_diffs);

    long w_plus2 = 0;
    long total2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total2 += ranks2[i];
        if (diffs[i] > 0) w_plus2 += ranks2[i];
    }
    long w_minus2 = total2 - w_plus2;

    WilcoxonResult result;
    result.n_effective = n;
    result.method = method;
    result.w_statistic = static_cast<double>(std::min(w_plus2, w_minus2)) / 2.0;

    // z is taken from the positive rank sum so that negating every difference
    // negates z while leaving W invariant.
    double w_plus = static_cast<double>(w_plus2) / 2.0;
    double mean = static_cast<double>(n) * (n + 1) / 4.0;
    double variance = static_cast<double>(n) * (n + 1) * (2 * n + 1) / 24.0;
    result.z = (w_plus - mean) / std::sqrt(variance);
    result.effect_r = result.z / std::sqrt(static_cast<double>(n));

    if (method == WilcoxonMethod::exact) {
        result.p_two_sided = exact_p_value(ranks2, std::min(w_plus2, w_minus2));
    } else {
        result.p_two_sided = 2.0 * normal_cdf(-std::fabs(result.z));
    }
    return result;
}

nlohmann::ordered_json WilcoxonResult::to_json() const {
    nlohmann::ordered_json out;
    out["n_effective"] = n_effective;
    out["w"] = w_statistic;
    out["z"] = z;
    out["p_two_sided"] = p_two_sided;
    out["effect_r"] = effect_r;
    out["method"] = method == WilcoxonMethod::exact ? "exact" : "normal_approx";
    return out;
}

double sus_score(const SusResponse& response) {
    if (response.items.size() != 10) {
        throw ValidationError("SUS response must have exactly 10 items (got " +
                              std::to_string(response.items.size()) + ")");
    }
    int total = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        int score = response.items[i];
        if (score < 1 || score > 5) {
            throw ValidationError("SUS item " + std::to_string(i + 1) + " out of range 1..5");
        }
        total += (i % 2 == 0) ? score - 1 : 5 - score;  // items are 1-based: odd, even, ...
    }
    return total * 2.5;
}

std::map<std::string, LatencySummary> latency_summary(const std::vector<LatencyRecord>& records) {
    std::map<std::string, LatencySummary> out;
    for (const auto& record : records) {
        if (record.seconds < 0) {
            throw ValidationError("negative latency for system '" + record.system_id + "'");
        }
        out[record.system_id].per_company[record.company_id] = record.seconds;
    }
    if (out.empty()) throw ValidationError("latency summary needs at least one record");
    for (auto& [system, summary] : out) {
        double sum = 0;
        for (const auto& [_, seconds] : summary.per_company) sum += seconds;
        double mean = sum / static_cast<double>(summary.per_company.size());
        summary.mean = std::round(mean * 100.0) / 100.0;
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of empty list");
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        for (auto& cell : cells) cell = trim(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double parse_number(const std::string& text, const std::string& path) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(path + ": not a number: '" + text + "'");
    }
}

bool is_number(const std::string& text) {
    try {
        std::size_t used = 0;
        (void)std::stod(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

std::vector<PairedSample> load_paired_csv(const std::string& path) {
    auto rows = read_csv(path);
    std::vector<PairedSample> pairs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 3) throw ConfigError(path + ": row needs unit_id,score_a,score_b");
        if (i == 0 && !is_number(row[1])) continue;  // header
        pairs.push_back({row[0], parse_number(row[1], path), parse_number(row[2], path)});
    }
    return pairs;
}

std::vector<LatencyRecord> load_latency_csv(const std::string& path) {
    auto rows = read_csv(path);
    std::vector<LatencyRecord> records;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 3) throw ConfigError(path + ": row needs system,company,seconds");
        if (i == 0 && !is_number(row[2])) continue;  // header
        records.push_back({row[0], row[1], parse_number(row[2], path)});
    }
    return records;
}

std::vector<SusResponse> load_sus_csv(const std::string& path) {
    auto rows = read_csv(path);
    std::vector<SusResponse> responses;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 11) throw ConfigError(path + ": row needs unit_id,q1..q10");
        if (i == 0 && !is_number(row[1])) continue;  // header
        SusResponse response;
        for (std::size_t q = 1; q <= 10; ++q) {
            response.items.push_back(static_cast<int>(parse_number(row[q], path)));
        }
        responses.push_back(std::move(response));
    }
    return responses;
}

std::vector<double> load_values(const std::string& path) {
    auto rows = read_csv(path);
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& cell : rows[i]) {
            if (cell.empty()) continue;
            if (!is_number(cell)) {
                if (i == 0) continue;  // header tokens
                throw ConfigError(path + ": not a number: '" + cell + "'");
            }
            values.push_back(parse_number(cell, path));
        }
    }
    return values;
}

}  // namespace credreason::stats
