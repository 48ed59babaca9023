#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credreason/clock.hpp"

namespace credreason {

// Append-only JSON-lines run journal, one event per line. Each line is
// {"seq": n, "ts": iso8601, "event": {...}} -- the timestamp lives in its own
// field so determinism checks can compare events alone.
class RunJournal {
public:
    RunJournal(std::string path, Clock& clock);
    ~RunJournal();

    RunJournal(const RunJournal&) = delete;
    RunJournal& operator=(const RunJournal&) = delete;

    void record(const std::string& kind, nlohmann::ordered_json payload);

    const std::string& path() const { return path_; }
    std::size_t event_count() const { return seq_; }

    // Events only, timestamps stripped; used by replay and conformance checks.
    static std::vector<nlohmann::json> load_events(const std::string& path);

private:
    std::string path_;
    Clock& clock_;
    std::size_t seq_ = 0;
    std::unique_ptr<std::ostream> out_;
};

}  // namespace credreason
