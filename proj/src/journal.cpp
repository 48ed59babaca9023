#include "credreason/journal.hpp"

#include <filesystem>
#include <fstream>

#include "credreason/errors.hpp"

namespace credreason {

RunJournal::RunJournal(std::string path, Clock& clock) : path_(std::move(path)), clock_(clock) {
    auto parent = std::filesystem::path(path_).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    auto stream = std::make_unique<std::ofstream>(path_, std::ios::trunc);
    if (!*stream) throw ConfigError("cannot open journal file: " + path_);
    out_ = std::move(stream);
}

RunJournal::~RunJournal() = default;

void RunJournal::record(const std::string& kind, nlohmann::ordered_json payload) {
    nlohmann::ordered_json line;
    line["seq"] = seq_++;
    line["ts"] = clock_.now_iso8601();
    nlohmann::ordered_json event;
    event["kind"] = kind;
    for (auto& [key, value] : payload.items()) event[key] = value;
    line["event"] = std::move(event);
    *out_ << line.dump() << "\n";
    out_->flush();
}

std::vector<nlohmann::json> RunJournal::load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open journal file: " + path);
    std::vector<nlohmann::json> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line);
        events.push_back(parsed.at("event"));
    }
    return events;
}

}  // namespace credreason
