#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "canid/inference.hpp"
#include "canid/oracle.hpp"

namespace canid {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "canid-report/1";

inline Json to_json(const Verdict& v) {
    Json j;
    j["method"] = v.method;
    j["statistic"] = v.statistic;
    j["p_value"] = v.p_value;
    j["level"] = v.level;
    j["independent"] = v.independent;
    j["n_permutations"] = v.n_permutations;
    j["seed"] = v.seed;
    Json d;
    d["bandwidth_a"] = v.bandwidth_a;
    d["bandwidth_b"] = v.bandwidth_b;
    d["rows_used"] = v.rows_used;
    d["n_strata"] = v.n_strata;
    d["flagged_fraction"] = v.flagged_fraction;
    d["exhaustive"] = v.exhaustive;
    if (!v.notes.empty()) d["notes"] = v.notes;
    j["diagnostics"] = d;
    return j;
}

inline Json to_json(const PatternRow& row) {
    Json j;
    Json cells = Json::array();
    for (auto c : row.cells) cells.push_back(to_string(c));
    j["cells"] = cells;
    j["votes"] = row.votes;
    j["replicates"] = row.replicates;
    j["decision"] = row.decision_yes ? "Yes" : "No";
    return j;
}

inline Json to_json(const Decision& dec) {
    Json j;
    j["kind"] = dec.kind == DecisionKind::PotentialCause ? "PotentialCause" : "Inconclusive";
    j["x"] = dec.x;
    j["y"] = dec.y;
    j["method"] = dec.method;
    j["witness_set"] = dec.witness_set;
    if (!dec.notes.empty()) j["notes"] = dec.notes;
    Json evidence = Json::array();
    for (const auto& item : dec.evidence) {
        Json e;
        e["direction"] = item.forward ? "forward" : "reverse";
        e["candidate_set"] = item.candidate_set;
        e["conditioning"] = item.conditioning;
        e["verdict"] = to_json(item.verdict);
        evidence.push_back(e);
    }
    j["evidence"] = evidence;
    return j;
}

// Report envelope. generated_at is the single non-deterministic field;
// comparisons between runs drop it.
inline Json make_report(const std::string& command, Json config, Json results) {
    Json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["config"] = std::move(config);
    j["results"] = std::move(results);
    const auto now = std::chrono::system_clock::now();
    j["generated_at"] = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    return j;
}

inline void write_report(const Json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << report.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

}  // namespace canid
