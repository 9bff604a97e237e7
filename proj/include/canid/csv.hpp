#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "canid/scm.hpp"

namespace canid {

namespace csv_detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace csv_detail

// CSV with one metadata comment line: "# canid-dataset seed=<n> hidden=<a,b>".
// Shortest-round-trip float formatting keeps load(save(ds)) exact.
inline std::string dataset_to_csv(const Dataset& ds) {
    std::ostringstream os;
    os << "# canid-dataset seed=" << ds.seed();
    std::string hidden;
    for (const auto& c : ds.columns())
        if (!c.observed) hidden += (hidden.empty() ? "" : ",") + c.name;
    if (!hidden.empty()) os << " hidden=" << hidden;
    os << "\n";
    for (size_t c = 0; c < ds.cols(); ++c) os << (c ? "," : "") << ds.columns()[c].name;
    os << "\n";
    for (size_t r = 0; r < ds.rows(); ++r) {
        for (size_t c = 0; c < ds.cols(); ++c) os << (c ? "," : "") << csv_detail::format_double(ds.at(r, c));
        os << "\n";
    }
    return os.str();
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << dataset_to_csv(ds);
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

inline Dataset dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    uint64_t seed = 0;
    std::vector<std::string> hidden;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string word;
            while (meta >> word) {
                if (word.rfind("seed=", 0) == 0) seed = std::stoull(word.substr(5));
                if (word.rfind("hidden=", 0) == 0) hidden = csv_detail::split(word.substr(7), ',');
            }
            continue;
        }
        if (!have_header) {
            header = csv_detail::split(line, ',');
            have_header = true;
            continue;
        }
        const auto fields = csv_detail::split(line, ',');
        if (fields.size() != header.size())
            throw std::runtime_error("csv: row with " + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        std::vector<double> row(fields.size());
        for (size_t i = 0; i < fields.size(); ++i) {
            const auto& f = fields[i];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw std::runtime_error("csv: bad number '" + f + "'");
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error("csv: missing header row");
    std::vector<ColumnInfo> cols;
    for (const auto& name : header) {
        bool obs = true;
        for (const auto& h : hidden)
            if (h == name) obs = false;
        cols.push_back({name, obs});
    }
    Dataset ds(cols, rows.size(), seed);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c) ds.at(r, c) = rows[r][c];
    return ds;
}

inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return dataset_from_csv(buf.str());
}

}  // namespace canid
