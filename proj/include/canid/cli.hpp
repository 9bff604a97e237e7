#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "canid/csv.hpp"
#include "canid/inference.hpp"
#include "canid/model_spec.hpp"
#include "canid/report.hpp"

namespace canid {

// Exit codes shared by the subcommands. Inconclusive gets its own code so
// shell pipelines can branch on the outcome of `infer`.
enum ExitCode : int {
    kExitOk = 0,
    kExitInconclusive = 1,
    kExitUsage = 2,
    kExitIo = 3,
};

struct GenerateOptions {
    std::string spec_path;    // exclusive with preset
    std::string preset_name;
    size_t n = 1000;
    uint64_t seed = 1;
    std::string out_path;
    bool include_hidden = false;
    std::string emit_spec_path;
    int threads = 0;
};

inline int cmd_generate(const GenerateOptions& opt, std::ostream& err = std::cerr) {
    try {
        ScmModel model = [&] {
            if (!opt.preset_name.empty()) return preset(opt.preset_name).model;
            std::ifstream in(opt.spec_path);
            if (!in) throw std::runtime_error("cannot open '" + opt.spec_path + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            try {
                return build_model(parse_model_spec_text(buf.str()));
            } catch (const SpecParseError& e) {
                throw std::invalid_argument(opt.spec_path + ": " + e.what());
            }
        }();
        if (!opt.emit_spec_path.empty()) {
            std::ofstream out(opt.emit_spec_path);
            if (!out) throw std::runtime_error("cannot open '" + opt.emit_spec_path + "' for writing");
            out << serialize_model(model, opt.preset_name, opt.seed);
        }
        if (!opt.out_path.empty()) {
            const Dataset full = sample(model, opt.n, opt.seed, opt.threads);
            save_csv(opt.include_hidden ? full : full.observed_view(), opt.out_path);
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "generate: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "generate: " << e.what() << "\n";
        return kExitIo;
    }
}

struct TestOptions {
    std::string data_path;
    std::string y, x;
    std::vector<std::string> s;
    std::string method = "cv";
    double level = 0.01;
    int n_perm = 399;
    size_t max_rows = 14000;
    uint64_t seed = 1;
    std::string out_path;
    int threads = 0;
};

inline int cmd_test(const TestOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        const Dataset ds = load_csv(opt.data_path);
        TestConfig cfg;
        cfg.level = opt.level;
        cfg.n_perm = opt.n_perm;
        cfg.max_rows = opt.max_rows;
        cfg.seed = opt.seed;
        cfg.threads = opt.threads;
        const Verdict v = opt.method == "nrr" ? nrr_independence_test(ds, opt.y, opt.x, opt.s, cfg)
                          : opt.method == "cv"
                              ? cv_independence_test(ds, opt.y, opt.x, opt.s, cfg)
                              : throw std::invalid_argument("method must be cv or nrr");
        out << (v.independent ? "independent" : "dependent") << "  p=" << v.p_value
            << "  stat=" << v.statistic << "\n";
        if (!opt.out_path.empty()) {
            Json config;
            config["data"] = opt.data_path;
            config["y"] = opt.y;
            config["x"] = opt.x;
            config["s"] = opt.s;
            config["method"] = opt.method;
            config["level"] = opt.level;
            config["n_perm"] = opt.n_perm;
            config["max_rows"] = opt.max_rows;
            config["seed"] = opt.seed;
            write_report(make_report("test", config, to_json(v)), opt.out_path);
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "test: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "test: " << e.what() << "\n";
        return kExitIo;
    }
}

struct InferOptions {
    std::string data_path;
    std::string x, y;
    std::vector<std::string> pool;
    std::string method = "cv";
    double level = 0.01;
    int n_perm = 399;
    size_t max_rows = 14000;
    size_t max_witness = 3;
    uint64_t seed = 1;
    std::string out_path;
    int threads = 0;
};

inline int cmd_infer(const InferOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        const Dataset ds = load_csv(opt.data_path);
        CriterionConfig cfg;
        cfg.method = opt.method == "nrr" ? Method::Nrr
                     : opt.method == "cv" ? Method::Cv
                                          : throw std::invalid_argument("method must be cv or nrr");
        cfg.level = opt.level;
        cfg.n_perm = opt.n_perm;
        cfg.max_rows = opt.max_rows;
        cfg.max_witness_size = opt.max_witness;
        cfg.seed = opt.seed;
        cfg.threads = opt.threads;
        const Decision dec = infer_potential_cause(ds, opt.x, opt.y, opt.pool, cfg);
        if (dec.kind == DecisionKind::PotentialCause) {
            out << "PotentialCause(" << opt.x << " -> " << opt.y << ")  witness={";
            for (size_t i = 0; i < dec.witness_set.size(); ++i) out << (i ? "," : "") << dec.witness_set[i];
            out << "}\n";
        } else {
            out << "Inconclusive\n";
        }
        if (!opt.out_path.empty()) {
            Json config;
            config["data"] = opt.data_path;
            config["x"] = opt.x;
            config["y"] = opt.y;
            config["pool"] = opt.pool;
            config["method"] = opt.method;
            config["level"] = opt.level;
            config["n_perm"] = opt.n_perm;
            config["max_rows"] = opt.max_rows;
            config["seed"] = opt.seed;
            write_report(make_report("infer", config, to_json(dec)), opt.out_path);
        }
        return dec.kind == DecisionKind::PotentialCause ? kExitOk : kExitInconclusive;
    } catch (const std::invalid_argument& e) {
        err << "infer: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "infer: " << e.what() << "\n";
        return kExitIo;
    }
}

// ---------------------------------------------------------------------------
// Reference-grid reproduction across the four example systems.

struct Table1Options {
    size_t n = 20000;
    int seeds = 10;
    double level = 0.01;
    int n_perm = 399;
    size_t max_rows = 14000;
    uint64_t base_seed = 1;
    std::string method = "cv";
    std::string out_path;
    int threads = 0;
    std::ostream* progress = nullptr;
};

struct Table1Row {
    std::string preset;
    std::vector<CellValue> cells;       // majority-voted
    std::vector<int> votes_indep;       // per cell
    std::vector<int> votes_correct;     // seeds agreeing with the expected value
    bool decision_yes = false;
    std::vector<CellExpect> expected_cells;
    bool expected_yes = false;
    bool cells_match = false;
    bool decision_match = false;
};

struct Table1Result {
    std::vector<Table1Row> rows;
    bool all_match = false;
    // verdicts[preset][seed][cell], for cross-method post-processing
    std::vector<std::vector<std::vector<Verdict>>> verdicts;
};

inline Table1Result run_table1(const Table1Options& opt) {
    const std::vector<std::string> names = {"fig1a", "fig1b", "fig1c", "fig1d"};
    Table1Result result;
    result.verdicts.assign(names.size(), {});
    const size_t seeds = static_cast<size_t>(opt.seeds);
    for (auto& v : result.verdicts) v.resize(seeds);

    std::vector<Preset> presets;
    for (const auto& n : names) presets.push_back(preset(n));

    parallel_for(
        names.size() * seeds,
        [&](size_t task) {
            const size_t pi = task / seeds;
            const size_t rep = task % seeds;
            const uint64_t run_seed = mix_seed(opt.base_seed, pi, rep);
            const Dataset ds = sample(presets[pi].model, opt.n, run_seed, 1).observed_view();
            CriterionConfig cfg;
            cfg.method = opt.method == "nrr" ? Method::Nrr : Method::Cv;
            cfg.level = opt.level;
            cfg.n_perm = opt.n_perm;
            cfg.max_rows = opt.max_rows;
            cfg.seed = run_seed;
            cfg.threads = 1;
            result.verdicts[pi][rep] = pattern_verdicts(ds, presets[pi].x, presets[pi].y, presets[pi].z, cfg);
            if (opt.progress) (*opt.progress) << "." << std::flush;
        },
        opt.threads);

    result.all_match = true;
    for (size_t pi = 0; pi < names.size(); ++pi) {
        Table1Row row;
        row.preset = names[pi];
        row.expected_cells = presets[pi].expected.cells;
        row.expected_yes = presets[pi].expected.decision == DecisionExpect::Yes;
        const size_t cells = row.expected_cells.size();
        row.cells.resize(cells);
        row.votes_indep.assign(cells, 0);
        row.votes_correct.assign(cells, 0);
        for (size_t c = 0; c < cells; ++c) {
            for (size_t r = 0; r < seeds; ++r)
                if (result.verdicts[pi][r][c].independent) ++row.votes_indep[c];
            row.cells[c] =
                2 * row.votes_indep[c] >= static_cast<int>(seeds) ? CellValue::Indep : CellValue::Dep;
            const bool expect_indep = row.expected_cells[c] == CellExpect::Indep;
            row.votes_correct[c] =
                expect_indep ? row.votes_indep[c] : static_cast<int>(seeds) - row.votes_indep[c];
        }
        row.decision_yes = decision_from_cells(row.cells);
        row.cells_match = true;
        for (size_t c = 0; c < cells; ++c)
            if (!cell_matches(row.expected_cells[c], row.cells[c])) row.cells_match = false;
        row.decision_match = row.decision_yes == row.expected_yes;
        if (!row.cells_match || !row.decision_match) result.all_match = false;
        result.rows.push_back(std::move(row));
    }
    return result;
}

inline Json table1_to_json(const Table1Result& result) {
    Json rows = Json::array();
    for (const auto& row : result.rows) {
        Json r;
        r["preset"] = row.preset;
        Json cells = Json::array();
        for (auto c : row.cells) cells.push_back(to_string(c));
        r["cells"] = cells;
        r["votes_indep"] = row.votes_indep;
        r["votes_correct"] = row.votes_correct;
        r["decision"] = row.decision_yes ? "Yes" : "No";
        Json expected = Json::array();
        for (auto e : row.expected_cells)
            expected.push_back(e == CellExpect::Indep ? "indep" : e == CellExpect::Dep ? "dep" : "any");
        r["expected_cells"] = expected;
        r["expected_decision"] = row.expected_yes ? "Yes" : "No";
        r["cells_match"] = row.cells_match;
        r["decision_match"] = row.decision_match;
        rows.push_back(r);
    }
    Json j;
    j["rows"] = rows;
    j["all_match"] = result.all_match;
    return j;
}

inline int cmd_reproduce_table1(const Table1Options& opt, std::ostream& out = std::cout,
                                std::ostream& err = std::cerr) {
    try {
        const Table1Result result = run_table1(opt);
        if (opt.progress) (*opt.progress) << "\n";
        int matched_cells = 0, total_cells = 0;
        for (const auto& row : result.rows) {
            out << row.preset << "  cells:";
            for (size_t c = 0; c < row.cells.size(); ++c) {
                out << " " << to_string(row.cells[c]);
                ++total_cells;
                if (cell_matches(row.expected_cells[c], row.cells[c])) ++matched_cells;
            }
            out << "  votes(correct/seeds):";
            for (size_t c = 0; c < row.cells.size(); ++c)
                out << " " << row.votes_correct[c] << "/" << opt.seeds;
            out << "  decision: " << (row.decision_yes ? "Yes" : "No") << " (expected "
                << (row.expected_yes ? "Yes" : "No") << ")"
                << ((row.cells_match && row.decision_match) ? "  [ok]" : "  [MISMATCH]") << "\n";
        }
        out << "matched " << matched_cells << "/" << total_cells << " cells, "
            << (result.all_match ? "all decisions correct" : "decision/cell mismatches present") << "\n";
        if (!opt.out_path.empty()) {
            Json config;
            config["n"] = opt.n;
            config["seeds"] = opt.seeds;
            config["level"] = opt.level;
            config["n_perm"] = opt.n_perm;
            config["max_rows"] = opt.max_rows;
            config["base_seed"] = opt.base_seed;
            config["method"] = opt.method;
            write_report(make_report("reproduce-table1", config, table1_to_json(result)), opt.out_path);
        }
        return result.all_match ? kExitOk : kExitInconclusive;
    } catch (const std::invalid_argument& e) {
        err << "reproduce-table1: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "reproduce-table1: " << e.what() << "\n";
        return kExitIo;
    }
}

// ---------------------------------------------------------------------------
// Monte-Carlo benchmark over presets.

struct BenchmarkOptions {
    std::string config_path;
    std::string out_path;
    int threads = 0;
    std::ostream* progress = nullptr;
};

inline int cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
    Json config;
    try {
        std::ifstream in(opt.config_path);
        if (!in) throw std::invalid_argument("cannot open '" + opt.config_path + "'");
        config = Json::parse(in);
        if (!config.contains("presets") || !config["presets"].is_array() || config["presets"].empty())
            throw std::invalid_argument("config must list at least one preset");
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const std::vector<std::string> preset_list = config["presets"].get<std::vector<std::string>>();
        const std::vector<size_t> sizes =
            config.value("sample_sizes", std::vector<size_t>{20000});
        const int seeds = config.value("seeds", 10);
        const std::vector<std::string> methods = config.value("methods", std::vector<std::string>{"cv"});
        const double level = config.value("level", 0.01);
        const int n_perm = config.value("n_perm", 199);
        const size_t max_rows = config.value("max_rows", size_t{2000});
        const uint64_t base_seed = config.value("base_seed", uint64_t{1});

        Json table = Json::array();
        for (const auto& preset_name : preset_list) {
            const Preset p = preset(preset_name);
            const std::vector<std::string> pool = p.z ? std::vector<std::string>{*p.z} : std::vector<std::string>{};
            for (size_t n : sizes) {
                for (const auto& method : methods) {
                    std::vector<int> fwd_pc(static_cast<size_t>(seeds), 0), rev_pc(static_cast<size_t>(seeds), 0);
                    parallel_for(
                        static_cast<size_t>(seeds),
                        [&](size_t rep) {
                            const uint64_t run_seed = mix_seed(base_seed, std::hash<std::string>{}(preset_name), rep);
                            const Dataset ds = sample(p.model, n, run_seed, 1).observed_view();
                            CriterionConfig cfg;
                            cfg.method = method == "nrr" ? Method::Nrr : Method::Cv;
                            cfg.level = level;
                            cfg.n_perm = n_perm;
                            cfg.max_rows = max_rows;
                            cfg.seed = run_seed;
                            cfg.threads = 1;
                            fwd_pc[rep] =
                                infer_potential_cause(ds, p.x, p.y, pool, cfg).kind == DecisionKind::PotentialCause;
                            rev_pc[rep] =
                                infer_potential_cause(ds, p.y, p.x, pool, cfg).kind == DecisionKind::PotentialCause;
                            if (opt.progress) (*opt.progress) << "." << std::flush;
                        },
                        opt.threads);
                    int fwd = 0, rev = 0;
                    for (int i = 0; i < seeds; ++i) {
                        fwd += fwd_pc[static_cast<size_t>(i)];
                        rev += rev_pc[static_cast<size_t>(i)];
                    }
                    const double fwd_rate = static_cast<double>(fwd) / seeds;
                    const double rev_rate = static_cast<double>(rev) / seeds;
                    Json r;
                    r["preset"] = preset_name;
                    r["n"] = n;
                    r["method"] = method;
                    r["seeds"] = seeds;
                    r["potential_cause_rate_xy"] = fwd_rate;
                    r["potential_cause_rate_yx"] = rev_rate;
                    const bool expect_yes = p.expected.decision == DecisionExpect::Yes;
                    const bool expect_no = p.expected.decision == DecisionExpect::No;
                    if (expect_yes) {
                        r["accuracy"] = fwd_rate;
                        r["false_potential_cause_rate"] = rev_rate;
                    } else if (expect_no) {
                        r["accuracy"] = 1.0 - std::max(fwd_rate, rev_rate);
                        r["false_potential_cause_rate"] =
                            static_cast<double>(fwd + rev) / (2.0 * seeds);
                    }
                    table.push_back(r);
                    out << preset_name << " n=" << n << " method=" << method << "  PC(x->y)=" << fwd_rate
                        << "  PC(y->x)=" << rev_rate << "\n";
                }
            }
        }
        if (opt.progress) (*opt.progress) << "\n";
        if (!opt.out_path.empty()) write_report(make_report("benchmark", config, table), opt.out_path);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "benchmark: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "benchmark: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace canid
