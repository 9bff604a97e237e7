#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "canid/canid.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditionally-additive-noise causal direction inference"};
    app.require_subcommand(1);

    int threads = 0;  // 0 = CANID_THREADS env or hardware concurrency
    app.add_option("--threads", threads, "worker thread count (overrides CANID_THREADS)");

    // generate
    canid::GenerateOptions gen;
    auto* cgen = app.add_subcommand("generate", "simulate a model and write a CSV dataset");
    auto* gspec = cgen->add_option("--spec", gen.spec_path, "model-spec file");
    auto* gpreset = cgen->add_option("--preset", gen.preset_name, "preset model name");
    gspec->excludes(gpreset);
    cgen->add_option("-n,--rows", gen.n, "number of samples")->default_val(1000);
    cgen->add_option("--seed", gen.seed, "RNG seed")->default_val(1);
    cgen->add_option("-o,--out", gen.out_path, "output CSV path");
    cgen->add_flag("--include-hidden", gen.include_hidden, "include hidden columns in the CSV");
    cgen->add_option("--emit-spec", gen.emit_spec_path, "also write the model as a spec file");

    // test
    canid::TestOptions tst;
    std::string tst_s;
    auto* ctest = app.add_subcommand("test", "run a single independence test on a dataset");
    ctest->add_option("--data", tst.data_path, "input CSV")->required();
    ctest->add_option("-y", tst.y, "target column")->required();
    ctest->add_option("-x", tst.x, "predictor column")->required();
    ctest->add_option("-s", tst_s, "conditioning columns (comma separated)");
    ctest->add_option("--method", tst.method, "cv or nrr")->default_val("cv");
    ctest->add_option("--level", tst.level, "test level")->default_val(0.01);
    ctest->add_option("--perms", tst.n_perm, "permutation count")->default_val(399);
    ctest->add_option("--max-rows", tst.max_rows, "working subsample cap")->default_val(14000);
    ctest->add_option("--seed", tst.seed, "RNG seed")->default_val(1);
    ctest->add_option("-o,--out", tst.out_path, "JSON report path");

    // infer
    canid::InferOptions inf;
    std::string inf_pool;
    auto* cinf = app.add_subcommand("infer", "apply the pairwise noncausality criterion");
    cinf->add_option("--data", inf.data_path, "input CSV")->required();
    cinf->add_option("-x", inf.x, "candidate cause column")->required();
    cinf->add_option("-y", inf.y, "candidate effect column")->required();
    cinf->add_option("--pool", inf_pool, "conditioning pool (comma separated)");
    cinf->add_option("--method", inf.method, "cv or nrr")->default_val("cv");
    cinf->add_option("--level", inf.level, "test level")->default_val(0.01);
    cinf->add_option("--perms", inf.n_perm, "permutation count")->default_val(399);
    cinf->add_option("--max-rows", inf.max_rows, "working subsample cap")->default_val(14000);
    cinf->add_option("--max-witness", inf.max_witness, "largest conditioning set searched")->default_val(3);
    cinf->add_option("--seed", inf.seed, "RNG seed")->default_val(1);
    cinf->add_option("-o,--out", inf.out_path, "JSON report path");

    // reproduce-table1
    canid::Table1Options tab;
    bool tab_quiet = false;
    auto* ctab = app.add_subcommand("reproduce-table1",
                                    "recompute the reference independence grid for the example systems");
    ctab->add_option("-n,--rows", tab.n, "samples per run")->default_val(20000);
    ctab->add_option("--seeds", tab.seeds, "replicates per preset")->default_val(10);
    ctab->add_option("--level", tab.level, "test level")->default_val(0.01);
    ctab->add_option("--perms", tab.n_perm, "permutation count")->default_val(399);
    ctab->add_option("--max-rows", tab.max_rows, "working subsample cap")->default_val(14000);
    ctab->add_option("--seed", tab.base_seed, "base RNG seed")->default_val(1);
    ctab->add_option("--method", tab.method, "cv or nrr")->default_val("cv");
    ctab->add_option("-o,--out", tab.out_path, "JSON report path");
    ctab->add_flag("--quiet", tab_quiet, "suppress progress dots");

    // benchmark
    canid::BenchmarkOptions bench;
    bool bench_quiet = false;
    auto* cbench = app.add_subcommand("benchmark", "Monte-Carlo decision rates over presets");
    cbench->add_option("--config", bench.config_path, "benchmark config JSON")->required();
    cbench->add_option("-o,--out", bench.out_path, "JSON report path");
    cbench->add_flag("--quiet", bench_quiet, "suppress progress dots");

    CLI11_PARSE(app, argc, argv);

    if (cgen->parsed()) {
        if (gen.spec_path.empty() && gen.preset_name.empty()) {
            std::cerr << "generate: either --spec or --preset is required\n";
            return canid::kExitUsage;
        }
        gen.threads = threads;
        return canid::cmd_generate(gen);
    }
    if (ctest->parsed()) {
        tst.s = split_list(tst_s);
        tst.threads = threads;
        return canid::cmd_test(tst);
    }
    if (cinf->parsed()) {
        inf.pool = split_list(inf_pool);
        inf.threads = threads;
        return canid::cmd_infer(inf);
    }
    if (ctab->parsed()) {
        tab.threads = threads;
        if (!tab_quiet) tab.progress = &std::cerr;
        return canid::cmd_reproduce_table1(tab);
    }
    if (cbench->parsed()) {
        bench.threads = threads;
        if (!bench_quiet) bench.progress = &std::cerr;
        return canid::cmd_benchmark(bench);
    }
    return canid::kExitUsage;
}
