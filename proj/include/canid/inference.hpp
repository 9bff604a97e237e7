#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canid/oracle.hpp"

namespace canid {

enum class DecisionKind { PotentialCause, Inconclusive };

struct EvidenceItem {
    bool forward = true;                      // forward: variance/residual of y against x
    std::vector<std::string> candidate_set;   // the witness candidate under evaluation
    std::vector<std::string> conditioning;    // the set actually conditioned in this test
    Verdict verdict;
};

struct Decision {
    DecisionKind kind = DecisionKind::Inconclusive;
    std::string x, y;
    std::vector<std::string> witness_set;
    std::vector<EvidenceItem> evidence;
    std::string method;
    std::string notes;
};

struct CriterionConfig {
    Method method = Method::Cv;
    double level = 0.01;
    int n_perm = 399;
    size_t max_pool_size = 8;
    size_t max_witness_size = 3;
    size_t max_rows = 14000;
    size_t stratum_size = 20;
    size_t min_stratum = 10;
    uint64_t seed = 0;
    int threads = 0;
};

namespace detail {

inline TestConfig to_test_config(const CriterionConfig& cfg, uint64_t seed) {
    TestConfig t;
    t.level = cfg.level;
    t.n_perm = cfg.n_perm;
    t.max_rows = cfg.max_rows;
    t.stratum_size = cfg.stratum_size;
    t.min_stratum = cfg.min_stratum;
    t.threads = cfg.threads;
    t.seed = seed;
    return t;
}

// Per-test seeds depend only on the tested triple, so repeated evaluations
// of the same (target, predictor, conditioning) inside one run coincide
// and recorded verdicts replay exactly.
inline uint64_t test_seed(uint64_t base, const std::string& target, const std::string& predictor,
                          const std::vector<std::string>& cond) {
    uint64_t h = base;
    auto fold = [&h](const std::string& s) {
        for (char c : s) h = mix_seed(h, static_cast<uint64_t>(static_cast<unsigned char>(c)));
        h = mix_seed(h, 0x7c);
    };
    fold(target);
    fold(predictor);
    std::vector<std::string> sorted = cond;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& s : sorted) fold(s);
    return h;
}

inline std::vector<std::vector<std::string>> subsets_of(const std::vector<std::string>& s) {
    std::vector<std::vector<std::string>> out;
    const size_t k = s.size();
    for (size_t mask = 0; mask < (size_t{1} << k); ++mask) {
        std::vector<std::string> sub;
        for (size_t i = 0; i < k; ++i)
            if (mask & (size_t{1} << i)) sub.push_back(s[i]);
        out.push_back(std::move(sub));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

}  // namespace detail

// Noncausality criterion for one ordered pair: search conditioning sets
// S from the pool, smallest first with lexicographic tie-break; accept x as
// a potential cause of y at the first S whose forward test accepts while
// the reverse test rejects for every subset of S. A reverse acceptance
// voids the candidate and the search continues.
inline Decision infer_potential_cause(const Dataset& ds, const std::string& x, const std::string& y,
                                      const std::vector<std::string>& pool, const CriterionConfig& cfg = {}) {
    if (x == y) throw std::invalid_argument("infer_potential_cause: x and y must differ");
    for (const auto& p : pool)
        if (p == x || p == y) throw std::invalid_argument("infer_potential_cause: pool overlaps tested pair");
    if (pool.size() > cfg.max_pool_size)
        throw std::invalid_argument("infer_potential_cause: pool exceeds max_pool_size");
    (void)ds.column_index(x);
    (void)ds.column_index(y);
    for (const auto& p : pool) (void)ds.column_index(p);

    Decision dec;
    dec.x = x;
    dec.y = y;
    dec.method = to_string(cfg.method);
    if (cfg.method == Method::Nrr)
        dec.notes = "reverse dependence certified for the fitted regression family only";

    std::map<std::pair<bool, std::vector<std::string>>, Verdict> memo;
    auto run = [&](bool forward, const std::vector<std::string>& cond) -> Verdict {
        const auto key = std::make_pair(forward, cond);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const std::string& target = forward ? y : x;
        const std::string& predictor = forward ? x : y;
        const uint64_t seed = detail::test_seed(cfg.seed, target, predictor, cond);
        const Verdict v = detail::run_method_test(cfg.method, ds, target, predictor, cond,
                                                  detail::to_test_config(cfg, seed));
        memo.emplace(key, v);
        return v;
    };

    std::vector<std::vector<std::string>> candidates;
    {
        std::vector<std::string> sorted_pool = pool;
        for (auto& c : detail::subsets_of(sorted_pool))
            if (c.size() <= cfg.max_witness_size) candidates.push_back(std::move(c));
    }

    for (const auto& candidate : candidates) {
        const Verdict forward = run(true, candidate);
        dec.evidence.push_back({true, candidate, candidate, forward});
        if (!forward.independent) continue;

        bool all_reject = true;
        for (const auto& sub : detail::subsets_of(candidate)) {
            const Verdict reverse = run(false, sub);
            dec.evidence.push_back({false, candidate, sub, reverse});
            if (reverse.independent) {
                all_reject = false;
                break;  // candidate voided
            }
        }
        if (all_reject) {
            dec.kind = DecisionKind::PotentialCause;
            dec.witness_set = candidate;
            return dec;
        }
    }
    dec.kind = DecisionKind::Inconclusive;
    return dec;
}

// Four-cell grid for a triple at test scale, plus the criterion decision
// computed from the cells with pool = {z}. Seeds match the ones
// infer_potential_cause derives, so shared cells agree between the two.
inline PatternRow pattern_table(const Dataset& ds, const std::string& x, const std::string& y,
                                const std::optional<std::string>& z, const CriterionConfig& cfg = {}) {
    if (x == y || (z && (*z == x || *z == y)))
        throw std::invalid_argument("pattern_table: columns must be distinct");
    struct CellSpec {
        std::string target, predictor;
        std::vector<std::string> cond;
    };
    std::vector<CellSpec> layout = {{y, x, {}}, {x, y, {}}};
    if (z) {
        layout.push_back({y, x, {*z}});
        layout.push_back({x, y, {*z}});
    }
    PatternRow row;
    row.replicates = 1;
    row.cells.resize(layout.size());
    row.votes.resize(layout.size());
    std::vector<Verdict> verdicts(layout.size());
    parallel_for(
        layout.size(),
        [&](size_t c) {
            const auto& spec = layout[c];
            const uint64_t seed = detail::test_seed(cfg.seed, spec.target, spec.predictor, spec.cond);
            auto tcfg = detail::to_test_config(cfg, seed);
            tcfg.threads = 1;
            verdicts[c] = detail::run_method_test(cfg.method, ds, spec.target, spec.predictor, spec.cond, tcfg);
        },
        cfg.threads);
    for (size_t c = 0; c < layout.size(); ++c) {
        row.cells[c] = verdicts[c].independent ? CellValue::Indep : CellValue::Dep;
        row.votes[c] = verdicts[c].independent ? 1 : 0;
    }
    row.decision_yes = decision_from_cells(row.cells);
    return row;
}

// pattern_table variant that also returns the verdicts, for callers that
// aggregate p-values across methods.
inline std::vector<Verdict> pattern_verdicts(const Dataset& ds, const std::string& x, const std::string& y,
                                             const std::optional<std::string>& z,
                                             const CriterionConfig& cfg = {}) {
    struct CellSpec {
        std::string target, predictor;
        std::vector<std::string> cond;
    };
    std::vector<CellSpec> layout = {{y, x, {}}, {x, y, {}}};
    if (z) {
        layout.push_back({y, x, {*z}});
        layout.push_back({x, y, {*z}});
    }
    std::vector<Verdict> verdicts(layout.size());
    parallel_for(
        layout.size(),
        [&](size_t c) {
            const auto& spec = layout[c];
            const uint64_t seed = detail::test_seed(cfg.seed, spec.target, spec.predictor, spec.cond);
            auto tcfg = detail::to_test_config(cfg, seed);
            tcfg.threads = 1;
            verdicts[c] = detail::run_method_test(cfg.method, ds, spec.target, spec.predictor, spec.cond, tcfg);
        },
        cfg.threads);
    return verdicts;
}

}  // namespace canid
