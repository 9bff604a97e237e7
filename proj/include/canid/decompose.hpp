#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "canid/scm.hpp"

namespace canid {

enum class TermBucket {
    F11,              // terms with the reference parent as argument
    F12,              // nonlinear terms without reference parent or noise
    LinearObsFuncCoef,  // observable variable times a function of observables
    LinearObsConst,     // observable variable with constant coefficient
    LinearHidFuncCoef,  // hidden variable times a function of observables
    LinearHidConst,     // hidden variable with constant coefficient
    NoiseMixing,        // terms mixing the node's noise with other variables
    PureNoise,          // terms containing only the node's noise
    ConstantTerm,
};

struct LinearTerm {
    NodeId var;
    double coeff = 1.0;                // for constant-coefficient terms
    std::vector<NodeId> coeff_args;    // for function-coefficient terms
};

struct ClassifiedTerm {
    TermBucket bucket;
    ExprPtr expr;
};

// Bucket assignment of a functional equation's top-level summands relative
// to a target node y and reference parent x. Sums and scaled sums are
// distributed at the top level only; anything else is classified whole.
struct TermTaxonomy {
    NodeId target;
    NodeId reference;

    std::vector<NodeId> f11_observed;  // other observed args of x's term
    std::vector<NodeId> f11_hidden;
    bool x_in_f11 = false;

    std::vector<NodeId> f12_observed;
    std::vector<NodeId> f12_hidden;

    std::vector<LinearTerm> linear_obs_funccoef;
    std::vector<LinearTerm> linear_obs_const;
    std::vector<LinearTerm> linear_hid_funccoef;
    std::vector<LinearTerm> linear_hid_const;

    std::vector<NodeId> noise_mixing_observed;
    std::vector<NodeId> noise_mixing_hidden;
    bool x_in_noise_mixing = false;

    bool pure_noise = false;

    std::vector<ClassifiedTerm> terms;  // full partition, for reassembly

    // Observables that must be conditioned for the additive-noise reduction,
    // with none of the constant-coefficient linear variables left out.
    NodeSet required_conditioning() const {
        NodeSet s;
        auto add = [&s](const std::vector<NodeId>& v) { s.insert(v.begin(), v.end()); };
        add(f11_observed);
        add(f12_observed);
        add(noise_mixing_observed);
        for (const auto& t : linear_obs_funccoef) {
            s.insert(t.var);
            add(t.coeff_args);
        }
        for (const auto& t : linear_hid_funccoef) add(t.coeff_args);
        for (const auto& t : linear_obs_const) s.insert(t.var);
        return s;
    }

    // Hidden variables outside x's own term, whose conditional relation to
    // x decides whether the reduced equation keeps an independent noise.
    NodeSet hidden_outside_f11() const {
        NodeSet s;
        s.insert(f12_hidden.begin(), f12_hidden.end());
        s.insert(noise_mixing_hidden.begin(), noise_mixing_hidden.end());
        for (const auto& t : linear_hid_funccoef) s.insert(t.var);
        for (const auto& t : linear_hid_const) s.insert(t.var);
        return s;
    }

    ExprPtr reassemble() const {
        std::vector<ExprPtr> parts;
        for (const auto& t : terms) parts.push_back(t.expr);
        return sum(parts);
    }
};

namespace detail {

inline void flatten_top_sum(const ExprPtr& e, double scale, std::vector<std::pair<double, ExprPtr>>& out) {
    if (e->kind == Expr::Kind::Sum) {
        for (const auto& k : e->kids) flatten_top_sum(k, scale, out);
    } else if (e->kind == Expr::Kind::Scaled && e->kids[0]->kind == Expr::Kind::Sum) {
        flatten_top_sum(e->kids[0], scale * e->value, out);
    } else {
        out.emplace_back(scale, e);
    }
}

}  // namespace detail

inline TermTaxonomy decompose(const ScmModel& model, NodeId y, NodeId x) {
    const auto& g = model.graph();
    const auto& pars = g.parents(y);
    if (std::find(pars.begin(), pars.end(), x) == pars.end())
        throw std::invalid_argument("decompose: '" + g.name(x) + "' is not a parent of '" + g.name(y) + "'");

    TermTaxonomy tax;
    tax.target = y;
    tax.reference = x;
    const int own_noise = model.noise_of(y);

    std::vector<std::pair<double, ExprPtr>> summands;
    detail::flatten_top_sum(model.equation(y), 1.0, summands);

    auto split_vars = [&](const std::set<int>& refs, std::vector<NodeId>& obs, std::vector<NodeId>& hid,
                          bool skip_x) {
        for (int r : refs) {
            const NodeId v{r};
            if (skip_x && v == x) continue;
            auto& dst = g.observed(v) ? obs : hid;
            if (std::find(dst.begin(), dst.end(), v) == dst.end()) dst.push_back(v);
        }
    };

    for (auto& [scale, term] : summands) {
        const ExprPtr stored = scale == 1.0 ? term : scaled(scale, term);
        std::set<int> vars_in;
        std::set<int> noises_in;
        collect_vars(*term, vars_in);
        collect_noises(*term, noises_in);
        const bool has_noise = noises_in.count(own_noise) > 0;
        const bool has_x = vars_in.count(x.index) > 0;

        if (has_noise) {
            if (vars_in.empty()) {
                tax.pure_noise = true;
                tax.terms.push_back({TermBucket::PureNoise, stored});
            } else {
                if (has_x) tax.x_in_noise_mixing = true;
                split_vars(vars_in, tax.noise_mixing_observed, tax.noise_mixing_hidden, true);
                tax.terms.push_back({TermBucket::NoiseMixing, stored});
            }
            continue;
        }
        if (has_x) {
            tax.x_in_f11 = true;
            split_vars(vars_in, tax.f11_observed, tax.f11_hidden, true);
            tax.terms.push_back({TermBucket::F11, stored});
            continue;
        }
        if (vars_in.empty()) {
            tax.terms.push_back({TermBucket::ConstantTerm, stored});
            continue;
        }

        // candidate linear shapes: V, c*V, c*(W1*...*Wk), c*(f(obs)*V)
        ExprPtr core = term;
        double coeff = scale;
        if (core->kind == Expr::Kind::Scaled) {
            coeff *= core->value;
            core = core->kids[0];
        }
        if (core->kind == Expr::Kind::Var) {
            const NodeId v{core->ref};
            LinearTerm lt{v, coeff, {}};
            if (g.observed(v)) {
                tax.linear_obs_const.push_back(lt);
                tax.terms.push_back({TermBucket::LinearObsConst, stored});
            } else {
                tax.linear_hid_const.push_back(lt);
                tax.terms.push_back({TermBucket::LinearHidConst, stored});
            }
            continue;
        }
        if (core->kind == Expr::Kind::Product) {
            std::vector<NodeId> var_factors;
            std::set<int> other_args;
            bool others_clean = true;  // non-VarRef factors must use observables only
            for (const auto& f : core->kids) {
                if (f->kind == Expr::Kind::Var) {
                    var_factors.push_back(NodeId{f->ref});
                } else {
                    std::set<int> fv;
                    collect_vars(*f, fv);
                    for (int r : fv) {
                        if (!g.observed(NodeId{r})) others_clean = false;
                        other_args.insert(r);
                    }
                }
            }
            std::vector<NodeId> hidden_factors;
            std::vector<NodeId> observed_factors;
            for (NodeId v : var_factors) (g.observed(v) ? observed_factors : hidden_factors).push_back(v);

            if (others_clean && hidden_factors.size() == 1) {
                LinearTerm lt{hidden_factors[0], coeff, {}};
                for (NodeId v : observed_factors) lt.coeff_args.push_back(v);
                for (int r : other_args) lt.coeff_args.push_back(NodeId{r});
                tax.linear_hid_funccoef.push_back(lt);
                tax.terms.push_back({TermBucket::LinearHidFuncCoef, stored});
                continue;
            }
            if (others_clean && hidden_factors.empty() && !observed_factors.empty()) {
                // first variable factor is taken as the linear one
                LinearTerm lt{observed_factors[0], coeff, {}};
                for (size_t i = 1; i < observed_factors.size(); ++i) lt.coeff_args.push_back(observed_factors[i]);
                for (int r : other_args) lt.coeff_args.push_back(NodeId{r});
                tax.linear_obs_funccoef.push_back(lt);
                tax.terms.push_back({TermBucket::LinearObsFuncCoef, stored});
                continue;
            }
        }

        split_vars(vars_in, tax.f12_observed, tax.f12_hidden, false);
        tax.terms.push_back({TermBucket::F12, stored});
    }
    return tax;
}

}  // namespace canid
