#pragma once

#include <cmath>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "canid/graph.hpp"

namespace canid {

enum class UnaryKind { Tanh, Exp, Square, Cube, Abs, Identity };

inline const char* unary_name(UnaryKind k) {
    switch (k) {
        case UnaryKind::Tanh: return "tanh";
        case UnaryKind::Exp: return "exp";
        case UnaryKind::Square: return "sq";
        case UnaryKind::Cube: return "cube";
        case UnaryKind::Abs: return "abs";
        case UnaryKind::Identity: return "id";
    }
    return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree over graph nodes and noise terms.
struct Expr {
    enum class Kind { Constant, Var, Noise, Sum, Product, Unary, Scaled };

    Kind kind = Kind::Constant;
    double value = 0.0;           // Constant payload or Scaled coefficient
    int ref = -1;                 // Var: node index; Noise: noise index
    UnaryKind op = UnaryKind::Identity;
    std::vector<ExprPtr> kids;
};

inline ExprPtr constant(double c) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Constant;
    e->value = c;
    return e;
}

inline ExprPtr var(NodeId v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->ref = v.index;
    return e;
}

inline ExprPtr noise(int noise_index) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Noise;
    e->ref = noise_index;
    return e;
}

inline ExprPtr sum(std::vector<ExprPtr> terms) {
    if (terms.empty()) return constant(0.0);
    if (terms.size() == 1) return terms[0];
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Sum;
    e->kids = std::move(terms);
    return e;
}

inline ExprPtr scaled(double c, ExprPtr inner);

// Product with constant factors folded into a single Scaled coefficient,
// so linear terms like 0.8*Z keep a recognizable shape.
inline ExprPtr product(std::vector<ExprPtr> factors) {
    double coeff = 1.0;
    std::vector<ExprPtr> rest;
    for (auto& f : factors) {
        if (f->kind == Expr::Kind::Constant)
            coeff *= f->value;
        else
            rest.push_back(f);
    }
    if (rest.empty()) return constant(coeff);
    ExprPtr core;
    if (rest.size() == 1) {
        core = rest[0];
    } else {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Product;
        e->kids = std::move(rest);
        core = e;
    }
    return coeff == 1.0 ? core : scaled(coeff, core);
}

inline ExprPtr scaled(double c, ExprPtr inner) {
    if (c == 1.0) return inner;
    if (inner->kind == Expr::Kind::Constant) return constant(c * inner->value);
    if (inner->kind == Expr::Kind::Scaled) return scaled(c * inner->value, inner->kids[0]);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Scaled;
    e->value = c;
    e->kids = {std::move(inner)};
    return e;
}

inline ExprPtr unary(UnaryKind op, ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Unary;
    e->op = op;
    e->kids = {std::move(inner)};
    return e;
}

inline double eval_unary(UnaryKind op, double x) {
    switch (op) {
        case UnaryKind::Tanh: return std::tanh(x);
        case UnaryKind::Exp: return std::exp(x);
        case UnaryKind::Square: return x * x;
        case UnaryKind::Cube: return x * x * x;
        case UnaryKind::Abs: return std::abs(x);
        case UnaryKind::Identity: return x;
    }
    return x;
}

inline double eval(const Expr& e, std::span<const double> node_values, std::span<const double> noise_values) {
    switch (e.kind) {
        case Expr::Kind::Constant: return e.value;
        case Expr::Kind::Var: return node_values[static_cast<size_t>(e.ref)];
        case Expr::Kind::Noise: return noise_values[static_cast<size_t>(e.ref)];
        case Expr::Kind::Sum: {
            double acc = 0.0;
            for (const auto& k : e.kids) acc += eval(*k, node_values, noise_values);
            return acc;
        }
        case Expr::Kind::Product: {
            double acc = 1.0;
            for (const auto& k : e.kids) acc *= eval(*k, node_values, noise_values);
            return acc;
        }
        case Expr::Kind::Unary: return eval_unary(e.op, eval(*e.kids[0], node_values, noise_values));
        case Expr::Kind::Scaled: return e.value * eval(*e.kids[0], node_values, noise_values);
    }
    return 0.0;
}

inline void collect_vars(const Expr& e, std::set<int>& out) {
    if (e.kind == Expr::Kind::Var) out.insert(e.ref);
    for (const auto& k : e.kids) collect_vars(*k, out);
}

inline void collect_noises(const Expr& e, std::set<int>& out) {
    if (e.kind == Expr::Kind::Noise) out.insert(e.ref);
    for (const auto& k : e.kids) collect_noises(*k, out);
}

inline int max_depth(const Expr& e) {
    int d = 0;
    for (const auto& k : e.kids) d = std::max(d, max_depth(*k));
    return d + 1;
}

}  // namespace canid
