#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "canid/scm.hpp"

namespace canid {

enum class CellValue { Indep, Dep };
enum class CellExpect { Indep, Dep, Any };
enum class DecisionExpect { Yes, No, Any };

// Expected (in)dependence cells for the designated pair, in the order
// (y|x), (x|y), (y|x,z), (x|y,z); bivariate systems use the first two.
struct ExpectedPattern {
    std::vector<CellExpect> cells;
    DecisionExpect decision = DecisionExpect::Any;
};

struct Preset {
    std::string name;
    std::string description;
    ScmModel model;
    std::string x;
    std::string y;
    std::optional<std::string> z;
    ExpectedPattern expected;
};

namespace detail {

// Declarative model assembly: the graph is derived from the equations'
// variable references, so declared structure and equations cannot drift.
class ModelBuilder {
public:
    NodeId node(const std::string& name, bool observed) {
        nodes_.push_back({name, observed});
        equations_.push_back(nullptr);
        return NodeId{static_cast<int>(nodes_.size()) - 1};
    }

    int gaussian(const std::string& id, double mean, double sd) {
        noises_.push_back({id, DistKind::Gaussian, mean, sd});
        return static_cast<int>(noises_.size()) - 1;
    }
    int uniform(const std::string& id, double lo, double hi) {
        noises_.push_back({id, DistKind::Uniform, lo, hi});
        return static_cast<int>(noises_.size()) - 1;
    }
    int laplace(const std::string& id, double loc, double scale) {
        noises_.push_back({id, DistKind::Laplace, loc, scale});
        return static_cast<int>(noises_.size()) - 1;
    }

    void eq(NodeId v, ExprPtr e) { equations_[static_cast<size_t>(v.index)] = std::move(e); }

    ScmModel build() const {
        for (size_t i = 0; i < equations_.size(); ++i)
            if (!equations_[i]) throw std::logic_error("preset builder: missing equation for " + nodes_[i].name);
        CausalGraph g = ScmModel::derive_graph(nodes_, equations_);
        return ScmModel(std::move(g), equations_, noises_);
    }

private:
    std::vector<NodeDecl> nodes_;
    std::vector<ExprPtr> equations_;
    std::vector<NoiseSpec> noises_;
};

inline ExpectedPattern pattern(CellExpect a, CellExpect b, CellExpect c, CellExpect d, DecisionExpect dec) {
    return {{a, b, c, d}, dec};
}
inline ExpectedPattern pattern2(CellExpect a, CellExpect b, DecisionExpect dec) { return {{a, b}, dec}; }

constexpr CellExpect I = CellExpect::Indep;
constexpr CellExpect D = CellExpect::Dep;
constexpr CellExpect A = CellExpect::Any;

inline Preset make_fig1a() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto V = b.node("V", false);
    auto EPS = b.node("EPS", false);
    auto ez = b.gaussian("eta_z", 0, 1);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eta_y", 0, 1);
    auto ev = b.gaussian("eta_v", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(V, noise(ev));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({scaled(0.8, var(Z)), noise(ex)}));
    b.eq(Y, sum({scaled(1.0, var(X)), scaled(0.5, var(Z)), scaled(1.4, product({var(EPS), var(V)})), noise(ey)}));
    return {"fig1a",
            "common driver Z of X and Y, X->Y, plus a hidden multiplicative disturbance on Y",
            b.build(), "X", "Y", "Z", pattern(I, D, I, D, DecisionExpect::Yes)};
}

inline Preset make_fig1b() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto V = b.node("V", false);
    auto EPS = b.node("EPS", false);
    auto ez = b.gaussian("eta_z", 0, 1);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eta_y", 0, 1);
    auto ev = b.gaussian("eta_v", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(V, noise(ev));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({scaled(0.8, var(Z)), scaled(1.5, product({var(EPS), var(V)})), noise(ex)}));
    b.eq(Y, sum({scaled(1.0, var(X)), scaled(1.5, var(Z)), noise(ey)}));
    return {"fig1b",
            "hidden multiplicative disturbance on X; conditioning on Z restores the asymmetry",
            b.build(), "X", "Y", "Z", pattern(D, D, I, D, DecisionExpect::Yes)};
}

inline Preset make_fig1c() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto EPS = b.node("EPS", false);
    auto ez = b.gaussian("eta_z", 0, 1);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eta_y", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({scaled(0.8, var(Z)), noise(ex)}));
    b.eq(Y, sum({scaled(1.0, var(X)), scaled(1.2, product({var(EPS), var(Z)})), noise(ey)}));
    return {"fig1c",
            "random coefficient on the Z contribution to Y; conditioning on Z makes both directions separable",
            b.build(), "X", "Y", "Z", pattern(D, D, I, I, DecisionExpect::No)};
}

inline Preset make_fig1d() {
    ModelBuilder b;
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto Z = b.node("Z", true);
    auto EPS = b.node("EPS", false);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eta_y", 0, 1);
    auto ez = b.gaussian("eta_z", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(X, noise(ex));
    b.eq(EPS, noise(ee));
    b.eq(Y, sum({scaled(1.0, var(X)), noise(ey)}));
    b.eq(Z, sum({scaled(0.6, var(X)), scaled(1.3, product({var(EPS), var(X)})), noise(ez)}));
    return {"fig1d",
            "random coefficient confined to the side branch Z; conditioning on Z manufactures a misleading asymmetry",
            b.build(), "X", "Y", "Z", pattern(I, I, I, D, DecisionExpect::No)};
}

inline Preset make_gen_ee1() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto V = b.node("V", false);
    auto EPS = b.node("EPS", false);
    auto ez = b.gaussian("eta_z", 0, 1);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eps_y", 0, 1);
    auto ev = b.gaussian("eta_v", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(V, noise(ev));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({scaled(0.8, var(Z)), noise(ex)}));
    b.eq(Y, sum({scaled(1.0, var(X)), scaled(0.5, var(Z)), scaled(1.4, product({var(EPS), var(V)})), noise(ey),
                 scaled(0.5, unary(UnaryKind::Cube, noise(ey)))}));
    return {"gen_ee1",
            "fig1a structure with a non-Gaussian additive noise composite on Y",
            b.build(), "X", "Y", "Z", pattern(I, D, I, D, DecisionExpect::Yes)};
}

inline Preset make_gen_ee2() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto V = b.node("V", false);
    auto EPS = b.node("EPS", false);
    auto ez = b.laplace("eps_z", 0, 1);
    auto ex = b.gaussian("eps_x", 0, 1);
    auto ey = b.gaussian("eps_y", 0, 1);
    auto ev = b.gaussian("eta_v", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(V, noise(ev));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({unary(UnaryKind::Tanh, scaled(1.2, var(Z))), scaled(0.7, noise(ex))}));
    b.eq(Y, sum({scaled(1.5, var(X)), scaled(0.9, product({var(X), var(Z)})),
                 scaled(1.2, product({var(EPS), var(V)})),
                 product({sum({constant(1.0), scaled(0.5, unary(UnaryKind::Tanh, var(Z)))}), noise(ey)})}));
    return {"gen_ee2",
            "nonlinear X<-Z link, interaction in Y, hidden product noise and Z-modulated noise amplitude",
            b.build(), "X", "Y", "Z", pattern(A, D, I, D, DecisionExpect::Yes)};
}

inline Preset make_gen_ee3() {
    ModelBuilder b;
    auto Z = b.node("Z", true);
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto V = b.node("V", false);
    auto EPS = b.node("EPS", false);
    auto ez = b.gaussian("eps_z", 0, 1);
    auto ex = b.gaussian("eps_x", 0, 1);
    auto ey = b.gaussian("eps_y", 0, 1);
    auto ev = b.gaussian("eta_v", 0, 1);
    auto ee = b.gaussian("eta_eps", 0, 1);
    b.eq(Z, noise(ez));
    b.eq(V, noise(ev));
    b.eq(EPS, noise(ee));
    b.eq(X, sum({unary(UnaryKind::Tanh, scaled(0.9, var(Z))), scaled(1.3, product({var(EPS), var(V)})),
                 scaled(0.8, noise(ex))}));
    b.eq(Y, sum({scaled(1.0, var(X)), scaled(0.6, product({var(X), var(Z)})),
                 product({sum({constant(1.0), scaled(0.5, unary(UnaryKind::Tanh, var(Z)))}), noise(ey)})}));
    return {"gen_ee3",
            "fig1b structure with nonlinear links and Z-modulated noise amplitude on Y",
            b.build(), "X", "Y", "Z", pattern(D, D, I, D, DecisionExpect::Yes)};
}

// Outer invertible distortions wrapped around a separable core; the plain
// conditional-variance and residual tests are not expected to decode it.
inline Preset make_postnl() {
    ModelBuilder b;
    auto X = b.node("X", true);
    auto V1 = b.node("V1", true);
    auto V3 = b.node("V3", true);
    auto Y = b.node("Y", true);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto e1 = b.gaussian("eta_v1", 0, 1);
    auto e3 = b.gaussian("eta_v3", 0, 1);
    auto ey = b.gaussian("eps_y", 0, 1);
    b.eq(X, noise(ex));
    b.eq(V1, noise(e1));
    b.eq(V3, noise(e3));
    // inner = tanh(X) + 0.6 V1 + eps_y; h2(u) = u + 0.1 u^3; plus 0.6 X + 0.8 V3; h4(u) = u + 0.1 u^3
    auto inner = sum({unary(UnaryKind::Tanh, var(X)), scaled(0.6, var(V1)), noise(ey)});
    auto h2 = sum({inner, scaled(0.1, unary(UnaryKind::Cube, inner))});
    auto mid = sum({h2, scaled(0.6, var(X)), scaled(0.8, var(V3))});
    auto h4 = sum({mid, scaled(0.1, unary(UnaryKind::Cube, mid))});
    b.eq(Y, h4);
    return {"postnl",
            "invertible post-nonlinear distortion around a separable core (generator only)",
            b.build(), "X", "Y", "V1",
            {{A, A, A, A}, DecisionExpect::Any}};
}

inline Preset make_hoyer_bivariate_an() {
    ModelBuilder b;
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto uy = b.uniform("u_y", -1, 1);
    b.eq(X, noise(ex));
    b.eq(Y, sum({var(X), unary(UnaryKind::Cube, var(X)), noise(uy)}));
    return {"hoyer_bivariate_an",
            "nonlinear additive-noise pair with uniform noise; separable forward only",
            b.build(), "X", "Y", std::nullopt, pattern2(I, D, DecisionExpect::Yes)};
}

inline Preset make_linear_gaussian_bivariate() {
    ModelBuilder b;
    auto X = b.node("X", true);
    auto Y = b.node("Y", true);
    auto ex = b.gaussian("eta_x", 0, 1);
    auto ey = b.gaussian("eta_y", 0, 1);
    b.eq(X, noise(ex));
    b.eq(Y, sum({scaled(0.8, var(X)), noise(ey)}));
    return {"linear_gaussian_bivariate",
            "linear Gaussian pair; separable in both directions, no usable asymmetry",
            b.build(), "X", "Y", std::nullopt, pattern2(I, I, DecisionExpect::No)};
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "fig1a", "fig1b", "fig1c", "fig1d", "gen_ee1", "gen_ee2", "gen_ee3",
        "postnl", "hoyer_bivariate_an", "linear_gaussian_bivariate"};
    return names;
}

inline Preset preset(const std::string& name) {
    using namespace detail;
    if (name == "fig1a") return make_fig1a();
    if (name == "fig1b") return make_fig1b();
    if (name == "fig1c") return make_fig1c();
    if (name == "fig1d") return make_fig1d();
    if (name == "gen_ee1") return make_gen_ee1();
    if (name == "gen_ee2") return make_gen_ee2();
    if (name == "gen_ee3") return make_gen_ee3();
    if (name == "postnl") return make_postnl();
    if (name == "hoyer_bivariate_an") return make_hoyer_bivariate_an();
    if (name == "linear_gaussian_bivariate") return make_linear_gaussian_bivariate();
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + name + "' (valid: " + known + ")");
}

}  // namespace canid
