#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "canid/parallel.hpp"
#include "canid/scm.hpp"

namespace canid {

// Bandwidth policies for kernel regression. MedianHeuristic rescales the
// per-predictor median pairwise distance by m^(-1/(4+d)); LooGrid refines
// that base over a multiplier grid by leave-one-out risk. Fixed bandwidths
// are taken in raw units and skip the internal standardization, which keeps
// the fit exactly equivariant under power-of-two target scaling.
struct MedianHeuristicBw {
    double scale = 1.0;
};
struct FixedBw {
    std::vector<double> bandwidths;
};
struct LooGridBw {
    double scale = 1.0;
    std::vector<double> multipliers = {0.25, 0.5, 1.0, 2.0, 4.0};
};
using BandwidthPolicy = std::variant<MedianHeuristicBw, FixedBw, LooGridBw>;

struct RegressionFit {
    std::vector<double> bandwidths;  // per predictor, in the units used for weights
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> loo_fitted;   // leave-one-out fit per row
    std::vector<double> studentized;  // residual / smoother-induced sd factor
    double loo_risk = 0.0;
    double flagged_fraction = 0.0;  // rows that fell back to the global mean
};

struct VarianceProfile {
    std::vector<double> values;  // per-row conditional variance estimates, floored at 0
    RegressionFit mean_fit;      // stage 1
    RegressionFit var_fit;       // stage 2
};

namespace detail {

inline double column_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double column_sd(const std::vector<double>& v, double mean) {
    double s = 0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// median of pairwise absolute differences; rows are strided down to a cap
// so the cost stays bounded on large inputs
inline double median_pairwise_distance(const std::vector<double>& v) {
    const size_t cap = 2048;
    const size_t n = v.size();
    const size_t step = n > cap ? (n + cap - 1) / cap : 1;
    std::vector<double> sub;
    sub.reserve(cap);
    for (size_t i = 0; i < n; i += step) sub.push_back(v[i]);
    const size_t m = sub.size();
    std::vector<double> dists;
    dists.reserve(m * (m - 1) / 2);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) dists.push_back(std::abs(sub[i] - sub[j]));
    if (dists.empty()) return 1.0;
    const size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    const double med = dists[mid];
    return med > 0 ? med : 1.0;
}

struct NwResult {
    std::vector<double> fitted;
    std::vector<double> loo;
    std::vector<double> sd_factor;  // residual sd divided by the noise sd, from the smoother weights
    double flagged = 0.0;
};

// Solves a small symmetric system in place; returns false on a failed pivot.
inline bool solve_small(std::vector<double>& A, std::vector<double>& b, size_t n) {
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-12) return false;
        if (piv != col) {
            for (size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / A[col * n + col];
        for (size_t r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] * inv;
            if (f == 0.0) continue;
            for (size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (size_t col = n; col-- > 0;) {
        double acc = b[col];
        for (size_t c = col + 1; c < n; ++c) acc -= A[col * n + c] * b[c];
        b[col] = acc / A[col * n + col];
    }
    return true;
}

// One Nadaraya-Watson pass. predictors is column-major (d columns of n).
// Self-weight is exactly 1, so in-sample weight sums never degenerate;
// the guard matters for the leave-one-out values.
inline NwResult nw_fit(const std::vector<std::vector<double>>& predictors, const std::vector<double>& y,
                       const std::vector<double>& bw, int threads) {
    const size_t n = y.size();
    const size_t d = predictors.size();
    NwResult out;
    out.fitted.assign(n, 0.0);
    out.loo.assign(n, 0.0);
    out.sd_factor.assign(n, 1.0);
    std::vector<double> inv2h2(d);
    for (size_t k = 0; k < d; ++k) inv2h2[k] = 0.5 / (bw[k] * bw[k]);
    const double ymean = column_mean(y);
    std::vector<int> flagged(n, 0);

    parallel_for(
        n,
        [&](size_t i) {
            double wsum = 0.0, wy = 0.0, w2sum = 0.0;
            for (size_t j = 0; j < n; ++j) {
                double q = 0.0;
                for (size_t k = 0; k < d; ++k) {
                    const double delta = predictors[k][i] - predictors[k][j];
                    q += delta * delta * inv2h2[k];
                }
                const double w = std::exp(-q);
                wsum += w;
                w2sum += w * w;
                wy += w * y[j];
            }
            if (wsum < 1e-8) {
                out.fitted[i] = ymean;
                flagged[i] = 1;
            } else {
                out.fitted[i] = wy / wsum;
            }
            // Var(y_i - fit_i) = sigma^2 (1 - 2 H_ii + sum_j H_ij^2), H_ij = w_ij / wsum
            const double den2 = 1.0 - 2.0 / wsum + w2sum / (wsum * wsum);
            out.sd_factor[i] = den2 > 1e-6 ? std::sqrt(den2) : 1.0;
            const double wsum_loo = wsum - 1.0;  // self weight is exp(0)
            if (wsum_loo < 1e-8) {
                out.loo[i] = ymean;
            } else {
                out.loo[i] = (wy - y[i]) / wsum_loo;
            }
        },
        threads);

    size_t nflag = 0;
    for (int f : flagged) nflag += static_cast<size_t>(f);
    out.flagged = static_cast<double>(nflag) / static_cast<double>(n);
    return out;
}

// Local-linear pass: per query row, weighted least squares on centered
// predictors. Unlike the locally-constant fit it does not bend toward the
// bulk in sparse tail regions. The same moment pass yields the
// leave-one-out value (drop the self row, weight exactly 1) and the
// studentization factor sqrt(1 - 2 a0 + a^T B a) with M a = e0 and
// B = sum w^2 v v^T. The inner loop is specialized for the common
// predictor counts.
template <size_t D>
inline void local_linear_rows(const std::vector<std::vector<double>>& predictors, const std::vector<double>& y,
                              const std::vector<double>& inv2h2, double ymean, NwResult& out,
                              std::vector<int>& flagged, int threads) {
    constexpr size_t P = D + 1;
    const size_t n = y.size();
    parallel_for(
        n,
        [&](size_t i) {
            double A[P * P] = {0};
            double B[P * P] = {0};
            double rhs[P] = {0};
            double v[P];
            for (size_t j = 0; j < n; ++j) {
                double q = 0.0;
                v[0] = 1.0;
                for (size_t k = 0; k < D; ++k) {
                    const double delta = predictors[k][j] - predictors[k][i];
                    v[k + 1] = delta;
                    q += delta * delta * inv2h2[k];
                }
                const double w = std::exp(-q);
                const double w2 = w * w;
                const double wy = w * y[j];
                for (size_t a = 0; a < P; ++a) {
                    rhs[a] += wy * v[a];
                    const double wva = w * v[a];
                    const double w2va = w2 * v[a];
                    for (size_t b = a; b < P; ++b) {
                        A[a * P + b] += wva * v[b];
                        B[a * P + b] += w2va * v[b];
                    }
                }
            }
            for (size_t a = 0; a < P; ++a)
                for (size_t b = 0; b < a; ++b) {
                    A[a * P + b] = A[b * P + a];
                    B[a * P + b] = B[b * P + a];
                }
            auto solve0 = [&](const double* M0, const double* r0, double& out0, double* full) {
                std::vector<double> M(M0, M0 + P * P);
                std::vector<double> r(r0, r0 + P);
                if (M0[0] < 1e-8 || !solve_small(M, r, P)) return false;
                if (!std::isfinite(r[0])) return false;
                out0 = r[0];
                if (full)
                    for (size_t a = 0; a < P; ++a) full[a] = r[a];
                return true;
            };
            if (!solve0(A, rhs, out.fitted[i], nullptr)) {
                out.fitted[i] = A[0] >= 1e-8 ? rhs[0] / A[0] : ymean;
                if (A[0] < 1e-8) flagged[i] = 1;
            }
            {
                double Aloo[P * P];
                double rloo[P];
                for (size_t t = 0; t < P * P; ++t) Aloo[t] = A[t];
                for (size_t t = 0; t < P; ++t) rloo[t] = rhs[t];
                Aloo[0] -= 1.0;
                rloo[0] -= y[i];
                if (!solve0(Aloo, rloo, out.loo[i], nullptr))
                    out.loo[i] = Aloo[0] >= 1e-8 ? rloo[0] / Aloo[0] : ymean;
            }
            {
                double e0[P] = {0};
                e0[0] = 1.0;
                double a0 = 0.0;
                double avec[P];
                if (solve0(A, e0, a0, avec)) {
                    double quad = 0.0;
                    for (size_t a = 0; a < P; ++a)
                        for (size_t b = 0; b < P; ++b) quad += avec[a] * B[a * P + b] * avec[b];
                    const double den2 = 1.0 - 2.0 * a0 + quad;
                    if (den2 > 1e-6) out.sd_factor[i] = std::sqrt(den2);
                }
            }
        },
        threads);
}

// Out-of-sample local-linear prediction at query points, with the
// predictive sd factor sqrt(1 + a^T B a): the held-out noise plus the
// variance the weighted fit itself carries.
template <size_t D>
inline void local_linear_predict_rows(const std::vector<std::vector<double>>& train,
                                      const std::vector<double>& y,
                                      const std::vector<std::vector<double>>& query,
                                      const std::vector<double>& inv2h2, double ymean,
                                      std::vector<double>& fitted, std::vector<double>& sd_factor,
                                      std::vector<int>& flagged, int threads) {
    constexpr size_t P = D + 1;
    const size_t n = y.size();
    const size_t q = query[0].size();
    parallel_for(
        q,
        [&](size_t i) {
            double A[P * P] = {0};
            double B[P * P] = {0};
            double rhs[P] = {0};
            double v[P];
            for (size_t j = 0; j < n; ++j) {
                double dist = 0.0;
                v[0] = 1.0;
                for (size_t k = 0; k < D; ++k) {
                    const double delta = train[k][j] - query[k][i];
                    v[k + 1] = delta;
                    dist += delta * delta * inv2h2[k];
                }
                const double w = std::exp(-dist);
                const double w2 = w * w;
                const double wy = w * y[j];
                for (size_t a = 0; a < P; ++a) {
                    rhs[a] += wy * v[a];
                    const double wva = w * v[a];
                    const double w2va = w2 * v[a];
                    for (size_t b = a; b < P; ++b) {
                        A[a * P + b] += wva * v[b];
                        B[a * P + b] += w2va * v[b];
                    }
                }
            }
            for (size_t a = 0; a < P; ++a)
                for (size_t b = 0; b < a; ++b) {
                    A[a * P + b] = A[b * P + a];
                    B[a * P + b] = B[b * P + a];
                }
            auto solve0 = [&](const double* r0, double& out0, double* full) {
                std::vector<double> M(A, A + P * P);
                std::vector<double> r(r0, r0 + P);
                if (A[0] < 1e-8 || !solve_small(M, r, P)) return false;
                if (!std::isfinite(r[0])) return false;
                out0 = r[0];
                if (full)
                    for (size_t a = 0; a < P; ++a) full[a] = r[a];
                return true;
            };
            sd_factor[i] = 1.0;
            if (!solve0(rhs, fitted[i], nullptr)) {
                fitted[i] = A[0] >= 1e-8 ? rhs[0] / A[0] : ymean;
                if (A[0] < 1e-8) {
                    flagged[i] = 1;
                    return;
                }
                // ratio fallback: weights w_j / A00
                const double quad = B[0] / (A[0] * A[0]);
                sd_factor[i] = std::sqrt(1.0 + quad);
                return;
            }
            double e0[P] = {0};
            e0[0] = 1.0;
            double a0 = 0.0;
            double avec[P];
            if (solve0(e0, a0, avec)) {
                double quad = 0.0;
                for (size_t a = 0; a < P; ++a)
                    for (size_t b = 0; b < P; ++b) quad += avec[a] * B[a * P + b] * avec[b];
                if (quad >= 0) sd_factor[i] = std::sqrt(1.0 + quad);
            }
        },
        threads);
}

struct PredictResult {
    std::vector<double> fitted;
    std::vector<double> sd_factor;
    double flagged = 0.0;
};

inline PredictResult local_linear_predict(const std::vector<std::vector<double>>& train,
                                          const std::vector<double>& y,
                                          const std::vector<std::vector<double>>& query,
                                          const std::vector<double>& bw, int threads) {
    const size_t d = train.size();
    const size_t q = query.at(0).size();
    PredictResult out;
    out.fitted.assign(q, 0.0);
    out.sd_factor.assign(q, 1.0);
    std::vector<double> inv2h2(d);
    for (size_t k = 0; k < d; ++k) inv2h2[k] = 0.5 / (bw[k] * bw[k]);
    const double ymean = column_mean(y);
    std::vector<int> flagged(q, 0);
    switch (d) {
        case 1: local_linear_predict_rows<1>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        case 2: local_linear_predict_rows<2>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        case 3: local_linear_predict_rows<3>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        case 4: local_linear_predict_rows<4>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        case 5: local_linear_predict_rows<5>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        case 6: local_linear_predict_rows<6>(train, y, query, inv2h2, ymean, out.fitted, out.sd_factor, flagged, threads); break;
        default: throw std::invalid_argument("local_linear_predict: more than 6 predictors is not supported");
    }
    size_t nflag = 0;
    for (int f : flagged) nflag += static_cast<size_t>(f);
    out.flagged = static_cast<double>(nflag) / static_cast<double>(q);
    return out;
}

inline NwResult local_linear_fit(const std::vector<std::vector<double>>& predictors,
                                 const std::vector<double>& y, const std::vector<double>& bw, int threads) {
    const size_t n = y.size();
    const size_t d = predictors.size();
    NwResult out;
    out.fitted.assign(n, 0.0);
    out.loo.assign(n, 0.0);
    out.sd_factor.assign(n, 1.0);
    std::vector<double> inv2h2(d);
    for (size_t k = 0; k < d; ++k) inv2h2[k] = 0.5 / (bw[k] * bw[k]);
    const double ymean = column_mean(y);
    std::vector<int> flagged(n, 0);
    switch (d) {
        case 1: local_linear_rows<1>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        case 2: local_linear_rows<2>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        case 3: local_linear_rows<3>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        case 4: local_linear_rows<4>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        case 5: local_linear_rows<5>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        case 6: local_linear_rows<6>(predictors, y, inv2h2, ymean, out, flagged, threads); break;
        default:
            throw std::invalid_argument("local_linear_regress: more than 6 predictors is not supported");
    }
    size_t nflag = 0;
    for (int f : flagged) nflag += static_cast<size_t>(f);
    out.flagged = static_cast<double>(nflag) / static_cast<double>(n);
    return out;
}

}  // namespace detail

namespace detail {

using FitFn = NwResult (*)(const std::vector<std::vector<double>>&, const std::vector<double>&,
                           const std::vector<double>&, int);

inline RegressionFit regress_impl(const std::vector<std::vector<double>>& predictors,
                                  const std::vector<double>& y, const BandwidthPolicy& policy, FitFn fit_fn,
                                  int threads) {
    const size_t n = y.size();
    const size_t d = predictors.size();
    if (d == 0) throw std::invalid_argument("kernel_regress: no predictors");
    if (n < 50) throw std::invalid_argument("kernel_regress: needs at least 50 rows, got " + std::to_string(n));
    for (const auto& col : predictors)
        if (col.size() != n) throw std::invalid_argument("kernel_regress: ragged columns");

    RegressionFit fit;
    if (std::holds_alternative<FixedBw>(policy)) {
        const auto& fixed = std::get<FixedBw>(policy);
        if (fixed.bandwidths.size() != d)
            throw std::invalid_argument("kernel_regress: fixed bandwidth count mismatch");
        for (double h : fixed.bandwidths)
            if (!(h > 0)) throw std::invalid_argument("kernel_regress: bandwidths must be > 0");
        fit.bandwidths = fixed.bandwidths;
        auto res = fit_fn(predictors, y, fit.bandwidths, threads);
        fit.fitted = std::move(res.fitted);
        fit.loo_fitted = std::move(res.loo);
        fit.flagged_fraction = res.flagged;
        fit.residuals.resize(n);
        fit.studentized.resize(n);
        double risk = 0;
        for (size_t i = 0; i < n; ++i) {
            fit.residuals[i] = y[i] - fit.fitted[i];
            fit.studentized[i] = fit.residuals[i] / res.sd_factor[i];
            const double e = y[i] - fit.loo_fitted[i];
            risk += e * e;
        }
        fit.loo_risk = risk / static_cast<double>(n);
        return fit;
    }

    // standardize for bandwidth comparability across columns
    std::vector<std::vector<double>> xs(d);
    std::vector<double> base(d);
    for (size_t k = 0; k < d; ++k) {
        const double mu = detail::column_mean(predictors[k]);
        const double sd = detail::column_sd(predictors[k], mu);
        if (!(sd > 0))
            throw std::invalid_argument("kernel_regress: degenerate predictor column " + std::to_string(k));
        xs[k].resize(n);
        for (size_t i = 0; i < n; ++i) xs[k][i] = (predictors[k][i] - mu) / sd;
        base[k] = detail::median_pairwise_distance(xs[k]);
    }
    const double ymu = detail::column_mean(y);
    const double ysd0 = detail::column_sd(y, ymu);
    const double ysd = ysd0 > 0 ? ysd0 : 1.0;
    std::vector<double> ys(n);
    for (size_t i = 0; i < n; ++i) ys[i] = (y[i] - ymu) / ysd;

    const double rate = std::pow(static_cast<double>(n), -1.0 / (4.0 + static_cast<double>(d)));
    double scale = 1.0;
    std::vector<double> multipliers{1.0};
    if (std::holds_alternative<MedianHeuristicBw>(policy)) {
        scale = std::get<MedianHeuristicBw>(policy).scale;
    } else {
        scale = std::get<LooGridBw>(policy).scale;
        multipliers = std::get<LooGridBw>(policy).multipliers;
    }

    double best_risk = std::numeric_limits<double>::infinity();
    NwResult best;
    std::vector<double> best_bw;
    for (double mult : multipliers) {
        std::vector<double> bw(d);
        for (size_t k = 0; k < d; ++k) bw[k] = base[k] * rate * scale * mult;
        auto res = fit_fn(xs, ys, bw, threads);
        double risk = 0;
        for (size_t i = 0; i < n; ++i) {
            const double e = ys[i] - res.loo[i];
            risk += e * e;
        }
        risk /= static_cast<double>(n);
        if (risk < best_risk) {
            best_risk = risk;
            best = std::move(res);
            best_bw = std::move(bw);
        }
    }

    fit.bandwidths = best_bw;
    fit.flagged_fraction = best.flagged;
    fit.loo_risk = best_risk * ysd * ysd;
    fit.fitted.resize(n);
    fit.residuals.resize(n);
    fit.loo_fitted.resize(n);
    fit.studentized.resize(n);
    for (size_t i = 0; i < n; ++i) {
        fit.fitted[i] = ymu + ysd * best.fitted[i];
        fit.residuals[i] = y[i] - fit.fitted[i];
        fit.loo_fitted[i] = ymu + ysd * best.loo[i];
        fit.studentized[i] = fit.residuals[i] / best.sd_factor[i];
    }
    return fit;
}

}  // namespace detail

// Nadaraya-Watson regression of y on the given predictor columns with a
// product Gaussian kernel. Median-heuristic policies standardize columns
// internally and map the fit back to original units.
inline RegressionFit kernel_regress(const std::vector<std::vector<double>>& predictors,
                                    const std::vector<double>& y,
                                    const BandwidthPolicy& policy = MedianHeuristicBw{}, int threads = 0) {
    return detail::regress_impl(predictors, y, policy, &detail::nw_fit, threads);
}

// Local-linear variant with the same kernel and bandwidth policies. The
// first-order term removes the design bias that pulls locally-constant
// fits toward the bulk in sparse tail regions.
inline RegressionFit local_linear_regress(const std::vector<std::vector<double>>& predictors,
                                          const std::vector<double>& y,
                                          const BandwidthPolicy& policy = MedianHeuristicBw{},
                                          int threads = 0) {
    return detail::regress_impl(predictors, y, policy, &detail::local_linear_fit, threads);
}

// Dataset-facing overload.
inline RegressionFit kernel_regress(const Dataset& ds, const std::string& target,
                                    const std::vector<std::string>& predictors,
                                    const BandwidthPolicy& policy = MedianHeuristicBw{}, int threads = 0) {
    if (predictors.empty()) throw std::invalid_argument("kernel_regress: no predictors");
    std::vector<std::vector<double>> cols;
    for (const auto& p : predictors) {
        if (p == target) throw std::invalid_argument("kernel_regress: target used as predictor");
        cols.push_back(ds.column(p));
    }
    return kernel_regress(cols, ds.column(target), policy, threads);
}

// Two-stage conditional variance estimate: regress y on {x} u s, then
// regress the squared residuals on the same predictors. Stage-2 fits of a
// nonnegative target are convex combinations, hence nonnegative; the floor
// only guards the global-mean fallback path.
inline VarianceProfile conditional_variance_profile(const std::vector<std::vector<double>>& predictors,
                                                    const std::vector<double>& y,
                                                    const BandwidthPolicy& policy = MedianHeuristicBw{},
                                                    int threads = 0) {
    VarianceProfile prof;
    prof.mean_fit = kernel_regress(predictors, y, policy, threads);
    std::vector<double> r2(y.size());
    for (size_t i = 0; i < y.size(); ++i) r2[i] = prof.mean_fit.residuals[i] * prof.mean_fit.residuals[i];
    prof.var_fit = kernel_regress(predictors, r2, policy, threads);
    prof.values.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i) prof.values[i] = std::max(0.0, prof.var_fit.fitted[i]);
    return prof;
}

inline VarianceProfile conditional_variance_profile(const Dataset& ds, const std::string& y,
                                                    const std::string& x, const std::vector<std::string>& s,
                                                    const BandwidthPolicy& policy = MedianHeuristicBw{},
                                                    int threads = 0) {
    std::vector<std::vector<double>> preds{ds.column(x)};
    for (const auto& name : s) preds.push_back(ds.column(name));
    return conditional_variance_profile(preds, ds.column(y), policy, threads);
}

}  // namespace canid
