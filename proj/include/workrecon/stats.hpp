// Copyright 2026 The workrecon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "workrecon/invert.hpp"

namespace workrecon {

// ---------------------------------------------------------------------------
// Weighted straight-line fit of the detailed fluctuation relation
// ln P_F(+W)/P_B(-W) = W / kT, with outlier rejection.
// ---------------------------------------------------------------------------

struct RatioPoint {
    double w_pev = 0;
    double ln_ratio = 0;
    double sigma = 0;  // standard deviation of ln_ratio
};

// Work bins carrying less reconstructed probability than this are treated as
// empty when forming log-ratios: below it the ratio is dominated by the
// projection floor, not by data.
inline constexpr double kRatioMassFloor = 1e-6;

struct FitResult {
    double slope = 0;  // 1/peV
    double intercept = 0;
    double slope_stderr = 0;
    double intercept_stderr = 0;
    double kt_pev = 0;  // 1/slope; negative when the fitted slope is negative
    double kt_sigma_pev = 0;
    double confidence = 0.99;
    int n_points = 0;
    int n_excluded = 0;
    int dof = 0;
    double s2 = 0;  // weighted residual variance of the final fit
    // (X^T W X)^{-1} of the final fit, for interval bands: [intercept, slope]
    double cov00 = 0, cov01 = 0, cov11 = 0;
    std::vector<double> excluded_w;
    std::vector<double> residuals;  // every input point against the final line

    // Half-width of the two-sided prediction interval at abscissa w for a new
    // observation with uncertainty sigma, at the fit's confidence level.
    double prediction_half_width(double w, double sigma) const {
        const boost::math::students_t_distribution<double> dist(static_cast<double>(dof));
        const double tq = boost::math::quantile(dist, 0.5 + confidence / 2.0);
        const double var_line = cov00 + 2.0 * cov01 * w + cov11 * w * w;
        return tq * std::sqrt(std::max(s2, 0.0) * (sigma * sigma + var_line));
    }
};

namespace detail {

struct Wls {
    double b0 = 0, b1 = 0;
    double cov00 = 0, cov01 = 0, cov11 = 0;  // (X^T W X)^{-1}
    double s2 = 0;
    int dof = 0;
    bool ok = false;
};

inline Wls weighted_line(const std::vector<double> &x, const std::vector<double> &y,
                         const std::vector<double> &w) {
    Wls f;
    double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i];
        sx += w[i] * x[i];
        sxx += w[i] * x[i] * x[i];
        sy += w[i] * y[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double det = s * sxx - sx * sx;
    if (!(det > 1e-12 * std::max(s * sxx, 1e-300))) return f;  // collapsed abscissas
    f.b0 = (sxx * sy - sx * sxy) / det;
    f.b1 = (s * sxy - sx * sy) / det;
    f.cov00 = sxx / det;
    f.cov01 = -sx / det;
    f.cov11 = s / det;
    f.dof = static_cast<int>(x.size()) - 2;
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.b0 + f.b1 * x[i]);
        rss += w[i] * r * r;
    }
    f.s2 = f.dof > 0 ? rss / f.dof : 0.0;
    f.ok = true;
    return f;
}

}  // namespace detail

// Inverse-variance weighted fit with one pass of leave-one-out outlier
// rejection: a point is dropped when it falls outside the Student-t
// prediction interval of the line fitted to the other points. The interval
// pass needs at least 4 points (so the reduced fits keep a residual degree of
// freedom); fewer than 3 survivors means the data cannot pin a line down.
inline FitResult fit_fluctuation(const std::vector<RatioPoint> &points, double confidence = 0.99) {
    const std::size_t n = points.size();
    if (n < 3) throw validation_error("fit_fluctuation: need at least 3 ratio points");
    if (!(confidence > 0 && confidence < 1))
        throw validation_error("fit_fluctuation: confidence must be in (0,1)");
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(points[i].sigma > 0))
            throw validation_error("fit_fluctuation: every point needs a positive sigma");
        x[i] = points[i].w_pev;
        y[i] = points[i].ln_ratio;
        w[i] = 1.0 / (points[i].sigma * points[i].sigma);
    }

    std::vector<bool> excluded(n, false);
    if (n >= 4) {
        const boost::math::students_t_distribution<double> dist(static_cast<double>(n) - 3.0);
        const double tq = boost::math::quantile(dist, 0.5 + confidence / 2.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> xs, ys, ws;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    xs.push_back(x[j]);
                    ys.push_back(y[j]);
                    ws.push_back(w[j]);
                }
            const detail::Wls f = detail::weighted_line(xs, ys, ws);
            if (!f.ok || f.dof < 1 || !std::isfinite(f.s2)) continue;  // cannot test: keep the point
            const double pred = f.b0 + f.b1 * x[i];
            const double var_line = f.cov00 + 2.0 * f.cov01 * x[i] + f.cov11 * x[i] * x[i];
            const double half = tq * std::sqrt(f.s2 * (points[i].sigma * points[i].sigma + var_line));
            if (std::abs(y[i] - pred) > half) excluded[i] = true;
        }
    }

    std::vector<double> xs, ys, ws;
    FitResult res;
    res.confidence = confidence;
    for (std::size_t i = 0; i < n; ++i) {
        if (excluded[i]) {
            res.excluded_w.push_back(x[i]);
            continue;
        }
        xs.push_back(x[i]);
        ys.push_back(y[i]);
        ws.push_back(w[i]);
    }
    if (xs.size() < 3)
        throw numerical_error("fit_fluctuation: fit degenerate, fewer than 3 points survive the " +
                              std::to_string(static_cast<int>(confidence * 100)) +
                              "% prediction interval");
    const detail::Wls f = detail::weighted_line(xs, ys, ws);
    if (!f.ok) throw numerical_error("fit_fluctuation: singular design (work values collapse)");

    res.slope = f.b1;
    res.intercept = f.b0;
    res.s2 = f.s2;
    res.dof = f.dof;
    res.cov00 = f.cov00;
    res.cov01 = f.cov01;
    res.cov11 = f.cov11;
    res.slope_stderr = std::sqrt(std::max(f.s2, 0.0) * f.cov11);
    res.intercept_stderr = std::sqrt(std::max(f.s2, 0.0) * f.cov00);
    res.kt_pev = 1.0 / res.slope;
    res.kt_sigma_pev = res.slope_stderr / (res.slope * res.slope);
    res.n_points = static_cast<int>(xs.size());
    res.n_excluded = static_cast<int>(res.excluded_w.size());
    res.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.residuals[i] = y[i] - (res.intercept + res.slope * x[i]);
    return res;
}

// ---------------------------------------------------------------------------
// Spin-temperature estimator from level populations.
// ---------------------------------------------------------------------------

struct KtEstimate {
    enum class Tag { finite, infinite, negative };
    double kt_pev = 0;
    double kt_hhz = 0;
    Tag tag = Tag::finite;
};

inline const char *to_string(KtEstimate::Tag t) {
    switch (t) {
        case KtEstimate::Tag::finite: return "finite";
        case KtEstimate::Tag::infinite: return "infinite";
        default: return "negative";
    }
}

// (E2 - E0) / ln(p0 / p2); equal populations give an infinite temperature and
// inverted ones a negative temperature, both tagged rather than thrown.
inline KtEstimate kt_from_populations(const PopulationVector &pops, const SpectrumTable &table,
                                      const EnergyScale &scale = {}) {
    pops.validate();
    const double p0 = pops.p[0], p2 = pops.p[2];
    if (!(p0 > 0) || !(p2 > 0))
        throw validation_error("kt_from_populations: levels 0 and 2 must be populated");
    KtEstimate est;
    const double gap = table.energies_hhz[2] - table.energies_hhz[0];
    if (p0 == p2) {
        est.kt_hhz = std::numeric_limits<double>::infinity();
        est.kt_pev = std::numeric_limits<double>::infinity();
        est.tag = KtEstimate::Tag::infinite;
        return est;
    }
    est.kt_hhz = gap / std::log(p0 / p2);
    est.kt_pev = scale.to_pev(est.kt_hhz);
    est.tag = est.kt_hhz < 0 ? KtEstimate::Tag::negative : KtEstimate::Tag::finite;
    return est;
}

// ---------------------------------------------------------------------------
// Monte Carlo error propagation through the full reconstruction.
// ---------------------------------------------------------------------------

struct BinStat {
    double w_hhz = 0;
    double mean = 0;
    double stddev = 0;
    int count = 0;
};

namespace detail {
struct Welford {
    long n = 0;
    double mean = 0, m2 = 0;
    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
    double stddev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};
}  // namespace detail

struct UncertaintyTable {
    double sigma = 0;
    int trials = 0;
    int failed_trials = 0;  // trials whose projection did not certify convergence
    std::uint64_t master_seed = 0;
    std::string tag;
    std::vector<double> kt_pev;      // temperatures, dataset order
    std::vector<double> w_support;   // canonical work bins (h*Hz)
    // Entry-wise statistics of the reconstructed matrices, present directions only.
    std::optional<Eigen::Matrix4d> entry_mean_forward, entry_std_forward;
    std::optional<Eigen::Matrix4d> entry_mean_backward, entry_std_backward;
    // [temperature][bin]
    std::vector<std::vector<BinStat>> prob_forward, prob_backward, ln_ratio;

    // Scatter of the log-ratio at a work bin, usable as a fit weight when the
    // bin was populated often enough.
    std::optional<double> sigma_for(std::size_t kt_index, double w_hhz, int min_count,
                                    double bin_tol = 1e-9) const {
        if (kt_index >= ln_ratio.size()) return std::nullopt;
        for (const BinStat &bs : ln_ratio[kt_index])
            if (std::abs(bs.w_hhz - w_hhz) <= bin_tol) {
                if (bs.count < min_count || !(bs.stddev > 0)) return std::nullopt;
                return bs.stddev;
            }
        return std::nullopt;
    }
};

// All pairwise final-minus-initial level energies, merged within bin_tol: the
// fixed support every trial's work distribution lands on.
inline std::vector<double> work_support(const SpectrumTable &table, double bin_tol = 1e-9) {
    std::vector<double> diffs;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) diffs.push_back(table.energies_hhz[m] - table.energies_hhz[n]);
    std::sort(diffs.begin(), diffs.end());
    std::vector<double> out;
    for (double d : diffs)
        if (out.empty() || d - out.back() > bin_tol) out.push_back(d);
    return out;
}

// Repeats noise -> inversion -> work statistics over seeded trials and
// tabulates the scatter of everything downstream. Trials whose projection
// fails to certify convergence are counted and skipped, never mixed in.
inline UncertaintyTable propagate_errors(const Dataset &noiseless, const SpectrumTable &table,
                                         double sigma, int trials, std::uint64_t master_seed,
                                         const std::string &tag = "sigma-table",
                                         const InversionOptions &opts = {}) {
    if (trials < 2) throw validation_error("propagate_errors: need at least 2 trials");
    if (!(sigma >= 0)) throw validation_error("propagate_errors: sigma must be >= 0");

    bool has_fwd = false, has_bwd = false;
    for (const auto &r : noiseless.records) (r.direction == Direction::forward ? has_fwd : has_bwd) = true;
    if (!has_fwd && !has_bwd) throw validation_error("propagate_errors: empty dataset");

    UncertaintyTable tab;
    tab.sigma = sigma;
    tab.trials = trials;
    tab.master_seed = master_seed;
    tab.tag = tag;
    tab.w_support = work_support(table);
    std::vector<const PopulationVector *> pops_f, pops_b;
    for (const auto &blk : noiseless.populations)
        (blk.direction == Direction::forward ? pops_f : pops_b).push_back(&blk.pops);
    const auto &kt_source = has_fwd ? pops_f : pops_b;
    for (const auto *p : kt_source) tab.kt_pev.push_back(p->kt_pev);

    const std::size_t nk = tab.kt_pev.size(), nw = tab.w_support.size();
    std::vector<std::vector<detail::Welford>> acc_pf(nk, std::vector<detail::Welford>(nw)), acc_pb = acc_pf,
        acc_lr = acc_pf;
    std::array<Eigen::Matrix4d, 2> esum = {Eigen::Matrix4d::Zero(), Eigen::Matrix4d::Zero()};
    std::array<Eigen::Matrix4d, 2> esq = esum;
    int used = 0;

    auto bin_index = [&](double w) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < nw; ++i)
            if (std::abs(tab.w_support[i] - w) <= 1e-9) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };

    for (int t = 0; t < trials; ++t) {
        const Dataset noisy = add_noise(noiseless, sigma, derive_seed(master_seed, tag, t));
        std::optional<InversionReport> rf, rb;
        try {
            if (has_fwd) rf = invert_pipeline(noisy, table, Direction::forward, opts);
            if (has_bwd) rb = invert_pipeline(noisy, table, Direction::backward, opts);
        } catch (const numerical_error &) {
            ++tab.failed_trials;
            continue;
        }
        if ((rf && !rf->mle.converged) || (rb && !rb->mle.converged)) {
            ++tab.failed_trials;
            continue;
        }
        ++used;
        if (rf) {
            esum[0] += rf->mle.projected;
            esq[0] += rf->mle.projected.cwiseProduct(rf->mle.projected);
        }
        if (rb) {
            esum[1] += rb->mle.projected;
            esq[1] += rb->mle.projected.cwiseProduct(rb->mle.projected);
        }
        for (std::size_t k = 0; k < nk; ++k) {
            std::optional<WorkDistribution> df, db;
            if (rf) {
                df = work_distribution(*pops_f[k], rf->reconstructed(), table);
                for (const auto &[w, p] : df->mass)
                    if (auto i = bin_index(w); i >= 0) acc_pf[k][static_cast<std::size_t>(i)].add(p);
            }
            if (rb) {
                const PopulationVector &pb = k < pops_b.size() ? *pops_b[k] : *pops_f[k];
                db = work_distribution(pb, rb->reconstructed(), table);
                for (const auto &[w, p] : db->mass)
                    if (auto i = bin_index(w); i >= 0) acc_pb[k][static_cast<std::size_t>(i)].add(p);
            }
            if (df && db) {
                for (const auto &[w, lr] : crooks_points(*df, *db, kRatioMassFloor).points)
                    if (auto i = bin_index(w); i >= 0) acc_lr[k][static_cast<std::size_t>(i)].add(lr);
            }
        }
    }
    if (used < 2)
        throw numerical_error("propagate_errors: fewer than 2 usable trials (" +
                              std::to_string(tab.failed_trials) + " failed)");

    auto finalize = [&](const std::vector<std::vector<detail::Welford>> &acc) {
        std::vector<std::vector<BinStat>> out(nk);
        for (std::size_t k = 0; k < nk; ++k)
            for (std::size_t i = 0; i < nw; ++i) {
                const auto &w = acc[k][i];
                if (w.n > 0)
                    out[k].push_back({tab.w_support[i], w.mean, w.stddev(), static_cast<int>(w.n)});
            }
        return out;
    };
    if (has_fwd) tab.prob_forward = finalize(acc_pf);
    if (has_bwd) tab.prob_backward = finalize(acc_pb);
    if (has_fwd && has_bwd) tab.ln_ratio = finalize(acc_lr);

    auto moments = [&](int d) {
        Eigen::Matrix4d mean = esum[d] / used;
        Eigen::Matrix4d var = (esq[d] - used * mean.cwiseProduct(mean)) / (used - 1);
        return std::pair{mean, var.cwiseMax(0.0).cwiseSqrt().eval()};
    };
    if (has_fwd) std::tie(tab.entry_mean_forward, tab.entry_std_forward) = moments(0);
    if (has_bwd) std::tie(tab.entry_mean_backward, tab.entry_std_backward) = moments(1);
    return tab;
}

// Fit-ready points for one temperature: Crooks log-ratios of a reconstructed
// pair, weighted by the Monte Carlo scatter at each work bin. Bins the table
// saw in fewer than min_count trials carry no usable weight and are dropped.
inline std::vector<RatioPoint> ratio_points_with_sigma(const CrooksPoints &cp,
                                                       const UncertaintyTable &table,
                                                       std::size_t kt_index, const EnergyScale &scale = {},
                                                       int min_count = 2) {
    std::vector<RatioPoint> pts;
    for (const auto &[w, lr] : cp.points)
        if (auto s = table.sigma_for(kt_index, w, min_count)) pts.push_back({scale.to_pev(w), lr, *s});
    return pts;
}

}  // namespace workrecon
