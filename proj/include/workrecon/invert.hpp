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

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "workrecon/measure.hpp"

namespace workrecon {

// ---------------------------------------------------------------------------
// Reduced linear system for the nine free transition probabilities.
//
// With bistochasticity eliminating the last row and column, the mean of a
// diagonal observable o after preparation p is affine in the unknowns
// x_{mn} = p_{m|n} (m, n in 0..2):
//
//   <O> = o_3 + p_3 * sum_m (o_m - o_3) + sum_{m,n} (o_m - o_3)(p_n - p_3) x_{mn}
//
// Unknown (m, n) maps to column 3 m + n.
// ---------------------------------------------------------------------------

struct SystemRow {
    Observable observable = Observable::sigma_z_h;
    double kt_pev = 0;
};

struct LinearSystem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    std::vector<SystemRow> rows;
    std::vector<int> uninformative_rows;  // vanishing coefficients (uniform preparation)

    static std::string unknown_name(int col) {
        return "p(" + std::to_string(col / 3 + 1) + "|" + std::to_string(col % 3 + 1) + ")";
    }
};

inline LinearSystem build_system(const Dataset &ds, const SpectrumTable &table, Direction direction) {
    const auto diag = observable_diagonals(table);
    std::vector<const ObservableRecord *> recs;
    for (const auto &r : ds.records)
        if (r.direction == direction) recs.push_back(&r);
    if (recs.empty())
        throw validation_error(std::string("build_system: no records for direction ") +
                               to_string(direction));

    LinearSystem sys;
    sys.a.resize(static_cast<Eigen::Index>(recs.size()), 9);
    sys.b.resize(static_cast<Eigen::Index>(recs.size()));
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const ObservableRecord &r = *recs[k];
        r.validate();
        const PopulationVector *pops = ds.find_populations(direction, r.kt_pev);
        if (!pops) {
            std::ostringstream msg;
            msg << "build_system: no preparation populations for direction " << to_string(direction)
                << " at kT = " << r.kt_pev << " peV";
            throw validation_error(msg.str());
        }
        const RVec4 &o = diag.at(r.observable);
        const RVec4 &p = pops->p;
        double rowmax = 0;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                const double c = (o[m] - o[3]) * (p[n] - p[3]);
                sys.a(static_cast<Eigen::Index>(k), 3 * m + n) = c;
                rowmax = std::max(rowmax, std::abs(c));
            }
        double off = o[3];
        for (int m = 0; m < 3; ++m) off += p[3] * (o[m] - o[3]);
        sys.b[static_cast<Eigen::Index>(k)] = r.mean - off;
        sys.rows.push_back({r.observable, r.kt_pev});
        if (rowmax < 1e-15) sys.uninformative_rows.push_back(static_cast<int>(k));
    }
    return sys;
}

struct SolveDiagnostics {
    double condition_number = 0;
    int rank = 0;
    bool rank_deficient = false;
    bool cond_warning = false;  // condition number above 1e8
    double residual_norm = 0;
    std::string note;
};

// Least-squares solution of the reduced system. Rank deficiency names the
// unresolved probabilities; opting in to allow_rank_deficient returns the
// minimum-norm solution instead of throwing.
inline std::pair<Eigen::VectorXd, SolveDiagnostics> solve_least_squares(const LinearSystem &sys,
                                                                        bool allow_rank_deficient = false) {
    if (sys.a.rows() < 9)
        throw validation_error("solve_least_squares: under-determined system (" +
                               std::to_string(sys.a.rows()) + " equations for 9 unknowns)");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();

    SolveDiagnostics diag;
    diag.rank = static_cast<int>(cod.rank());
    diag.condition_number = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1]
                                                  : std::numeric_limits<double>::infinity();
    diag.cond_warning = diag.condition_number > 1e8;
    diag.rank_deficient = diag.rank < 9;

    if (diag.rank_deficient) {
        std::ostringstream msg;
        msg << "rank-deficient system (rank " << diag.rank << " of 9); unresolved directions dominated by";
        const Eigen::MatrixXd v = svd.matrixV();
        for (int c = diag.rank; c < 9; ++c) {
            int imax = 0;
            v.col(c).cwiseAbs().maxCoeff(&imax);
            msg << " " << LinearSystem::unknown_name(imax);
        }
        diag.note = msg.str();
        if (!allow_rank_deficient) throw validation_error("solve_least_squares: " + diag.note);
    }
    if (diag.cond_warning) {
        if (!diag.note.empty()) diag.note += "; ";
        diag.note += "condition number above 1e8";
    }

    Eigen::VectorXd x = cod.solve(sys.b);
    diag.residual_norm = (sys.a * x - sys.b).norm();
    return {x, diag};
}

// Fill in the eliminated row and column from bistochasticity.
inline Eigen::MatrixXd complete_matrix(const Eigen::VectorXd &x) {
    if (x.size() != 9) throw validation_error("complete_matrix: expected 9 unknowns");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) p(m, n) = x[3 * m + n];
    for (int m = 0; m < 3; ++m) p(m, 3) = 1.0 - p.row(m).head(3).sum();
    for (int n = 0; n < 4; ++n) p(3, n) = 1.0 - p.col(n).head(3).sum();
    return p;
}

// ---------------------------------------------------------------------------
// Sinkhorn-Knopp balancing and the alternating-projection MLE.
// ---------------------------------------------------------------------------

struct SinkhornResult {
    Eigen::MatrixXd matrix;
    int iterations = 0;
    bool converged = false;
};

namespace detail {
inline double bistochastic_deviation(const Eigen::MatrixXd &m) {
    double dev = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) dev = std::max(dev, std::abs(m.row(i).sum() - 1.0));
    for (Eigen::Index j = 0; j < m.cols(); ++j) dev = std::max(dev, std::abs(m.col(j).sum() - 1.0));
    return dev;
}
}  // namespace detail

// Alternating row/column normalization. Entries are floored at floor_eps so
// matrices with exact zeros (permutation-like) remain balanceable; a whole row
// or column at or below the floor has no mass to balance and is an error.
inline SinkhornResult sinkhorn(const Eigen::MatrixXd &m_in, double tol = 1e-10, int max_iter = 100000,
                               double floor_eps = 1e-12) {
    if (m_in.rows() != m_in.cols() || m_in.rows() == 0)
        throw validation_error("sinkhorn: matrix must be square and non-empty");
    if (!m_in.allFinite()) throw validation_error("sinkhorn: matrix must be finite");
    if (!(tol > 0) || max_iter < 1 || !(floor_eps > 0))
        throw validation_error("sinkhorn: tol, max_iter and floor must be positive");

    for (Eigen::Index i = 0; i < m_in.rows(); ++i)
        if (m_in.row(i).maxCoeff() <= floor_eps)
            throw numerical_error("sinkhorn: unbalanceable matrix (row " + std::to_string(i) +
                                  " has no entries above the floor)");
    for (Eigen::Index j = 0; j < m_in.cols(); ++j)
        if (m_in.col(j).maxCoeff() <= floor_eps)
            throw numerical_error("sinkhorn: unbalanceable matrix (column " + std::to_string(j) +
                                  " has no entries above the floor)");

    Eigen::MatrixXd m = m_in.cwiseMax(floor_eps);
    const Eigen::Index n = m.rows();
    if (n == 4) {
        // Unrolled path for the 4x4 case: near-reducible clamped matrices can
        // need 1e5..1e6 sweeps, so the inner loop must stay allocation-free.
        double *d = m.data();  // column-major
        for (int it = 1; it <= max_iter; ++it) {
            for (int i = 0; i < 4; ++i) {
                const double r = 1.0 / (d[i] + d[i + 4] + d[i + 8] + d[i + 12]);
                d[i] *= r;
                d[i + 4] *= r;
                d[i + 8] *= r;
                d[i + 12] *= r;
            }
            for (int j = 0; j < 4; ++j) {
                double *c = d + 4 * j;
                const double r = 1.0 / (c[0] + c[1] + c[2] + c[3]);
                c[0] *= r;
                c[1] *= r;
                c[2] *= r;
                c[3] *= r;
            }
            double dev = 0;
            for (int i = 0; i < 4; ++i)
                dev = std::max(dev, std::abs(d[i] + d[i + 4] + d[i + 8] + d[i + 12] - 1.0));
            for (int j = 0; j < 4; ++j) {
                const double *c = d + 4 * j;
                dev = std::max(dev, std::abs(c[0] + c[1] + c[2] + c[3] - 1.0));
            }
            if (dev < tol) return {std::move(m), it, true};
        }
        return {std::move(m), max_iter, false};
    }
    for (int it = 1; it <= max_iter; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
        for (Eigen::Index j = 0; j < n; ++j) m.col(j) /= m.col(j).sum();
        if (detail::bistochastic_deviation(m) < tol) return {std::move(m), it, true};
    }
    return {std::move(m), max_iter, false};
}

struct MleOptions {
    double tol = 1e-6;
    int max_iter = 1000;
    // The inner balancing only has to beat the outer tolerance; near-reducible
    // clamped matrices approach their balance like 1/sweeps, so a 1e-10 inner
    // target would be unreachable while 3e-7 is cheap and leaves margin.
    double inner_tol = 3e-7;
    int inner_max_iter = 2000000;
    double floor_eps = 1e-12;

    void validate() const {
        if (!(tol > 0) || max_iter < 1 || !(inner_tol > 0) || inner_max_iter < 1 || !(floor_eps > 0))
            throw validation_error("MleOptions: tolerances and iteration caps must be positive");
    }
};

struct MleResult {
    Eigen::MatrixXd projected;
    int iterations = 0;
    double final_change = 0;
    bool converged = false;
    bool inner_exhausted = false;  // some balancing call hit its iteration cap
    double bistochastic_dev = 0;
    std::vector<std::pair<int, int>> clamped;  // raw entries outside [0,1]
};

// Alternating projections: clamp to the unit box (the closed-form likelihood
// step), then Sinkhorn-balance; stop when successive iterates agree within
// tol. The converged flag additionally certifies that the output actually
// satisfies both constraint sets within tol; it is never silently partial.
inline MleResult mle_project(const Eigen::MatrixXd &raw, const MleOptions &opts = {}) {
    opts.validate();
    if (raw.rows() != raw.cols() || raw.rows() == 0)
        throw validation_error("mle_project: matrix must be square and non-empty");
    if (!raw.allFinite()) throw validation_error("mle_project: raw matrix must be finite");

    MleResult res;
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < raw.cols(); ++j)
            if (raw(i, j) < 0.0 || raw(i, j) > 1.0)
                res.clamped.emplace_back(static_cast<int>(i), static_cast<int>(j));

    Eigen::MatrixXd x = raw;
    bool outer_ok = false;
    int it = 0;
    double change = std::numeric_limits<double>::infinity();
    for (it = 1; it <= opts.max_iter; ++it) {
        const Eigen::MatrixXd c = x.cwiseMax(0.0).cwiseMin(1.0);
        SinkhornResult s = sinkhorn(c, opts.inner_tol, opts.inner_max_iter, opts.floor_eps);
        res.inner_exhausted = res.inner_exhausted || !s.converged;
        change = (s.matrix - x).cwiseAbs().maxCoeff();
        x = std::move(s.matrix);
        if (change < opts.tol) {
            outer_ok = true;
            break;
        }
    }
    res.projected = std::move(x);
    res.iterations = std::min(it, opts.max_iter);
    res.final_change = change;
    res.bistochastic_dev = detail::bistochastic_deviation(res.projected);
    const double box_dev = std::max(0.0, std::max(-res.projected.minCoeff(), res.projected.maxCoeff() - 1.0));
    res.converged = outer_ok && res.bistochastic_dev <= opts.tol && box_dev <= opts.tol;
    return res;
}

// ---------------------------------------------------------------------------
// End-to-end inversion: observed means -> physical transition matrix.
// ---------------------------------------------------------------------------

struct InversionOptions {
    MleOptions mle;
    bool allow_rank_deficient = false;
};

struct InversionReport {
    Direction direction = Direction::forward;
    LinearSystem system;
    Eigen::VectorXd x;
    SolveDiagnostics solve;
    Eigen::MatrixXd raw;  // completed least-squares matrix, possibly unphysical
    MleResult mle;

    TransitionMatrix reconstructed() const {
        return TransitionMatrix{mle.projected, direction, Provenance::reconstructed};
    }
};

inline InversionReport invert_pipeline(const Dataset &ds, const SpectrumTable &table, Direction direction,
                                       const InversionOptions &opts = {}) {
    InversionReport rep;
    rep.direction = direction;
    rep.system = build_system(ds, table, direction);
    std::tie(rep.x, rep.solve) = solve_least_squares(rep.system, opts.allow_rank_deficient);
    rep.raw = complete_matrix(rep.x);
    rep.mle = mle_project(rep.raw, opts.mle);
    return rep;
}

}  // namespace workrecon
