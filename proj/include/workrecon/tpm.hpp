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

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "workrecon/hilbert.hpp"

namespace workrecon {

enum class Direction { forward, backward };
enum class Provenance { oracle, reconstructed };

inline const char *to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }
inline const char *to_string(Provenance p) { return p == Provenance::oracle ? "oracle" : "reconstructed"; }

// p[m][n] = probability that the drive carries sorted eigenstate n to sorted
// eigenstate m. Bi-stochastic: every row and column sums to 1. Oracle outputs
// are held to 1e-9; reconstructions to the looser projection tolerance.
struct TransitionMatrix {
    Eigen::MatrixXd p;
    Direction direction = Direction::forward;
    Provenance provenance = Provenance::oracle;

    double bistochastic_tolerance() const { return provenance == Provenance::oracle ? 1e-9 : 1e-6; }

    void validate() const {
        const double tol = bistochastic_tolerance();
        if (p.rows() != p.cols()) throw validation_error("TransitionMatrix: must be square");
        if (((p.array() < -tol) || (p.array() > 1.0 + tol)).any())
            throw validation_error("TransitionMatrix: entries must lie in [0,1]");
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            if (std::abs(p.row(i).sum() - 1.0) > tol)
                throw validation_error("TransitionMatrix: row sums must equal 1");
            if (std::abs(p.col(i).sum() - 1.0) > tol)
                throw validation_error("TransitionMatrix: column sums must equal 1");
        }
    }
};

// Exact transition probabilities |<m|U|n>|^2 between sorted eigenstates. The
// initial and final Hamiltonians coincide, so one spectrum table serves both
// endpoints.
inline TransitionMatrix transition_matrix(const CMat &u, const SpectrumTable &table,
                                          Direction direction = Direction::forward) {
    if (u.rows() != 4 || u.cols() != 4)
        throw validation_error("transition_matrix: expected a 4x4 unitary");
    if ((u.adjoint() * u - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-10)
        throw validation_error("transition_matrix: input is not unitary within 1e-10");
    const std::array<int, 4> comp = table.computational_index();
    TransitionMatrix t;
    t.p.resize(4, 4);
    t.direction = direction;
    t.provenance = Provenance::oracle;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            t.p(m, n) = std::norm(u(comp[m], comp[n]));
    return t;
}

// P(W): mass at each work value W = e_m - e_n (h*Hz). Nearby work values are
// merged within a binning tolerance so degenerate user spectra aggregate
// instead of producing duplicate support points.
struct WorkDistribution {
    std::vector<std::pair<double, double>> mass;  // (W in h*Hz, probability), W ascending
    Direction direction = Direction::forward;
    double kt_hhz = std::numeric_limits<double>::quiet_NaN();
    double kt_pev = std::numeric_limits<double>::quiet_NaN();
    double bin_tol_hhz = 1e-9;

    double total() const {
        double s = 0;
        for (auto &[w, p] : mass) s += p;
        return s;
    }
};

inline WorkDistribution work_distribution(const PopulationVector &pops, const TransitionMatrix &t,
                                          const SpectrumTable &table, double bin_tol_hhz = 1e-9) {
    pops.validate();
    t.validate();
    std::vector<std::pair<double, double>> raw;
    raw.reserve(16);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            raw.emplace_back(table.energies_hhz[m] - table.energies_hhz[n], pops.p[n] * t.p(m, n));
    std::sort(raw.begin(), raw.end());
    WorkDistribution out;
    out.direction = t.direction;
    out.kt_hhz = pops.kt_hhz;
    out.kt_pev = pops.kt_pev;
    out.bin_tol_hhz = bin_tol_hhz;
    for (const auto &[w, p] : raw) {
        if (!out.mass.empty() && w - out.mass.back().first <= bin_tol_hhz)
            out.mass.back().second += p;
        else
            out.mass.emplace_back(w, p);
    }
    return out;
}

inline double mean_work(const WorkDistribution &w) {
    double s = 0;
    for (auto &[wv, p] : w.mass) s += wv * p;
    return s;
}

// <exp(-W/kT)>. Equals 1 for any bi-stochastic drive evaluated at the
// preparation temperature; deviates generically at any other temperature.
inline double jarzynski_functional(const WorkDistribution &w, double kt_hhz) {
    if (!(kt_hhz > 0)) throw validation_error("jarzynski_functional: kT must be > 0");
    double s = 0;
    for (auto &[wv, p] : w.mass) s += p * std::exp(-wv / kt_hhz);
    return s;
}

// The detailed-relation scatter: (W, ln[P_F(+W)/P_B(-W)]) wherever both masses
// are strictly positive. Forward support points whose backward partner is
// missing are reported, never silently dropped. A mass_floor above zero also
// routes near-empty bins (whose log-ratio is pure noise) to the unpaired list.
struct CrooksPoints {
    std::vector<std::pair<double, double>> points;  // (W in h*Hz, ln ratio)
    std::vector<double> unpaired_forward_w;
};

inline CrooksPoints crooks_points(const WorkDistribution &forward, const WorkDistribution &backward,
                                  double mass_floor = 0.0) {
    const double tol = std::max(forward.bin_tol_hhz, backward.bin_tol_hhz);
    CrooksPoints out;
    for (const auto &[w, pf] : forward.mass) {
        if (!(pf > mass_floor)) continue;
        double pb = 0;
        bool found = false;
        for (const auto &[wb, pbv] : backward.mass) {
            if (std::abs(wb + w) <= tol) {
                pb = pbv;
                found = found || pbv > mass_floor;
            }
        }
        if (found)
            out.points.emplace_back(w, std::log(pf / pb));
        else
            out.unpaired_forward_w.push_back(w);
    }
    return out;
}

}  // namespace workrecon
