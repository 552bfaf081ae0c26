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
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "workrecon/errors.hpp"

namespace workrecon {

using CMat = Eigen::MatrixXcd;
using RVec4 = Eigen::Vector4d;

// Internal energies are stored as frequencies nu in units of h*Hz; conversion
// to peV happens only at reporting boundaries. The default factor is Planck's
// constant, h = 4.135667696e-15 eV*s, i.e. 4.135667696e-3 peV per h*Hz. The
// factor is user-overridable because absolute calibrations of the same
// spectrum can disagree; overriding it rescales every reported energy and
// temperature consistently.
struct EnergyScale {
    double pev_per_hhz = 4.135667696e-3;

    double to_pev(double hhz) const { return hhz * pev_per_hhz; }
    double to_hhz(double pev) const { return pev / pev_per_hhz; }
};

// Two heteronuclear spin-1/2 nuclei in the doubly rotating frame: frequency
// offsets dnu_h, dnu_c and a weak scalar coupling j, all in Hz. The
// Hamiltonian is diagonal in the computational basis,
//   E(s_H, s_C) = -dnu_h*s_H/2 - dnu_c*s_C/2 + j*s_H*s_C/4   (h*Hz),
// with s = +1 for |up> and -1 for |down>.
struct HamiltonianSpec {
    double dnu_h = 2000.0;
    double dnu_c = 4000.0;
    double j_coupling = 215.1;

    void validate() const {
        if (!std::isfinite(dnu_h) || !std::isfinite(dnu_c) || !std::isfinite(j_coupling))
            throw validation_error("HamiltonianSpec: offsets and coupling must be finite");
        if (j_coupling < 0)
            throw validation_error("HamiltonianSpec: j_coupling must be >= 0");
    }
};

// One basis label: the pair of sigma_z eigenvalues (+1 up, -1 down).
struct BasisLabel {
    int sz_h = 1;
    int sz_c = 1;

    // Computational index 2*b_H + b_C with b = 0 for up.
    int computational_index() const { return 2 * (sz_h < 0) + (sz_c < 0); }

    std::string arrows() const {
        std::string s;
        s += (sz_h > 0) ? "↑" : "↓";
        s += (sz_c > 0) ? "↑" : "↓";
        return s;
    }
};

// Energy-ascending eigenbasis. The sorted index 0..3 is the index convention
// used by every downstream module (transition matrices, observables, work).
struct SpectrumTable {
    std::array<double, 4> energies_hhz{};  // ascending
    std::array<BasisLabel, 4> labels{};    // sorted index -> basis state

    // sorted index -> computational index, the permutation behind `labels`.
    std::array<int, 4> computational_index() const {
        std::array<int, 4> p{};
        for (int i = 0; i < 4; ++i) p[i] = labels[i].computational_index();
        return p;
    }
};

// Classical populations over the 4 sorted eigenstates, optionally tagged with
// the preparation temperature (stored in both units once a scale is known).
struct PopulationVector {
    RVec4 p = RVec4::Constant(0.25);
    double kt_hhz = std::numeric_limits<double>::quiet_NaN();
    double kt_pev = std::numeric_limits<double>::quiet_NaN();

    void validate(double tol = 1e-12) const {
        for (int i = 0; i < 4; ++i)
            if (!(p[i] >= 0.0 && p[i] <= 1.0))
                throw validation_error("PopulationVector: entries must lie in [0,1]");
        if (std::abs(p.sum() - 1.0) > tol)
            throw validation_error("PopulationVector: entries must sum to 1");
    }
};

inline CMat identity2() { return CMat::Identity(2, 2); }

inline CMat pauli(char axis) {
    CMat m(2, 2);
    switch (axis) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << std::complex<double>(0, 0), std::complex<double>(0, -1),
                       std::complex<double>(0, 1), std::complex<double>(0, 0); break;
        case 'z': m << 1, 0, 0, -1; break;
        default: throw validation_error(std::string("pauli: unknown axis '") + axis + "'");
    }
    return m;
}

// Kronecker product. Guarded at 64 dimensions: this library is for few-spin
// systems and silent explosions help nobody.
inline CMat tensor(const CMat &a, const CMat &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw validation_error("tensor: factors must be square");
    const Eigen::Index d = a.rows() * b.rows();
    if (d > 64)
        throw validation_error("tensor: resulting dimension exceeds 64");
    CMat out(d, d);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Diagonal energies of the two-spin Hamiltonian, sorted ascending with their
// basis labels. Ties (degenerate spectra) keep computational order.
inline SpectrumTable spectrum(const HamiltonianSpec &spec) {
    spec.validate();
    std::array<double, 4> e{};
    std::array<BasisLabel, 4> lab{};
    for (int b = 0; b < 4; ++b) {
        const int s_h = 1 - 2 * (b >> 1);
        const int s_c = 1 - 2 * (b & 1);
        e[b] = -0.5 * spec.dnu_h * s_h - 0.5 * spec.dnu_c * s_c + 0.25 * spec.j_coupling * s_h * s_c;
        lab[b] = BasisLabel{s_h, s_c};
    }
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return e[i] < e[j]; });
    SpectrumTable table;
    for (int i = 0; i < 4; ++i) {
        table.energies_hhz[i] = e[order[i]];
        table.labels[i] = lab[order[i]];
    }
    return table;
}

enum class KtUnit { pev, h_hz };

constexpr double kt_infinite = std::numeric_limits<double>::infinity();

// Gibbs populations p_n ~ exp(-e_n/kT) over the sorted eigenbasis. kT may be
// given in peV (converted through `scale`) or directly in h*Hz. kT = +inf is
// the uniform-state sentinel.
inline PopulationVector gibbs_populations(const SpectrumTable &table, double kt,
                                          KtUnit unit = KtUnit::pev,
                                          const EnergyScale &scale = {}) {
    if (std::isnan(kt) || kt <= 0.0)
        throw validation_error("gibbs_populations: kT must be > 0 (or +inf for uniform)");
    PopulationVector out;
    if (unit == KtUnit::pev) {
        out.kt_pev = kt;
        out.kt_hhz = std::isinf(kt) ? kt : scale.to_hhz(kt);
    } else {
        out.kt_hhz = kt;
        out.kt_pev = std::isinf(kt) ? kt : scale.to_pev(kt);
    }
    if (std::isinf(kt)) {
        out.p = RVec4::Constant(0.25);
        return out;
    }
    const double e0 = table.energies_hhz[0];
    RVec4 w;
    for (int i = 0; i < 4; ++i) w[i] = std::exp(-(table.energies_hhz[i] - e0) / out.kt_hhz);
    out.p = w / w.sum();
    return out;
}

namespace detail {
inline void require_hermitian(const CMat &m, const char *what, double tol = 1e-10) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
        std::ostringstream os;
        os << "expectation: " << what << " is not Hermitian within " << tol;
        throw validation_error(os.str());
    }
}
}  // namespace detail

// Tr[obs * state] for a Hermitian observable and a density matrix; the
// imaginary residue is checked, not discarded silently.
inline double expectation(const CMat &obs, const CMat &state) {
    if (obs.rows() != obs.cols() || state.rows() != state.cols() || obs.rows() != state.rows())
        throw validation_error("expectation: dimension mismatch");
    detail::require_hermitian(obs, "observable");
    detail::require_hermitian(state, "state");
    if (std::abs(state.trace().real() - 1.0) > 1e-10)
        throw validation_error("expectation: state must have unit trace");
    const std::complex<double> tr = (obs * state).trace();
    if (std::abs(tr.imag()) > 1e-9)
        throw numerical_error("expectation: trace has a non-negligible imaginary part");
    return tr.real();
}

}  // namespace workrecon
