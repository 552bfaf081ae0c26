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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "workrecon/rng.hpp"
#include "workrecon/tpm.hpp"

namespace workrecon {

// The three end-of-protocol readouts. All commute with the final Hamiltonian,
// which is what makes the mean-value decomposition over transition
// probabilities exact.
enum class Observable { sigma_z_h, sigma_z_c, sigma_zz };

inline const char *to_string(Observable o) {
    switch (o) {
        case Observable::sigma_z_h: return "sigma_z_H";
        case Observable::sigma_z_c: return "sigma_z_C";
        default: return "sigma_zz";
    }
}

inline Observable observable_from_string(const std::string &s) {
    if (s == "sigma_z_H") return Observable::sigma_z_h;
    if (s == "sigma_z_C") return Observable::sigma_z_c;
    if (s == "sigma_zz") return Observable::sigma_zz;
    throw validation_error("unknown observable '" + s + "'");
}

inline constexpr std::array<Observable, 3> kObservables{Observable::sigma_z_h, Observable::sigma_z_c,
                                                        Observable::sigma_zz};

// Eigenvalues of each observable reindexed by the energy-ascending ordering:
// the o_m coefficients of the mean-value decomposition.
inline std::map<Observable, RVec4> observable_diagonals(const SpectrumTable &table) {
    RVec4 oh, oc;
    for (int m = 0; m < 4; ++m) {
        oh[m] = table.labels[m].sz_h;
        oc[m] = table.labels[m].sz_c;
    }
    return {{Observable::sigma_z_h, oh},
            {Observable::sigma_z_c, oc},
            {Observable::sigma_zz, oh.cwiseProduct(oc)}};
}

// One measured or simulated mean value.
struct ObservableRecord {
    Observable observable = Observable::sigma_z_h;
    Direction direction = Direction::forward;
    double kt_pev = 0;
    double mean = 0;
    double stderr_ = 0;

    void validate() const {
        if (!(stderr_ >= 0)) throw validation_error("ObservableRecord: stderr must be >= 0");
        if (!(kt_pev > 0)) throw validation_error("ObservableRecord: kT must be > 0");
        if (!std::isfinite(mean)) throw validation_error("ObservableRecord: mean must be finite");
    }
};

enum class DataOrigin { simulated, ingested };

inline const char *to_string(DataOrigin o) { return o == DataOrigin::simulated ? "simulated" : "ingested"; }

struct PopulationBlock {
    Direction direction = Direction::forward;
    PopulationVector pops;
};

// A full measurement campaign: mean values plus the certified preparation
// populations per (direction, temperature). Each direction keeps its own
// preparations, mirroring separately prepared initial states.
struct Dataset {
    std::vector<ObservableRecord> records;
    std::vector<PopulationBlock> populations;
    DataOrigin origin = DataOrigin::simulated;
    std::optional<std::uint64_t> noise_seed;

    const PopulationVector *find_populations(Direction d, double kt_pev) const {
        for (const auto &blk : populations) {
            if (blk.direction != d) continue;
            const double ref = blk.pops.kt_pev;
            if (ref == kt_pev) return &blk.pops;
            if (std::isfinite(ref) && std::isfinite(kt_pev) &&
                std::abs(ref - kt_pev) <= 1e-9 * std::max(std::abs(ref), std::abs(kt_pev)))
                return &blk.pops;
        }
        return nullptr;
    }

    void append(const Dataset &other) {
        records.insert(records.end(), other.records.begin(), other.records.end());
        populations.insert(populations.end(), other.populations.begin(), other.populations.end());
    }

    void validate() const {
        std::vector<std::tuple<int, int, double>> seen;
        for (const auto &r : records) {
            r.validate();
            std::tuple<int, int, double> key{static_cast<int>(r.observable), static_cast<int>(r.direction),
                                             r.kt_pev};
            for (const auto &k : seen)
                if (k == key)
                    throw validation_error(std::string("Dataset: duplicate record for ") +
                                           to_string(r.observable) + "/" + to_string(r.direction));
            seen.push_back(key);
        }
        for (const auto &blk : populations) blk.pops.validate();
    }
};

namespace detail {
inline RVec4 diagonal_in_sorted_basis(const CMat &obs, const SpectrumTable &table) {
    if (obs.rows() != 4 || obs.cols() != 4)
        throw validation_error("simulate_observables: observable must be 4x4");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j && std::abs(obs(i, j)) > 1e-12)
                throw validation_error(
                    "simulate_observables: observable does not commute with the final Hamiltonian "
                    "(must be diagonal in its eigenbasis)");
    const auto comp = table.computational_index();
    RVec4 o;
    for (int m = 0; m < 4; ++m) {
        const std::complex<double> d = obs(comp[m], comp[m]);
        if (std::abs(d.imag()) > 1e-12)
            throw validation_error("simulate_observables: observable diagonal must be real");
        o[m] = d.real();
    }
    return o;
}
}  // namespace detail

// Mean of a diagonal observable after the drive: sum_m o_m sum_n p_{m|n} p_n.
inline double simulate_mean(const TransitionMatrix &t, const PopulationVector &pops, const RVec4 &o) {
    return o.dot(t.p * pops.p);
}

// Mean of an arbitrary (but necessarily diagonal) observable supplied as a
// matrix in the computational basis.
inline double simulate_mean(const CMat &u, const PopulationVector &pops, const SpectrumTable &table,
                            const CMat &obs) {
    const RVec4 o = detail::diagonal_in_sorted_basis(obs, table);
    return simulate_mean(transition_matrix(u, table), pops, o);
}

// The forward model of a measurement campaign: all three built-in observables
// at every supplied temperature, noiseless (stderr 0).
inline Dataset simulate_observables(const CMat &u, const std::vector<PopulationVector> &pops_by_kt,
                                    const SpectrumTable &table, Direction direction) {
    const TransitionMatrix t = transition_matrix(u, table, direction);
    const auto diag = observable_diagonals(table);
    Dataset ds;
    ds.origin = DataOrigin::simulated;
    for (const PopulationVector &pops : pops_by_kt) {
        pops.validate();
        ds.populations.push_back({direction, pops});
        for (Observable obs : kObservables)
            ds.records.push_back({obs, direction, pops.kt_pev, simulate_mean(t, pops, diag.at(obs)), 0.0});
    }
    return ds;
}

// Independent additive Gaussian noise on every mean, in record order, from one
// seeded stream; stderr is set to sigma. Populations are never perturbed.
inline Dataset add_noise(const Dataset &ds, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0)) throw validation_error("add_noise: sigma must be >= 0");
    Dataset out = ds;
    GaussianStream g(seed);
    for (auto &r : out.records) {
        r.mean += sigma * g();
        r.stderr_ = sigma;
    }
    out.noise_seed = seed;
    return out;
}

}  // namespace workrecon
