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

#include <optional>
#include <set>
#include <vector>

#include "workrecon/pulses.hpp"
#include "workrecon/stats.hpp"

namespace workrecon {

// Everything a run needs, with the experiment's nominal values as defaults.
struct RunConfig {
    HamiltonianSpec hamiltonian;
    ProtocolAngles angles;
    std::optional<std::vector<PulseStep>> custom_steps;  // replaces the angle-built sequence
    std::vector<double> temperatures_pev{20.0, 12.0, 9.0};
    double sigma = 0.05;
    std::uint64_t master_seed = 1;
    int trials = 1000;
    double mle_tol = 1e-6;
    int mle_max_iter = 1000;
    bool forward = true;
    bool backward = true;
    // Rerun with the spin-spin coupling switched off (same pulse timings) to
    // contrast against the interacting work statistics.
    bool j_zero = false;
    std::optional<double> scale_pev_per_hhz;

    EnergyScale scale() const {
        EnergyScale s;
        if (scale_pev_per_hhz) s.pev_per_hhz = *scale_pev_per_hhz;
        return s;
    }

    MleOptions mle_options() const {
        MleOptions o;
        o.tol = mle_tol;
        o.max_iter = mle_max_iter;
        return o;
    }

    InversionOptions inversion_options() const { return InversionOptions{mle_options(), false}; }

    void validate(bool inversion_requested) const {
        hamiltonian.validate();
        if (!custom_steps) angles.validate();
        if (temperatures_pev.empty()) throw validation_error("config: at least one temperature required");
        for (double t : temperatures_pev)
            if (!(t > 0)) throw validation_error("config: temperatures must be positive (peV)");
        if (inversion_requested) {
            std::set<double> uniq(temperatures_pev.begin(), temperatures_pev.end());
            if (uniq.size() < 3)
                throw validation_error("config: inversion needs at least 3 distinct temperatures");
        }
        if (!(sigma >= 0)) throw validation_error("config: sigma must be >= 0");
        if (trials < 0) throw validation_error("config: trials must be >= 0");
        if (!(mle_tol > 0) || mle_max_iter < 1)
            throw validation_error("config: MLE tolerance and iteration cap must be positive");
        if (!forward && !backward) throw validation_error("config: empty direction set");
        if (scale_pev_per_hhz && !(*scale_pev_per_hhz > 0))
            throw validation_error("config: energy-scale override must be positive");
    }
};

// A fully instantiated run: spectrum, drive unitaries, oracle matrices,
// preparations and the noiseless forward model.
struct Scenario {
    RunConfig config;
    EnergyScale scale;
    HamiltonianSpec dynamics;  // coupling zeroed when the toggle is on
    SpectrumTable table;
    std::vector<PulseStep> steps;
    CMat u_forward, u_backward;
    TransitionMatrix oracle_forward, oracle_backward;
    std::vector<PopulationVector> pops;  // one per temperature
    Dataset noiseless;
};

inline Scenario make_scenario(const RunConfig &config) {
    config.validate(false);
    Scenario sc;
    sc.config = config;
    sc.scale = config.scale();
    sc.dynamics = config.hamiltonian;
    if (config.j_zero) sc.dynamics.j_coupling = 0.0;
    sc.table = spectrum(sc.dynamics);
    // Pulse timings always come from the nominal coupling: the comparison run
    // changes the dynamics, not the sequence.
    sc.steps = config.custom_steps ? *config.custom_steps
                                   : forward_steps(config.angles, config.hamiltonian.j_coupling);
    sc.u_forward = build_from_steps(sc.steps, sc.dynamics.j_coupling);
    sc.u_backward = build_adjoint_from_steps(sc.steps, sc.dynamics.j_coupling);
    sc.oracle_forward = transition_matrix(sc.u_forward, sc.table, Direction::forward);
    sc.oracle_backward = transition_matrix(sc.u_backward, sc.table, Direction::backward);
    for (double kt : config.temperatures_pev)
        sc.pops.push_back(gibbs_populations(sc.table, kt, KtUnit::pev, sc.scale));
    if (config.forward)
        sc.noiseless.append(simulate_observables(sc.u_forward, sc.pops, sc.table, Direction::forward));
    if (config.backward)
        sc.noiseless.append(simulate_observables(sc.u_backward, sc.pops, sc.table, Direction::backward));
    return sc;
}

// The dataset a simulate run writes: the forward model plus, when sigma is
// nonzero, one seeded draw of measurement noise (trial 0 of the master seed).
inline Dataset simulated_dataset(const Scenario &sc) {
    if (sc.config.sigma == 0) return sc.noiseless;
    return add_noise(sc.noiseless, sc.config.sigma, derive_seed(sc.config.master_seed, "noise", 0));
}

}  // namespace workrecon
