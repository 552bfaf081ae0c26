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

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace workrecon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kJ = 215.1;

std::vector<PopulationVector> standard_pops() {
    const SpectrumTable &t = wrt::default_table();
    return {gibbs_populations(t, 20.0, KtUnit::pev), gibbs_populations(t, 12.0, KtUnit::pev),
            gibbs_populations(t, 9.0, KtUnit::pev)};
}

const double kNoiselessForward[9] = {
    0.13141928088573862, -0.06166771788252362, -0.16148276537453332,
    0.22092070470817207, -0.11017134084492194, -0.23850603815939866,
    0.2874274903756053,  -0.1509375793886022,  -0.2842616864478667};

const double kNoiselessBackward[9] = {
    -0.114586645670671,   0.03516451511205465,  0.00439713844368117,
    -0.19126114071417652, 0.03385922894039933,  0.02286066472613829,
    -0.24768641027065177, 0.025077106409692573, 0.045076674285725316};
}  // namespace

TEST_CASE("observable diagonals follow the sorted level order", "[measure]") {
    const auto diag = observable_diagonals(wrt::default_table());
    const RVec4 oh = diag.at(Observable::sigma_z_h);
    const RVec4 oc = diag.at(Observable::sigma_z_c);
    const RVec4 ohc = diag.at(Observable::sigma_zz);
    const double eh[4] = {1, -1, 1, -1};
    const double ec[4] = {1, 1, -1, -1};
    const double ehc[4] = {1, -1, -1, 1};
    for (int i = 0; i < 4; ++i) {
        CHECK_THAT(oh[i], WithinAbs(eh[i], 1e-14));
        CHECK_THAT(oc[i], WithinAbs(ec[i], 1e-14));
        CHECK_THAT(ohc[i], WithinAbs(ehc[i], 1e-14));
    }
}

TEST_CASE("observable names round trip", "[measure]") {
    for (Observable o : kObservables) CHECK(observable_from_string(to_string(o)) == o);
    CHECK_THROWS_AS(observable_from_string("sigma_x_H"), validation_error);
}

TEST_CASE("noiseless forward means are pinned", "[measure]") {
    const Dataset ds = simulate_observables(build_forward(ProtocolAngles{}, kJ), standard_pops(),
                                            wrt::default_table(), Direction::forward);
    REQUIRE(ds.records.size() == 9);
    REQUIRE(ds.populations.size() == 3);
    for (int i = 0; i < 9; ++i) {
        CHECK_THAT(ds.records[i].mean, WithinRel(kNoiselessForward[i], 1e-12));
        CHECK(ds.records[i].stderr_ == 0.0);
        CHECK(ds.records[i].direction == Direction::forward);
    }
    // kT-major, observable-minor ordering.
    CHECK(ds.records[0].observable == Observable::sigma_z_h);
    CHECK(ds.records[1].observable == Observable::sigma_z_c);
    CHECK(ds.records[2].observable == Observable::sigma_zz);
    CHECK_THAT(ds.records[0].kt_pev, WithinRel(20.0, 1e-14));
    CHECK_THAT(ds.records[3].kt_pev, WithinRel(12.0, 1e-14));
    CHECK_THAT(ds.records[6].kt_pev, WithinRel(9.0, 1e-14));
}

TEST_CASE("noiseless backward means are pinned", "[measure]") {
    const Dataset ds = simulate_observables(build_backward(ProtocolAngles{}, kJ), standard_pops(),
                                            wrt::default_table(), Direction::backward);
    REQUIRE(ds.records.size() == 9);
    for (int i = 0; i < 9; ++i) CHECK_THAT(ds.records[i].mean, WithinRel(kNoiselessBackward[i], 1e-12));
}

TEST_CASE("simulated means equal the density-matrix expectation", "[measure]") {
    const SpectrumTable &table = wrt::default_table();
    const auto perm = table.computational_index();
    std::mt19937_64 eng(17);
    for (int k = 0; k < 25; ++k) {
        const CMat u = build_forward(wrt::random_angles(eng), kJ);
        const TransitionMatrix t = transition_matrix(u, table);
        const PopulationVector pops = wrt::random_populations(eng);

        // Independent route: rho diagonal in the computational basis, Heisenberg
        // evolution of the product observables, full trace.
        CMat rho = CMat::Zero(4, 4);
        for (int s = 0; s < 4; ++s) rho(perm[s], perm[s]) = pops.p[s];
        const CMat obs[3] = {tensor(pauli('z'), identity2()), tensor(identity2(), pauli('z')),
                             tensor(pauli('z'), pauli('z'))};
        const auto diag = observable_diagonals(table);
        const Observable names[3] = {Observable::sigma_z_h, Observable::sigma_z_c, Observable::sigma_zz};
        for (int i = 0; i < 3; ++i) {
            const double via_matrix = simulate_mean(t, pops, diag.at(names[i]));
            const CMat evolved = u * rho * u.adjoint();
            const double via_trace = expectation(obs[i], evolved);
            CHECK_THAT(via_matrix, WithinAbs(via_trace, 1e-10));
        }
    }
}

TEST_CASE("the energy-scale override changes the preparation", "[measure]") {
    const SpectrumTable &table = wrt::default_table();
    EnergyScale scale;
    scale.pev_per_hhz = 30.3 / 3892.45;
    const PopulationVector pops = gibbs_populations(table, 20.0, KtUnit::pev, scale);
    const Dataset ds =
        simulate_observables(build_forward(ProtocolAngles{}, kJ), {pops}, table, Direction::forward);
    const double expected[3] = {0.2478391984293521, -0.1261168288438772, -0.2580786977418007};
    REQUIRE(ds.records.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK_THAT(ds.records[i].mean, WithinRel(expected[i], 1e-12));
}

TEST_CASE("noise is a single seeded stream over the record order", "[measure]") {
    const SpectrumTable &table = wrt::default_table();
    Dataset ds = simulate_observables(build_forward(ProtocolAngles{}, kJ), standard_pops(), table,
                                      Direction::forward);
    ds.append(simulate_observables(build_backward(ProtocolAngles{}, kJ), standard_pops(), table,
                                   Direction::backward));
    const std::uint64_t seed = derive_seed(20260815, "noise", 0);
    const Dataset noisy = add_noise(ds, 0.05, seed);

    const double z_first[5] = {1.3143916009879903, -1.6497434175643488, -1.8166696445061905,
                               0.8296103296446562, -0.8351077612093442};
    for (int i = 0; i < 5; ++i)
        CHECK_THAT(noisy.records[i].mean, WithinAbs(ds.records[i].mean + 0.05 * z_first[i], 1e-13));

    const double noisy_fwd0[3] = {0.19713886093513816, -0.14415488876074106, -0.25231624759984284};
    const double noisy_bwd0[3] = {-0.09153192466978984, -0.020232260749862556, 0.020058702262336203};
    for (int i = 0; i < 3; ++i) {
        CHECK_THAT(noisy.records[i].mean, WithinRel(noisy_fwd0[i], 1e-12));
        CHECK_THAT(noisy.records[9 + i].mean, WithinRel(noisy_bwd0[i], 1e-12));
    }
    for (const auto &r : noisy.records) CHECK(r.stderr_ == 0.05);
    REQUIRE(noisy.noise_seed.has_value());
    CHECK(*noisy.noise_seed == seed);
    CHECK(noisy.populations.size() == ds.populations.size());

    // The same seed reproduces the same draw; sigma=0 is the identity.
    const Dataset again = add_noise(ds, 0.05, seed);
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        CHECK(again.records[i].mean == noisy.records[i].mean);
    const Dataset clean = add_noise(ds, 0.0, seed);
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        CHECK(clean.records[i].mean == ds.records[i].mean);
}

TEST_CASE("datasets reject duplicate records", "[measure]") {
    Dataset ds = simulate_observables(build_forward(ProtocolAngles{}, kJ), standard_pops(),
                                      wrt::default_table(), Direction::forward);
    CHECK_NOTHROW(ds.validate());
    ds.records.push_back(ds.records[0]);
    CHECK_THROWS_AS(ds.validate(), validation_error);
}

TEST_CASE("records validate their fields", "[measure]") {
    ObservableRecord r{Observable::sigma_z_h, Direction::forward, 20.0, 0.5, 0.05};
    CHECK_NOTHROW(r.validate());
    r.stderr_ = -0.1;
    CHECK_THROWS_AS(r.validate(), validation_error);
    r.stderr_ = 0.05;
    r.kt_pev = 0.0;
    CHECK_THROWS_AS(r.validate(), validation_error);
    r.kt_pev = 20.0;
    r.mean = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(r.validate(), validation_error);
}

TEST_CASE("preparation lookup matches temperatures robustly", "[measure]") {
    const Dataset ds = simulate_observables(build_forward(ProtocolAngles{}, kJ), standard_pops(),
                                            wrt::default_table(), Direction::forward);
    CHECK(ds.find_populations(Direction::forward, 12.0) != nullptr);
    CHECK(ds.find_populations(Direction::forward, 12.0 * (1 + 1e-12)) != nullptr);
    CHECK(ds.find_populations(Direction::forward, 13.0) == nullptr);
    CHECK(ds.find_populations(Direction::backward, 12.0) == nullptr);
}

TEST_CASE("observables that do not commute with the spectrum are rejected", "[measure]") {
    const CMat off_diag = tensor(pauli('x'), identity2());
    const TransitionMatrix t =
        transition_matrix(build_forward(ProtocolAngles{}, kJ), wrt::default_table());
    const PopulationVector pops = gibbs_populations(wrt::default_table(), 20.0, KtUnit::pev);
    CHECK_THROWS_WITH(simulate_mean(build_forward(ProtocolAngles{}, kJ), pops, wrt::default_table(),
                                    off_diag),
                      Catch::Matchers::ContainsSubstring("commute"));
    (void)t;
}
