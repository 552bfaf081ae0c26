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

#include <random>

#include "workrecon/pipeline.hpp"

namespace wrt {

using namespace workrecon;

inline const SpectrumTable &default_table() {
    static const SpectrumTable t = spectrum(HamiltonianSpec{});
    return t;
}

inline ProtocolAngles random_angles(std::mt19937_64 &eng) {
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    ProtocolAngles a;
    for (auto &v : a.alpha) v = ang(eng);
    for (auto &v : a.gamma) v = ang(eng);
    return a;
}

inline PopulationVector random_populations(std::mt19937_64 &eng, double kt_hhz = 1000.0) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    PopulationVector p;
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (p.p[i] = u(eng));
    for (int i = 0; i < 4; ++i) p.p[i] /= s;
    p.kt_hhz = kt_hhz;
    p.kt_pev = EnergyScale{}.to_pev(kt_hhz);
    return p;
}

inline double max_abs_diff(const CMat &a, const CMat &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace wrt
