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

#include <cmath>
#include <numbers>
#include <vector>

#include "workrecon/hilbert.hpp"

namespace workrecon {

// The twelve rf rotation angles of the driving protocol, radians. Defaults are
// the calibrated drive this library ships with.
struct ProtocolAngles {
    std::array<double, 6> alpha{0.48, -0.80, std::numbers::pi / 2, -3.61, 0.69, std::numbers::pi / 2};
    std::array<double, 6> gamma{-0.83, 1.40, std::numbers::pi / 2, -3.65, 2.68, std::numbers::pi / 2};

    void validate() const {
        for (double a : alpha)
            if (!std::isfinite(a)) throw validation_error("ProtocolAngles: alpha must be finite");
        for (double g : gamma)
            if (!std::isfinite(g)) throw validation_error("ProtocolAngles: gamma must be finite");
    }
};

// One element of a drive: a transverse rotation on one spin, or a stretch of
// free evolution under the scalar coupling.
struct PulseStep {
    enum class Kind { rotation, free_evolution };
    Kind kind = Kind::rotation;
    char axis = 'x';        // rotation only: 'x' or 'y'
    char qubit = 'H';       // rotation only: 'H' or 'C'
    double angle = 0.0;     // rotation only, radians
    double duration = 0.0;  // free evolution only, seconds
};

// exp(-i*angle*sigma_axis/2) on the named spin, identity on the other.
inline CMat rotation(char axis, double angle, char qubit) {
    if (axis != 'x' && axis != 'y')
        throw validation_error(std::string("rotation: axis must be 'x' or 'y', got '") + axis + "'");
    if (qubit != 'H' && qubit != 'C')
        throw validation_error(std::string("rotation: qubit must be 'H' or 'C', got '") + qubit + "'");
    if (!std::isfinite(angle))
        throw validation_error("rotation: angle must be finite");
    const CMat u2 = std::cos(angle / 2) * identity2() -
                    std::complex<double>(0, 1) * std::sin(angle / 2) * pauli(axis);
    return qubit == 'H' ? tensor(u2, identity2()) : tensor(identity2(), u2);
}

// exp(-i*2*pi*(j/4)*sigma_z^H sigma_z^C * t): diagonal phases on the
// computational basis with sign pattern (+,-,-,+).
inline CMat free_evolution(double j_hz, double t_sec) {
    if (t_sec < 0)
        throw validation_error("free_evolution: duration must be >= 0");
    const double ph = 2.0 * std::numbers::pi * (j_hz / 4.0) * t_sec;
    CMat u = CMat::Zero(4, 4);
    const std::complex<double> minus(std::cos(ph), -std::sin(ph));
    const std::complex<double> plus(std::cos(ph), std::sin(ph));
    u(0, 0) = minus;
    u(1, 1) = plus;
    u(2, 2) = plus;
    u(3, 3) = minus;
    return u;
}

// The forward drive as a declarative step list (first applied first): two
// rotation blocks separated by 1/(2J) coupling evolutions. Keeping this as
// data rather than an opaque product lets users serialize and swap drives.
inline std::vector<PulseStep> forward_steps(const ProtocolAngles &a, double j_timing_hz) {
    a.validate();
    if (!(j_timing_hz > 0))
        throw validation_error("forward_steps: coupling used for pulse timing must be > 0");
    const double t = 1.0 / (2.0 * j_timing_hz);
    using K = PulseStep::Kind;
    return {
        {K::rotation, 'y', 'H', a.alpha[0], 0},
        {K::rotation, 'x', 'C', a.alpha[3], 0},
        {K::free_evolution, 'x', 'H', 0, t},
        {K::rotation, 'y', 'H', a.alpha[1], 0},
        {K::rotation, 'x', 'C', a.alpha[4], 0},
        {K::rotation, 'x', 'H', a.alpha[2], 0},
        {K::rotation, 'y', 'C', a.alpha[5], 0},
        {K::free_evolution, 'x', 'H', 0, t},
        {K::rotation, 'x', 'H', a.gamma[0], 0},
        {K::rotation, 'y', 'C', a.gamma[3], 0},
        {K::rotation, 'y', 'H', a.gamma[1], 0},
        {K::rotation, 'x', 'C', a.gamma[4], 0},
        {K::rotation, 'y', 'H', a.gamma[2], 0},
        {K::rotation, 'x', 'C', a.gamma[5], 0},
    };
}

inline CMat step_matrix(const PulseStep &s, double j_dynamics_hz) {
    return s.kind == PulseStep::Kind::rotation ? rotation(s.axis, s.angle, s.qubit)
                                               : free_evolution(j_dynamics_hz, s.duration);
}

// Ordered product of a step list (first step applied first).
inline CMat build_from_steps(const std::vector<PulseStep> &steps, double j_dynamics_hz) {
    CMat u = CMat::Identity(4, 4);
    for (const PulseStep &s : steps) u = step_matrix(s, j_dynamics_hz) * u;
    return u;
}

// Exact adjoint composition of a step list: the steps in reverse order, each
// replaced by its adjoint, so that the result is the adjoint of
// build_from_steps to machine precision. This is the transcription-correctness
// anchor for the backward drive.
inline CMat build_adjoint_from_steps(const std::vector<PulseStep> &steps, double j_dynamics_hz) {
    CMat u = CMat::Identity(4, 4);
    for (const PulseStep &s : steps) u = u * CMat(step_matrix(s, j_dynamics_hz).adjoint());
    return u;
}

// j_dynamics is the coupling felt by the spins; j_timing sets the stored pulse
// durations. They differ only in the decoupled comparison mode, where the
// sequence clock still runs on the nominal coupling.
inline CMat build_forward(const ProtocolAngles &a, double j_dynamics_hz, double j_timing_hz) {
    return build_from_steps(forward_steps(a, j_timing_hz), j_dynamics_hz);
}

inline CMat build_forward(const ProtocolAngles &a, double j_hz) {
    return build_forward(a, j_hz, j_hz);
}

inline CMat build_backward(const ProtocolAngles &a, double j_dynamics_hz, double j_timing_hz) {
    return build_adjoint_from_steps(forward_steps(a, j_timing_hz), j_dynamics_hz);
}

inline CMat build_backward(const ProtocolAngles &a, double j_hz) {
    return build_backward(a, j_hz, j_hz);
}

// CNOT (H controls, C flips) out of transverse pulses and one 1/(2J) coupling
// interval; the z-axis quarter turns are x-y-x composites. Equals the
// canonical CNOT up to the global phase exp(-i*pi/4).
inline std::vector<PulseStep> cnot_steps(double j_timing_hz) {
    if (!(j_timing_hz > 0))
        throw validation_error("cnot_steps: coupling used for pulse timing must be > 0");
    const double t = 1.0 / (2.0 * j_timing_hz);
    const double p2 = std::numbers::pi / 2;
    using K = PulseStep::Kind;
    return {
        {K::rotation, 'y', 'C', p2, 0},
        {K::free_evolution, 'x', 'H', 0, t},
        {K::rotation, 'x', 'C', -p2, 0},
        {K::rotation, 'y', 'C', -p2, 0},
        {K::rotation, 'x', 'C', p2, 0},
        {K::rotation, 'x', 'H', -p2, 0},
        {K::rotation, 'y', 'H', p2, 0},
        {K::rotation, 'x', 'H', p2, 0},
        {K::rotation, 'y', 'C', -p2, 0},
    };
}

// Readout prefix applied before the final single-spin measurements: k = 0 is
// the identity (direct magnetizations), k = 1 maps the two-spin correlation
// onto a single-spin readout via the CNOT above.
inline CMat readout_prefix(int k, double j_hz) {
    if (k == 0) return CMat::Identity(4, 4);
    if (k == 1) return build_from_steps(cnot_steps(j_hz), j_hz);
    throw validation_error("readout_prefix: k must be 0 or 1");
}

}  // namespace workrecon
