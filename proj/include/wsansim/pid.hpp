#pragma once

#include <cmath>

#include "wsansim/error.hpp"

namespace wsansim {

/// Discrete PID gains and sampling period.
struct PidParams {
    double kp = 0.0;
    double ki = 0.0; ///< 1/s
    double kd = 0.0; ///< s
    double h = 0.0;  ///< s

    PidParams(double kp_, double ki_, double kd_, double h_) : kp(kp_), ki(ki_), kd(kd_), h(h_) {
        if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
            throw ValidationError("pid: gains must be finite");
        }
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw ValidationError("pid: sampling period must be positive");
        }
    }
};

/// Recursion state: last completed error and integral term.
struct PidState {
    double e_prev = 0.0;
    double i_prev = 0.0;
};

struct PidOutput {
    double u = 0.0;
    PidState state;
};

inline PidState pid_reset() { return {}; }

/**
 * @brief One PID update: trapezoidal integral, backward-difference derivative.
 *
 *   e = r - y
 *   P = kp e
 *   I = i_prev + ki h (e + e_prev) / 2
 *   D = kd (e - e_prev) / h
 *   u = P + I + D
 *
 * No derivative filtering, no anti-windup, no output saturation. Value
 * semantics; the caller decides whether to adopt the returned state.
 */
inline PidOutput pid_step(const PidParams& params, const PidState& state, double r, double y) {
    if (!std::isfinite(r) || !std::isfinite(y)) {
        throw ValidationError("pid_step: non-finite reference or measurement");
    }
    if (!std::isfinite(state.e_prev) || !std::isfinite(state.i_prev)) {
        throw ValidationError("pid_step: non-finite controller state");
    }
    const double e = r - y;
    const double p_term = params.kp * e;
    const double i_term = state.i_prev + params.ki * params.h * (e + state.e_prev) / 2.0;
    const double d_term = params.kd * (e - state.e_prev) / params.h;
    return {p_term + i_term + d_term, PidState{e, i_term}};
}

} // namespace wsansim
