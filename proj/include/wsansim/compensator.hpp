#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "wsansim/error.hpp"
#include "wsansim/pid.hpp"

namespace wsansim {

/// Gains of the command predictor evaluated on sensor-packet loss.
struct PredictorParams {
    double kp = 0.3;
    double ki = 0.2;
    double kd = 0.5;
    int m = 3; ///< history length; >= 2 because the difference term needs two commands

    PredictorParams(double kp_, double ki_, double kd_, int m_) : kp(kp_), ki(ki_), kd(kd_), m(m_) {
        if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
            throw ValidationError("predictor: gains must be finite");
        }
        if (m < 2) {
            throw ValidationError("predictor: history length m must be >= 2");
        }
    }
};

/**
 * @brief The last m applied commands, oldest first, zero initialized.
 *
 * Storage is exactly m doubles regardless of run length; pushing discards the
 * oldest entry.
 */
class CommandHistory {
public:
    explicit CommandHistory(int capacity) {
        if (capacity < 2) {
            throw ValidationError("command history: capacity must be >= 2");
        }
        buf_.assign(static_cast<std::size_t>(capacity), 0.0);
    }

    [[nodiscard]] std::size_t size() const { return buf_.size(); }

    /// Commands ordered oldest to newest: u(k-m) .. u(k-1).
    [[nodiscard]] const std::vector<double>& values() const { return buf_; }

    /// u(k-age); age = 1 is the most recent command.
    [[nodiscard]] double back(std::size_t age) const {
        if (age < 1 || age > buf_.size()) {
            throw ValidationError("command history: age out of range");
        }
        return buf_[buf_.size() - age];
    }

    friend CommandHistory push_command(CommandHistory hist, double u);

private:
    std::vector<double> buf_;
};

/// Drop the oldest command, append u. Returns the new history by value.
inline CommandHistory push_command(CommandHistory hist, double u) {
    if (!std::isfinite(u)) {
        throw ValidationError("push_command: non-finite command");
    }
    std::rotate(hist.buf_.begin(), hist.buf_.begin() + 1, hist.buf_.end());
    hist.buf_.back() = u;
    return hist;
}

/**
 * @brief Predicted command from the last m applied commands:
 *
 *   u_hat(k) = kp u(k-1) + ki (sum of u(k-m)..u(k-1)) / m + kd (u(k-1) - u(k-2))
 *
 * The history is read, not modified.
 */
inline double predict_command(const PredictorParams& params, const CommandHistory& hist) {
    if (hist.size() != static_cast<std::size_t>(params.m)) {
        throw ValidationError("predict_command: history length does not match m");
    }
    const auto& u = hist.values();
    const double sum = std::accumulate(u.begin(), u.end(), 0.0);
    return params.kp * hist.back(1) + params.ki * sum / static_cast<double>(params.m) +
           params.kd * (hist.back(1) - hist.back(2));
}

struct ActuatorOutput {
    double u = 0.0;
    bool predicted = false;
    PidState pid_state;
    CommandHistory history;
};

/**
 * @brief One actuator period: PID on delivery, prediction on loss.
 *
 * If the sensor packet was delivered the PID computes u(k) and its state
 * advances. If it was lost the command is predicted from the history and the
 * PID state is left untouched (the controller never saw y(k)). Either way the
 * applied command is pushed into the history, so predicted values feed later
 * predictions.
 */
inline ActuatorOutput actuator_step(const PidParams& pid, const PidState& pid_state,
                                    const PredictorParams& pred, const CommandHistory& hist,
                                    bool delivered, double r, std::optional<double> y) {
    if (delivered && !y.has_value()) {
        throw ValidationError("actuator_step: delivered packet without a measurement");
    }
    if (delivered) {
        const PidOutput out = pid_step(pid, pid_state, r, *y);
        return {out.u, false, out.state, push_command(hist, out.u)};
    }
    const double u_hat = predict_command(pred, hist);
    return {u_hat, true, pid_state, push_command(hist, u_hat)};
}

} // namespace wsansim
