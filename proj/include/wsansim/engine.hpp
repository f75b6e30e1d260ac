#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsansim/channel.hpp"
#include "wsansim/compensator.hpp"
#include "wsansim/error.hpp"
#include "wsansim/pid.hpp"
#include "wsansim/plant.hpp"
#include "wsansim/rng.hpp"

namespace wsansim {

/// Square-wave set-point: high for the first half of each period, low for the
/// second.
struct ReferenceSpec {
    double period = 2.0;
    double high = 1.0;
    double low = -1.0;

    ReferenceSpec(double period_, double high_, double low_)
        : period(period_), high(high_), low(low_) {
        if (!(period > 0.0) || !std::isfinite(period)) {
            throw ValidationError("reference: period must be positive");
        }
        if (!std::isfinite(high) || !std::isfinite(low)) {
            throw ValidationError("reference: levels must be finite");
        }
    }
};

/// What the uncompensated actuator applies on loss.
enum class BaselinePolicy { HoldLast, Zero };

/// How often a fresh loss rate is drawn from the distance's sample set.
enum class ResamplePolicy { PerPeriod, PerSegment };

/**
 * @brief A complete experiment description. Deterministic: the trace is a
 * pure function of this value.
 */
struct Scenario {
    double duration;
    double h;
    ContinuousTransferFunction plant;
    PidParams pid;
    PredictorParams pred;
    bool compensate = true;
    BaselinePolicy baseline = BaselinePolicy::HoldLast;
    ReferenceSpec reference;
    MobilityProfile profile;
    LossTable table;
    ResamplePolicy resample = ResamplePolicy::PerPeriod;
    std::uint64_t seed = 1;
    double y_guard = 1e6;        ///< |y| level that flags the run as diverged
    std::string table_source;    ///< where the loss table came from, for audit output

    void validate() const {
        if (!(duration > 0.0) || !std::isfinite(duration)) {
            throw ValidationError("scenario: duration must be positive");
        }
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw ValidationError("scenario: sampling period h must be positive");
        }
        if (duration / h > 9.0e15) {
            throw ValidationError("scenario: duration/h exceeds the representable step count");
        }
        if (pid.h != h) {
            throw ValidationError("scenario: pid sampling period must equal sim.h");
        }
        if (profile.end_time() < duration - 1e-9) {
            throw ValidationError("scenario: mobility profile does not cover the duration");
        }
        if (!(y_guard > 0.0)) {
            throw ValidationError("scenario: y_guard must be positive");
        }
    }
};

/// One sampling period of a run.
struct StepRecord {
    std::int64_t k = 0;
    double t = 0.0;
    double distance = 0.0;
    double rate = 0.0;
    bool lost = false;
    double r = 0.0;
    double y = 0.0; ///< true plant output sampled at t, before actuation
    double u = 0.0; ///< applied command
    bool predicted = false;
    double iae = 0.0; ///< running J after this step's contribution
};

struct TraceSummary {
    double final_iae = 0.0;
    std::int64_t packets_sent = 0;
    std::int64_t packets_lost = 0;
    std::int64_t predictions_made = 0;
    std::uint64_t seed = 0;
    double max_abs_y = 0.0;
    bool y_guard_exceeded = false;
};

struct SimTrace {
    std::vector<StepRecord> records;
    TraceSummary summary;
};

/// r(t) for the square wave. t = period wraps back to the high level.
inline double reference_value(const ReferenceSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("reference_value: t must be non-negative");
    }
    return std::fmod(t, spec.period) < spec.period / 2.0 ? spec.high : spec.low;
}

/// Left-rectangle update of J(t) = integral of |r - y|.
inline double iae_update(double j_prev, double r, double y, double h) {
    if (j_prev < 0.0) {
        throw ValidationError("iae_update: accumulator must be non-negative");
    }
    return j_prev + std::abs(r - y) * h;
}

/// Number of sampling periods in a run. Floor of duration/h, with a 1e-9
/// slack so that exact multiples are not lost to representation error
/// (20 / 0.02 evaluates below 1000 in binary floating point).
inline std::int64_t step_count(double duration, double h) {
    return static_cast<std::int64_t>(std::floor(duration / h + 1e-9));
}

/**
 * @brief Run the closed loop: reference, sensing, lossy transmission,
 * actuation (PID, prediction, or baseline hold), plant advance, IAE
 * accounting.
 *
 * Channel randomness consumes the seeded stream in a fixed order — one rate
 * draw (per period, or on segment entry under PerSegment) followed by one
 * Bernoulli draw per step — so paired runs with the same seed see the same
 * loss realization regardless of controller configuration.
 *
 * If |y| crosses y_guard the run keeps going and the summary flags it;
 * a diverging baseline run must still produce a comparable trace.
 */
inline SimTrace run_scenario(const Scenario& sc) {
    sc.validate();

    const DiscretePlant plant = discretize_zoh(tf_to_state_space(sc.plant), sc.h);
    PlantState state = plant_reset(plant);
    PidState pid_state = pid_reset();
    CommandHistory history(sc.pred.m);
    SplitMix64 rng(sc.seed);

    const std::int64_t n = step_count(sc.duration, sc.h);
    if (n < 1) {
        throw ValidationError("scenario: duration shorter than one sampling period");
    }

    SimTrace trace;
    trace.records.reserve(static_cast<std::size_t>(n));

    double iae = 0.0;
    double u_prev = 0.0;
    double rate = 0.0;
    std::size_t last_segment = static_cast<std::size_t>(-1);

    for (std::int64_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * sc.h;
        const double r = reference_value(sc.reference, t);
        const double y = state.y;

        const std::size_t segment = sc.profile.segment_index(t);
        const double distance = sc.profile.segments()[segment].distance;
        if (sc.resample == ResamplePolicy::PerPeriod || segment != last_segment) {
            rate = sample_loss_rate(sc.table, distance, rng);
        }
        last_segment = segment;
        const bool lost = packet_lost(rate, rng);

        double u = 0.0;
        bool predicted = false;
        try {
            if (sc.compensate) {
                ActuatorOutput out =
                    actuator_step(sc.pid, pid_state, sc.pred, history, !lost, r,
                                  lost ? std::nullopt : std::optional<double>(y));
                u = out.u;
                predicted = out.predicted;
                pid_state = out.pid_state;
                history = std::move(out.history);
            } else if (!lost) {
                PidOutput out = pid_step(sc.pid, pid_state, r, y);
                u = out.u;
                pid_state = out.state;
            } else {
                u = sc.baseline == BaselinePolicy::HoldLast ? u_prev : 0.0;
            }
        } catch (const ValidationError& e) {
            throw ValidationError("step " + std::to_string(k) + ": " + e.what());
        }
        u_prev = u;

        iae = iae_update(iae, r, y, sc.h);
        state = plant_step(plant, state, u);

        StepRecord rec;
        rec.k = k;
        rec.t = t;
        rec.distance = distance;
        rec.rate = rate;
        rec.lost = lost;
        rec.r = r;
        rec.y = y;
        rec.u = u;
        rec.predicted = predicted;
        rec.iae = iae;
        trace.records.push_back(rec);

        trace.summary.max_abs_y = std::max(trace.summary.max_abs_y, std::abs(y));
        if (std::abs(y) > sc.y_guard) {
            trace.summary.y_guard_exceeded = true;
        }
        trace.summary.packets_lost += lost ? 1 : 0;
        trace.summary.predictions_made += predicted ? 1 : 0;
    }

    trace.summary.packets_sent = n;
    trace.summary.final_iae = iae;
    trace.summary.seed = sc.seed;
    return trace;
}

} // namespace wsansim
