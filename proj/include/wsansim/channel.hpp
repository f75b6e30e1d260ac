#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wsansim/error.hpp"
#include "wsansim/rng.hpp"

namespace wsansim {

struct LossTableMeta {
    std::optional<double> power_dbm;
    std::string provenance;

    bool operator==(const LossTableMeta&) const = default;
};

/**
 * @brief Empirical per-distance packet-loss-rate samples.
 *
 * Each distance maps to the raw measured loss rates observed at that range;
 * the channel draws from these lists verbatim and never interpolates. At
 * least one distance with at least one sample is required, and every sample
 * lies in [0, 1].
 */
class LossTable {
public:
    using Entries = std::map<double, std::vector<double>>;

    explicit LossTable(Entries entries, LossTableMeta meta = {})
        : entries_(std::move(entries)), meta_(std::move(meta)) {
        if (entries_.empty()) {
            throw ValidationError("loss table: no distances");
        }
        for (const auto& [distance, samples] : entries_) {
            if (!(distance >= 0.0) || !std::isfinite(distance)) {
                throw ValidationError("loss table: distance must be a non-negative real");
            }
            if (samples.empty()) {
                throw ValidationError("loss table: empty sample list");
            }
            for (double rate : samples) {
                if (!(rate >= 0.0 && rate <= 1.0)) {
                    throw ValidationError("loss table: loss rate outside [0, 1]");
                }
            }
        }
    }

    [[nodiscard]] const Entries& entries() const { return entries_; }
    [[nodiscard]] const LossTableMeta& meta() const { return meta_; }

    bool operator==(const LossTable&) const = default;

    /// Distance key closest to d; ties resolve to the smaller distance.
    [[nodiscard]] double nearest_distance(double d) const {
        auto hi = entries_.lower_bound(d);
        if (hi == entries_.begin()) return hi->first;
        if (hi == entries_.end()) return std::prev(hi)->first;
        auto lo = std::prev(hi);
        return (d - lo->first <= hi->first - d) ? lo->first : hi->first;
    }

private:
    Entries entries_;
    LossTableMeta meta_;
};

/// Distance-versus-time schedule between sensor and actuator.
class MobilityProfile {
public:
    struct Segment {
        double t_start = 0.0;
        double t_end = 0.0;
        double distance = 0.0;
    };

    explicit MobilityProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
        if (segments_.empty()) {
            throw ValidationError("mobility profile: no segments");
        }
        if (segments_.front().t_start != 0.0) {
            throw ValidationError("mobility profile: first segment must start at t = 0");
        }
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& s = segments_[i];
            if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || !(s.t_end > s.t_start)) {
                throw ValidationError("mobility profile: segment must satisfy t_end > t_start");
            }
            if (!(s.distance >= 0.0) || !std::isfinite(s.distance)) {
                throw ValidationError("mobility profile: distance must be a non-negative real");
            }
            if (i > 0 && segments_[i - 1].t_end != s.t_start) {
                throw ValidationError("mobility profile: segments must be contiguous");
            }
        }
    }

    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
    [[nodiscard]] double end_time() const { return segments_.back().t_end; }

    /// Index of the segment whose half-open interval [t_start, t_end) holds t.
    [[nodiscard]] std::size_t segment_index(double t) const {
        if (!(t >= 0.0) || !(t < end_time())) {
            throw ValidationError("mobility profile: time outside coverage");
        }
        auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const Segment& s) { return v < s.t_end; });
        return static_cast<std::size_t>(it - segments_.begin());
    }

private:
    std::vector<Segment> segments_;
};

/// Distance at time t under half-open segment intervals.
inline double distance_at(const MobilityProfile& profile, double t) {
    return profile.segments()[profile.segment_index(t)].distance;
}

/// Draw one measured rate, uniformly, from the entry nearest to d.
/// Consumes exactly one rng draw.
inline double sample_loss_rate(const LossTable& table, double d, SplitMix64& rng) {
    const auto& samples = table.entries().at(table.nearest_distance(d));
    return samples[rng.next_index(samples.size())];
}

/// Bernoulli trial: true (lost) with probability rate. Consumes exactly one
/// rng draw.
inline bool packet_lost(double rate, SplitMix64& rng) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ValidationError("packet_lost: rate outside [0, 1]");
    }
    return rng.next_unit() < rate;
}

struct DistanceStats {
    double distance = 0.0;
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Per-distance summary of the ingested samples, distances ascending.
inline std::vector<DistanceStats> summarize(const LossTable& table) {
    std::vector<DistanceStats> stats;
    stats.reserve(table.entries().size());
    for (const auto& [distance, samples] : table.entries()) {
        DistanceStats s;
        s.distance = distance;
        s.count = samples.size();
        s.min = *std::min_element(samples.begin(), samples.end());
        s.max = *std::max_element(samples.begin(), samples.end());
        double sum = 0.0;
        for (double v : samples) sum += v;
        s.mean = sum / static_cast<double>(samples.size());
        stats.push_back(s);
    }
    return stats;
}

/**
 * @brief Built-in measured sample set: 15 loss rates recorded at 10 m range,
 * 0 dBm transmit power. Addressable from scenario files and the CLI as
 * "builtin:10m".
 */
inline LossTable embedded_10m_table() {
    LossTable::Entries entries;
    entries[10.0] = {0.7160, 0.2716, 0.6790, 0.9136, 0.9259, 0.6543, 0.3827, 0.6543,
                     0.4691, 0.3333, 0.2963, 0.1358, 0.5062, 0.6790, 0.5802};
    LossTableMeta meta;
    meta.power_dbm = 0.0;
    meta.provenance = "embedded 10 m sample set";
    return LossTable(std::move(entries), std::move(meta));
}

} // namespace wsansim
