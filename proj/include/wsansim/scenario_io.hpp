#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wsansim/channel.hpp"
#include "wsansim/engine.hpp"
#include "wsansim/error.hpp"

namespace wsansim {

// ---------------------------------------------------------------------------
// Formatting. All numeric output uses the shortest decimal rendering that
// round-trips to the same IEEE double (std::to_chars), so emitted files are
// byte-stable across runs and platforms.
// ---------------------------------------------------------------------------

inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_flag(bool v) { return v ? "1" : "0"; }

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_real(std::string_view text, const std::string& context) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError(context + ": expected a real number, got '" + std::string(text) +
                              "'");
    }
    return value;
}

inline std::uint64_t parse_u64(std::string_view text, const std::string& context) {
    std::string_view s = trim(text);
    std::uint64_t value = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw ValidationError(context + ": expected an unsigned integer, got '" +
                              std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::vector<double> parse_real_list(std::string_view text, const std::string& context) {
    std::vector<double> values;
    for (auto part : split(text, ',')) {
        values.push_back(parse_real(part, context));
    }
    return values;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Loss-table CSV: header `distance_m,loss_rate`, one sample per row, repeated
// distances accumulate. `#` starts a comment; `# power_dbm=<v>` carries the
// transmit-power metadata.
// ---------------------------------------------------------------------------

inline LossTable parse_loss_csv(std::string_view text) {
    LossTable::Entries entries;
    LossTableMeta meta;
    bool header_seen = false;
    int line_no = 0;
    std::size_t start = 0;

    while (start <= text.size()) {
        std::size_t eol = text.find('\n', start);
        std::string_view raw = text.substr(
            start, eol == std::string_view::npos ? text.size() - start : eol - start);
        start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty()) continue;
        const std::string where = "loss table line " + std::to_string(line_no);

        if (line.front() == '#') {
            std::string_view body = detail::trim(line.substr(1));
            constexpr std::string_view kPowerKey = "power_dbm=";
            if (body.substr(0, kPowerKey.size()) == kPowerKey) {
                meta.power_dbm = detail::parse_real(body.substr(kPowerKey.size()), where);
            } else if (!body.empty()) {
                if (!meta.provenance.empty()) meta.provenance += "; ";
                meta.provenance += std::string(body);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "distance_m,loss_rate") {
                throw ValidationError(where + ": expected header 'distance_m,loss_rate'");
            }
            header_seen = true;
            continue;
        }
        auto fields = detail::split(line, ',');
        if (fields.size() != 2) {
            throw ValidationError(where + ": expected 2 fields, got " +
                                  std::to_string(fields.size()));
        }
        const double distance = detail::parse_real(fields[0], where + " (distance_m)");
        const double rate = detail::parse_real(fields[1], where + " (loss_rate)");
        if (!(distance >= 0.0) || !std::isfinite(distance)) {
            throw ValidationError(where + ": distance must be a non-negative real");
        }
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw ValidationError(where + ": loss rate outside [0, 1]");
        }
        entries[distance].push_back(rate);
    }
    if (entries.empty()) {
        throw ValidationError("loss table: no data rows");
    }
    return LossTable(std::move(entries), std::move(meta));
}

inline void emit_loss_csv(const LossTable& table, std::ostream& os) {
    if (table.meta().power_dbm) {
        os << "# power_dbm=" << format_real(*table.meta().power_dbm) << "\n";
    }
    if (!table.meta().provenance.empty()) {
        os << "# " << table.meta().provenance << "\n";
    }
    os << "distance_m,loss_rate\n";
    for (const auto& [distance, samples] : table.entries()) {
        for (double rate : samples) {
            os << format_real(distance) << ',' << format_real(rate) << "\n";
        }
    }
    if (!os) throw IoError("loss table emission failed");
}

/// Resolve a loss-table reference: either the "builtin:" scheme or a CSV path
/// (relative paths resolve against base_dir).
inline LossTable load_loss_table(const std::string& ref, const std::filesystem::path& base_dir) {
    if (ref.rfind("builtin:", 0) == 0) {
        if (ref == "builtin:10m") return embedded_10m_table();
        throw ValidationError("loss.table: unknown builtin table '" + ref + "'");
    }
    const std::filesystem::path path = base_dir / std::filesystem::path(ref);
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open loss table '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read loss table '" + path.string() + "'");
    }
    try {
        return parse_loss_csv(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Scenario files: flat `key = value` lines, `#` comments. Unknown and
// duplicate keys are hard errors.
// ---------------------------------------------------------------------------

namespace detail {

class KeyValues {
public:
    explicit KeyValues(std::string_view text) {
        int line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t eol = text.find('\n', start);
            std::string_view raw = text.substr(
                start, eol == std::string_view::npos ? text.size() - start : eol - start);
            start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++line_no;
            std::string_view line = trim(raw);
            if (line.empty() || line.front() == '#') continue;
            std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ValidationError("scenario line " + std::to_string(line_no) +
                                      ": expected 'key = value'");
            }
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ValidationError("scenario line " + std::to_string(line_no) + ": empty key");
            }
            if (!kv_.emplace(key, value).second) {
                throw ValidationError("scenario: duplicate key '" + key + "'");
            }
        }
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string value = it->second;
        kv_.erase(it);
        return value;
    }

    std::string require(const std::string& key) {
        auto v = take(key);
        if (!v) throw ValidationError("scenario: missing required key '" + key + "'");
        return *v;
    }

    void reject_leftovers() const {
        if (!kv_.empty()) {
            throw ValidationError("scenario: unknown key '" + kv_.begin()->first + "'");
        }
    }

private:
    std::map<std::string, std::string> kv_;
};

inline MobilityProfile parse_segments(std::string_view text) {
    std::vector<MobilityProfile::Segment> segments;
    for (auto part : split(text, ',')) {
        auto fields = split(trim(part), ':');
        if (fields.size() != 3) {
            throw ValidationError(
                "mobility.segments: expected 't_start:t_end:distance' triples");
        }
        MobilityProfile::Segment s;
        s.t_start = parse_real(fields[0], "mobility.segments (t_start)");
        s.t_end = parse_real(fields[1], "mobility.segments (t_end)");
        s.distance = parse_real(fields[2], "mobility.segments (distance)");
        segments.push_back(s);
    }
    return MobilityProfile(std::move(segments));
}

} // namespace detail

/**
 * @brief Parse and fully validate a scenario document. Defaults are applied
 * for the optional keys (predictor gains, reference shape, policies, seed,
 * divergence guard); everything else is required.
 */
inline Scenario parse_scenario(std::string_view text,
                               const std::filesystem::path& base_dir = {}) {
    detail::KeyValues kv(text);

    const double duration = detail::parse_real(kv.require("sim.duration"), "sim.duration");
    const double h = detail::parse_real(kv.require("sim.h"), "sim.h");
    if (!(h > 0.0)) throw ValidationError("sim.h: must be positive");
    if (!(duration > 0.0)) throw ValidationError("sim.duration: must be positive");

    std::uint64_t seed = 1;
    if (auto v = kv.take("sim.seed")) seed = detail::parse_u64(*v, "sim.seed");

    bool compensate = true;
    if (auto v = kv.take("sim.compensate")) {
        if (*v == "on") compensate = true;
        else if (*v == "off") compensate = false;
        else throw ValidationError("sim.compensate: expected 'on' or 'off'");
    }

    BaselinePolicy baseline = BaselinePolicy::HoldLast;
    if (auto v = kv.take("sim.baseline_policy")) {
        if (*v == "hold_last") baseline = BaselinePolicy::HoldLast;
        else if (*v == "zero") baseline = BaselinePolicy::Zero;
        else throw ValidationError("sim.baseline_policy: expected 'hold_last' or 'zero'");
    }

    ResamplePolicy resample = ResamplePolicy::PerPeriod;
    if (auto v = kv.take("sim.resample")) {
        if (*v == "per_period") resample = ResamplePolicy::PerPeriod;
        else if (*v == "per_segment") resample = ResamplePolicy::PerSegment;
        else throw ValidationError("sim.resample: expected 'per_period' or 'per_segment'");
    }

    double y_guard = 1e6;
    if (auto v = kv.take("sim.y_guard")) {
        y_guard = detail::parse_real(*v, "sim.y_guard");
        if (!(y_guard > 0.0)) throw ValidationError("sim.y_guard: must be positive");
    }

    ContinuousTransferFunction plant(
        detail::parse_real_list(kv.require("plant.num"), "plant.num"),
        detail::parse_real_list(kv.require("plant.den"), "plant.den"));

    PidParams pid(detail::parse_real(kv.require("pid.kp"), "pid.kp"),
                  detail::parse_real(kv.require("pid.ki"), "pid.ki"),
                  detail::parse_real(kv.require("pid.kd"), "pid.kd"), h);

    double pred_kp = 0.3, pred_ki = 0.2, pred_kd = 0.5;
    int pred_m = 3;
    if (auto v = kv.take("pred.kp")) pred_kp = detail::parse_real(*v, "pred.kp");
    if (auto v = kv.take("pred.ki")) pred_ki = detail::parse_real(*v, "pred.ki");
    if (auto v = kv.take("pred.kd")) pred_kd = detail::parse_real(*v, "pred.kd");
    if (auto v = kv.take("pred.m")) {
        const std::uint64_t m = detail::parse_u64(*v, "pred.m");
        if (m < 2 || m > 1000000) throw ValidationError("pred.m: expected an integer in [2, 1e6]");
        pred_m = static_cast<int>(m);
    }
    PredictorParams pred(pred_kp, pred_ki, pred_kd, pred_m);

    double ref_period = 2.0, ref_high = 1.0, ref_low = -1.0;
    if (auto v = kv.take("ref.period")) ref_period = detail::parse_real(*v, "ref.period");
    if (auto v = kv.take("ref.high")) ref_high = detail::parse_real(*v, "ref.high");
    if (auto v = kv.take("ref.low")) ref_low = detail::parse_real(*v, "ref.low");
    ReferenceSpec reference(ref_period, ref_high, ref_low);

    MobilityProfile profile = detail::parse_segments(kv.require("mobility.segments"));

    const std::string table_ref = kv.require("loss.table");
    LossTable table = load_loss_table(table_ref, base_dir);

    kv.reject_leftovers();

    Scenario sc{duration, h,        plant,    pid,  pred,    compensate, baseline,
                reference, profile, table,    resample, seed, y_guard,   table_ref};
    sc.validate();
    return sc;
}

/// Canonical `key = value` rendering of an effective configuration. The
/// output is itself a parseable scenario document.
inline void emit_scenario_config(const Scenario& sc, std::ostream& os) {
    os << "sim.duration = " << format_real(sc.duration) << "\n";
    os << "sim.h = " << format_real(sc.h) << "\n";
    os << "sim.seed = " << format_u64(sc.seed) << "\n";
    os << "sim.compensate = " << (sc.compensate ? "on" : "off") << "\n";
    os << "sim.baseline_policy = "
       << (sc.baseline == BaselinePolicy::HoldLast ? "hold_last" : "zero") << "\n";
    os << "sim.resample = "
       << (sc.resample == ResamplePolicy::PerPeriod ? "per_period" : "per_segment") << "\n";
    os << "sim.y_guard = " << format_real(sc.y_guard) << "\n";
    auto list = [&os](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? "," : "") << format_real(v[i]);
        }
    };
    os << "plant.num = ";
    list(sc.plant.num);
    os << "\nplant.den = ";
    list(sc.plant.den);
    os << "\npid.kp = " << format_real(sc.pid.kp) << "\n";
    os << "pid.ki = " << format_real(sc.pid.ki) << "\n";
    os << "pid.kd = " << format_real(sc.pid.kd) << "\n";
    os << "pred.kp = " << format_real(sc.pred.kp) << "\n";
    os << "pred.ki = " << format_real(sc.pred.ki) << "\n";
    os << "pred.kd = " << format_real(sc.pred.kd) << "\n";
    os << "pred.m = " << format_int(sc.pred.m) << "\n";
    os << "ref.period = " << format_real(sc.reference.period) << "\n";
    os << "ref.high = " << format_real(sc.reference.high) << "\n";
    os << "ref.low = " << format_real(sc.reference.low) << "\n";
    os << "mobility.segments = ";
    const auto& segs = sc.profile.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        os << (i ? "," : "") << format_real(segs[i].t_start) << ':' << format_real(segs[i].t_end)
           << ':' << format_real(segs[i].distance);
    }
    os << "\nloss.table = " << (sc.table_source.empty() ? "inline" : sc.table_source) << "\n";
}

// ---------------------------------------------------------------------------
// Trace and summary emission.
// ---------------------------------------------------------------------------

inline void emit_trace(const SimTrace& trace, std::ostream& os) {
    os << "k,t,distance,rate,lost,r,y,u,predicted,iae\n";
    for (const StepRecord& rec : trace.records) {
        os << format_int(rec.k) << ',' << format_real(rec.t) << ',' << format_real(rec.distance)
           << ',' << format_real(rec.rate) << ',' << format_flag(rec.lost) << ','
           << format_real(rec.r) << ',' << format_real(rec.y) << ',' << format_real(rec.u) << ','
           << format_flag(rec.predicted) << ',' << format_real(rec.iae) << "\n";
    }
    if (!os) throw IoError("trace emission failed");
}

inline void emit_summary(const Scenario& sc, const TraceSummary& summary, std::ostream& os) {
    os << "# effective configuration\n";
    emit_scenario_config(sc, os);
    os << "# results\n";
    os << "packets_sent = " << format_int(summary.packets_sent) << "\n";
    os << "packets_lost = " << format_int(summary.packets_lost) << "\n";
    os << "predictions_made = " << format_int(summary.predictions_made) << "\n";
    os << "final_iae = " << format_real(summary.final_iae) << "\n";
    os << "max_abs_y = " << format_real(summary.max_abs_y) << "\n";
    os << "y_guard_exceeded = " << format_flag(summary.y_guard_exceeded) << "\n";
    if (!os) throw IoError("summary emission failed");
}

inline std::string trace_to_string(const SimTrace& trace) {
    std::ostringstream os;
    emit_trace(trace, os);
    return os.str();
}

} // namespace wsansim
