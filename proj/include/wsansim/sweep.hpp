#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <ostream>
#include <thread>
#include <vector>

#include "wsansim/engine.hpp"
#include "wsansim/error.hpp"
#include "wsansim/scenario_io.hpp"

namespace wsansim {

/// One seed's paired result: the same scenario run with compensation on and
/// off. Both arms share the seed, and the channel draws are consumed in the
/// same order either way, so they see the identical loss realization.
struct SweepRow {
    std::uint64_t seed = 0;
    double iae_comp = 0.0;
    double iae_unc = 0.0;
    double max_abs_y_comp = 0.0;
    double max_abs_y_unc = 0.0;
    long packets_lost = 0;
    long predictions = 0;
};

struct ArmStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct SweepAggregate {
    ArmStats comp;
    ArmStats unc;
    /// comp.median / unc.median with plain IEEE division semantics.
    double iae_ratio_of_medians = 0.0;
};

/// Linearly interpolated quantile (the common "type 7" estimator) of an
/// unsorted, non-empty sample.
inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile: p outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline SweepAggregate aggregate_sweep(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw ValidationError("sweep: no rows to aggregate");
    std::vector<double> comp, unc;
    comp.reserve(rows.size());
    unc.reserve(rows.size());
    for (const SweepRow& row : rows) {
        comp.push_back(row.iae_comp);
        unc.push_back(row.iae_unc);
    }
    SweepAggregate agg;
    agg.comp = {quantile(comp, 0.25), quantile(comp, 0.5), quantile(comp, 0.75)};
    agg.unc = {quantile(unc, 0.25), quantile(unc, 0.5), quantile(unc, 0.75)};
    agg.iae_ratio_of_medians = agg.comp.median / agg.unc.median;
    return agg;
}

/**
 * @brief Run a paired compensated/uncompensated sweep over consecutive seeds
 * base.seed .. base.seed + n_seeds - 1.
 *
 * Results are written into slots indexed by seed offset, so the returned rows
 * (and anything emitted from them) are byte-identical for any job count.
 */
inline std::vector<SweepRow> run_sweep(const Scenario& base, int n_seeds, int jobs = 1) {
    if (n_seeds < 1) throw ValidationError("sweep: seed count must be >= 1");
    if (jobs < 1) throw ValidationError("sweep: job count must be >= 1");
    jobs = std::min(jobs, n_seeds);

    std::vector<SweepRow> rows(static_cast<std::size_t>(n_seeds));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_seeds));
    std::atomic<int> next{0};

    auto worker = [&]() {
        while (true) {
            const int slot = next.fetch_add(1);
            if (slot >= n_seeds) return;
            try {
                Scenario sc = base;
                sc.seed = base.seed + static_cast<std::uint64_t>(slot);

                sc.compensate = true;
                const TraceSummary comp = run_scenario(sc).summary;
                sc.compensate = false;
                const TraceSummary unc = run_scenario(sc).summary;

                SweepRow& row = rows[static_cast<std::size_t>(slot)];
                row.seed = sc.seed;
                row.iae_comp = comp.final_iae;
                row.iae_unc = unc.final_iae;
                row.max_abs_y_comp = comp.max_abs_y;
                row.max_abs_y_unc = unc.max_abs_y;
                row.packets_lost = comp.packets_lost;
                row.predictions = comp.predictions_made;
            } catch (...) {
                failures[static_cast<std::size_t>(slot)] = std::current_exception();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return rows;
}

inline void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "seed,iae_comp,iae_unc,max_abs_y_comp,max_abs_y_unc,packets_lost,predictions\n";
    for (const SweepRow& row : rows) {
        os << format_u64(row.seed) << ',' << format_real(row.iae_comp) << ','
           << format_real(row.iae_unc) << ',' << format_real(row.max_abs_y_comp) << ','
           << format_real(row.max_abs_y_unc) << ',' << format_int(row.packets_lost) << ','
           << format_int(row.predictions) << "\n";
    }
    if (!os) throw IoError("sweep emission failed");
}

inline void emit_sweep_summary(const std::vector<SweepRow>& rows, std::ostream& os) {
    const SweepAggregate agg = aggregate_sweep(rows);
    os << "seeds = " << format_int(static_cast<std::int64_t>(rows.size())) << "\n";
    os << "iae_comp_q1 = " << format_real(agg.comp.q1) << "\n";
    os << "iae_comp_median = " << format_real(agg.comp.median) << "\n";
    os << "iae_comp_q3 = " << format_real(agg.comp.q3) << "\n";
    os << "iae_unc_q1 = " << format_real(agg.unc.q1) << "\n";
    os << "iae_unc_median = " << format_real(agg.unc.median) << "\n";
    os << "iae_unc_q3 = " << format_real(agg.unc.q3) << "\n";
    os << "iae_ratio_of_medians = " << format_real(agg.iae_ratio_of_medians) << "\n";
    if (!os) throw IoError("sweep summary emission failed");
}

} // namespace wsansim
