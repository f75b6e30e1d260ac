#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wsansim/channel.hpp"
#include "wsansim/engine.hpp"
#include "wsansim/error.hpp"
#include "wsansim/scenario_io.hpp"
#include "wsansim/sweep.hpp"

namespace wsansim {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write '" + path.string() + "'");
}

inline std::string default_out_dir() {
    const char* env = std::getenv("WSANSIM_OUT");
    return (env != nullptr && *env != '\0') ? std::string(env) : std::string(".");
}

inline std::filesystem::path ensure_out_dir(const std::string& dir) {
    const std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create output directory '" + path.string() + "'");
    return path;
}

inline Scenario load_scenario(const std::string& scenario_path) {
    const std::filesystem::path path(scenario_path);
    const std::string text = read_file(path);
    try {
        return parse_scenario(text, path.parent_path());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline void emit_table_stats(const LossTable& table, const std::string& source,
                             std::ostream& os) {
    const auto stats = summarize(table);
    os << "source = " << source << "\n";
    os << "distances = " << format_int(static_cast<std::int64_t>(stats.size())) << "\n";
    if (table.meta().power_dbm) {
        os << "power_dbm = " << format_real(*table.meta().power_dbm) << "\n";
    }
    if (!table.meta().provenance.empty()) {
        os << "provenance = " << table.meta().provenance << "\n";
    }
    os << "distance,count,mean,min,max\n";
    for (const DistanceStats& row : stats) {
        os << format_real(row.distance) << ',' << format_int(row.count) << ','
           << format_real(row.mean) << ',' << format_real(row.min) << ','
           << format_real(row.max) << "\n";
    }
}

} // namespace detail

/**
 * @brief Full command-line front end. `args` excludes the program name.
 *
 * Exit codes: 0 success, 1 usage/validation error, 2 I/O or internal error.
 */
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"lossy-link control-loop simulator"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "simulate one scenario; write trace.csv + summary.txt");
    std::string run_scenario_path;
    std::string run_out = detail::default_out_dir();
    std::uint64_t run_seed = 0;
    std::string run_comp;
    run->add_option("--scenario", run_scenario_path, "scenario file")->required();
    run->add_option("--out", run_out, "output directory");
    auto* run_seed_opt = run->add_option("--seed", run_seed, "override sim.seed");
    run->add_option("--compensate", run_comp, "override sim.compensate")
        ->check(CLI::IsMember({"on", "off"}));

    // --- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand(
        "sweep", "paired compensated/uncompensated runs over consecutive seeds; "
                 "write sweep.csv + sweep_summary.txt");
    std::string sweep_scenario_path;
    std::string sweep_out = detail::default_out_dir();
    std::uint64_t sweep_seed = 0;
    int sweep_seeds = 20;
    int sweep_jobs = 1;
    sweep->add_option("--scenario", sweep_scenario_path, "scenario file")->required();
    sweep->add_option("--out", sweep_out, "output directory");
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "override the base seed");
    sweep->add_option("--seeds", sweep_seeds, "number of consecutive seeds")
        ->check(CLI::Range(1, 1000000));
    sweep->add_option("--jobs", sweep_jobs, "worker threads")->check(CLI::Range(1, 1024));

    // --- stats -------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "per-distance summary of a loss table");
    std::string stats_table;
    stats->add_option("--loss-table", stats_table, "CSV path or builtin:<name>")->required();

    // --- validate ----------------------------------------------------------
    auto* validate =
        app.add_subcommand("validate", "parse a scenario and print the effective configuration");
    std::string validate_scenario_path;
    validate->add_option("--scenario", validate_scenario_path, "scenario file")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(run)) {
            Scenario sc = detail::load_scenario(run_scenario_path);
            if (run_seed_opt->count() > 0) sc.seed = run_seed;
            if (!run_comp.empty()) sc.compensate = (run_comp == "on");
            const SimTrace trace = run_scenario(sc);

            const auto dir = detail::ensure_out_dir(run_out);
            std::ostringstream trace_text;
            emit_trace(trace, trace_text);
            detail::write_file(dir / "trace.csv", trace_text.str());

            std::ostringstream summary_text;
            emit_summary(sc, trace.summary, summary_text);
            detail::write_file(dir / "summary.txt", summary_text.str());
            out << summary_text.str();
        } else if (app.got_subcommand(sweep)) {
            Scenario sc = detail::load_scenario(sweep_scenario_path);
            if (sweep_seed_opt->count() > 0) sc.seed = sweep_seed;
            const std::vector<SweepRow> rows = run_sweep(sc, sweep_seeds, sweep_jobs);

            const auto dir = detail::ensure_out_dir(sweep_out);
            std::ostringstream csv_text;
            emit_sweep_csv(rows, csv_text);
            detail::write_file(dir / "sweep.csv", csv_text.str());

            std::ostringstream summary_text;
            emit_sweep_summary(rows, summary_text);
            detail::write_file(dir / "sweep_summary.txt", summary_text.str());
            out << summary_text.str();
        } else if (app.got_subcommand(stats)) {
            const LossTable table = load_loss_table(stats_table, {});
            detail::emit_table_stats(table, stats_table, out);
        } else if (app.got_subcommand(validate)) {
            const Scenario sc = detail::load_scenario(validate_scenario_path);
            emit_scenario_config(sc, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace wsansim
