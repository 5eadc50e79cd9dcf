// Copyright 2026 The ftmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0
//
// ftmsim command-line front end.
//
//   ftmsim presets                                     list built-in profiles
//   ftmsim run    --config FILE [--out DIR] [--seed N] run + CSV + summary
//   ftmsim attack --config FILE                        run the attacker, print report
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ftmsim/errors.hpp"
#include "ftmsim/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ftmsim::ValidationError("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

ftmsim::harness::Scenario load(const std::string& config_path,
                               const std::optional<std::uint64_t>& seed_override) {
    ftmsim::harness::Scenario scenario = ftmsim::harness::load_scenario(read_file(config_path));
    if (seed_override.has_value()) {
        scenario.seed = *seed_override;
    }
    return scenario;
}

void print_presets() {
    const ftmsim::harness::PresetCatalog& catalog = ftmsim::harness::builtin_presets();

    std::printf("devices:\n");
    for (const auto& [name, device] : catalog.devices) {
        std::printf("  %-22s %4d MHz  %3d MHz BW  %d antennas  tx %.1f dBm\n", name.c_str(),
                    device.band_mhz, device.bandwidth_mhz, device.antennas, device.tx_power_dbm);
    }

    std::printf("channels:\n");
    for (const auto& [name, channel] : catalog.channels) {
        std::printf("  %-22s n=%.1f  multipath %.1f ns  shadowing %.1f dB\n", name.c_str(),
                    channel.pathloss_exponent_n, channel.multipath_mean_excess_ns,
                    channel.rssi_noise_db_std);
    }

    std::printf("scenarios:\n");
    for (const auto& [name, scenario] : catalog.scenarios) {
        std::ostringstream distances;
        for (std::size_t i = 0; i < scenario.distances_m.size(); ++i) {
            distances << (i ? ", " : "") << scenario.distances_m[i];
        }
        std::printf("  %-22s %s -> %s  burst %d  distances [%s]\n", name.c_str(),
                    scenario.initiator.name.c_str(), scenario.responder.name.c_str(),
                    scenario.session.burst_size, distances.str().c_str());
    }
}

void print_summary(const ftmsim::harness::ResultSet& results) {
    std::printf("scenario %s  seed %llu  config %s\n", results.scenario_name.c_str(),
                static_cast<unsigned long long>(results.seed), results.config_name.c_str());
    for (const auto& per_distance : results.distances) {
        if (per_distance.all_dropped) {
            std::printf("  %7.4f m: all %d samples dropped\n", per_distance.true_distance_m,
                        per_distance.dropped_samples);
            continue;
        }
        const auto& stats = per_distance.stats;
        std::printf(
            "  %7.4f m: %3zu samples (%d dropped)  mean %8.4f m  std %7.4f m  "
            "mae %7.4f m  p90 %7.4f m\n",
            per_distance.true_distance_m, per_distance.samples.size(),
            per_distance.dropped_samples, stats.mean_est_m, stats.std_est_m,
            stats.mean_abs_error_m, stats.p90_abs_error_m);
    }
}

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::optional<std::uint64_t>& seed_override) {
    const ftmsim::harness::Scenario scenario = load(config_path, seed_override);
    const ftmsim::harness::ResultSet results = ftmsim::harness::run_scenario(scenario);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path csv_path =
        std::filesystem::path(out_dir) /
        (results.scenario_name + "_" + std::to_string(results.seed) + ".csv");
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + csv_path.string() + "'");
    }
    out << ftmsim::harness::export_csv(results);
    out.close();

    print_summary(results);
    std::printf("csv: %s\n", csv_path.string().c_str());
    return kExitOk;
}

int attack_command(const std::string& config_path) {
    const ftmsim::harness::Scenario scenario = load(config_path, std::nullopt);
    if (!scenario.attacker.has_value()) {
        throw ftmsim::ValidationError("scenario configures no attacker");
    }
    const ftmsim::harness::ResultSet results = ftmsim::harness::run_scenario(scenario);
    std::fputs(results.attack_report.c_str(), stdout);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic Wi-Fi FTM round-trip ranging simulator"};
    app.require_subcommand(1);

    CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in profiles and scenarios");

    std::string run_config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario, write CSV, print a summary");
    run_cmd->add_option("--config", run_config, "scenario config file")->required();
    run_cmd->add_option("--out", out_dir, "output directory for the CSV");
    run_cmd->add_option("--seed", seed_override, "override the scenario seed");

    std::string attack_config;
    CLI::App* attack_cmd =
        app.add_subcommand("attack", "run the scenario's attacker and print the outcome report");
    attack_cmd->add_option("--config", attack_config, "scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (presets_cmd->parsed()) {
            print_presets();
            return kExitOk;
        }
        if (run_cmd->parsed()) {
            return run_command(run_config, out_dir, seed_override);
        }
        return attack_command(attack_config);
    } catch (const ftmsim::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ftmsim::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ftmsim::UnknownPreset& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}
