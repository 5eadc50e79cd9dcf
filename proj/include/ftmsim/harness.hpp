// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ftmsim/adversary.hpp"
#include "ftmsim/estimators.hpp"
#include "ftmsim/phy.hpp"
#include "ftmsim/protocol.hpp"

namespace ftmsim::harness {

/// A declarative experiment: who ranges with whom, over which channel, at
/// which distances, how often, and under which (optional) attacker.
struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    double duration_s = 25.0;
    double sample_interval_ms = 380.0;
    std::vector<double> distances_m;
    phy::DeviceProfile initiator;
    phy::DeviceProfile responder;
    phy::ChannelModel channel;
    protocol::SessionConfig session;
    std::optional<adversary::AttackerConfig> attacker;
    std::string config_name = "custom";   ///< preset provenance, echoed in the CSV
};

/// Throws ValidationError on an invariant breach.
void validate_scenario(const Scenario& scenario);

/// Samples taken per distance: floor(duration_s*1000 / sample_interval_ms) + 1
/// (the tick at t = 0 is included).
int samples_per_distance(const Scenario& scenario);

/// Deterministic per-sample seed: the scenario seed mixed with the distance
/// value's bits and the sample index via golden-ratio multiplies, so any
/// sample is reproducible in isolation and reordering distances_m permutes
/// but never changes per-distance results.
std::uint64_t sample_seed(std::uint64_t scenario_seed, double distance_m, int sample_index);

/// One CSV data row: one burst at one sample tick.
struct SampleRow {
    int sample_index = 0;
    double elapsed_ms = 0.0;
    double est_distance_m = 0.0;   ///< burst mean (or median when configured)
    double rtt_ps = 0.0;           ///< mean round trip over delivered records
    double rssi_dbm = 0.0;         ///< mean measurement-frame power over delivered records
    double burst_std_m = 0.0;
    int dropped = 0;               ///< dropped measurements within the burst
};

struct DistanceResult {
    double true_distance_m = 0.0;
    std::vector<SampleRow> samples;       ///< fully dropped ticks are omitted
    int dropped_samples = 0;              ///< ticks where the whole burst was lost
    bool all_dropped = false;             ///< no tick delivered anything
    estimators::RangingStats stats;       ///< meaningless when all_dropped
};

struct ResultSet {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string config_name;
    std::vector<DistanceResult> distances;
    std::string frame_log_text;           ///< on-air capture in the wire log format
    std::vector<adversary::AttackOutcome> attacks;
    std::string attack_report;            ///< human-readable attack output
};

/// Named building blocks plus the ready-made experiment configurations
/// (config1/2/3, each with an *_outdoor sibling).
struct PresetCatalog {
    std::map<std::string, phy::DeviceProfile> devices;
    std::map<std::string, phy::ChannelModel> channels;
    std::map<std::string, Scenario> scenarios;
};

const PresetCatalog& builtin_presets();

/// Parses the flat key = value scenario format (see README). Preset names
/// are resolved against builtin_presets(); omitted fields get the documented
/// defaults (duration 25 s, interval 380 ms, seed 0). Throws ParseError,
/// ValidationError or UnknownPreset.
Scenario load_scenario(const std::string& config_text);

/// Runs every distance of the scenario, then the attacker when one is
/// configured. Deterministic for a fixed (scenario, seed); a distance whose
/// every sample is dropped yields a flagged empty-stat entry instead of
/// aborting the batch.
ResultSet run_scenario(const Scenario& scenario);

/// Renders the exact CSV contract: header always present, columns
/// scenario,seed,config_name,true_distance_m,sample_index,elapsed_ms,
/// est_distance_m,rtt_ps,rssi_dbm,burst_std_m,dropped; floats with four
/// decimals. A fully dropped distance contributes no data rows but one
/// summary row with sample_index -1 and dropped=all.
std::string export_csv(const ResultSet& results);

}  // namespace ftmsim::harness
