// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/harness.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ftmsim/errors.hpp"
#include "ftmsim/wire.hpp"

namespace ftmsim::harness {

namespace {

// Sessions start well past the epoch so even clocks with large negative
// offsets produce positive readings that fit the frame's unsigned field.
constexpr double kStartEpochPs = 1.0e10;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) {
            throw ParseError("trailing characters after number in '" + key + "'");
        }
        return parsed;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("expected a number for '" + key + "', got '" + value + "'");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    long long parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ParseError("expected an integer for '" + key + "', got '" + value + "'");
    }
    return parsed;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    std::uint64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ParseError("expected an unsigned integer for '" + key + "', got '" + value + "'");
    }
    return parsed;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true") {
        return true;
    }
    if (value == "false") {
        return false;
    }
    throw ParseError("expected true or false for '" + key + "', got '" + value + "'");
}

int hex_nibble(char c, const std::string& key) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    throw ParseError("invalid hex digit in '" + key + "'");
}

wire::AuthKey parse_key_hex(const std::string& value, const std::string& key) {
    if (value.size() != 2 * wire::kKeyLen) {
        throw ParseError("'" + key + "' must be " + std::to_string(2 * wire::kKeyLen) +
                         " hex characters");
    }
    wire::AuthKey parsed{};
    for (std::size_t i = 0; i < wire::kKeyLen; ++i) {
        parsed[i] = static_cast<std::uint8_t>(16 * hex_nibble(value[2 * i], key) +
                                              hex_nibble(value[2 * i + 1], key));
    }
    return parsed;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
        throw ParseError("expected a [..] list for '" + key + "'");
    }
    std::vector<double> list;
    const std::string inner = trim(value.substr(1, value.size() - 2));
    if (inner.empty()) {
        return list;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = inner.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? inner.substr(start) : inner.substr(start, comma - start));
        if (item.empty()) {
            throw ParseError("empty element in list '" + key + "'");
        }
        list.push_back(parse_double(item, key));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return list;
}

void set_device_field(phy::DeviceProfile& device, const std::string& field,
                      const std::string& value, const std::string& key) {
    if (field == "name") {
        device.name = value;
    } else if (field == "band_mhz") {
        device.band_mhz = static_cast<int>(parse_int(value, key));
    } else if (field == "bandwidth_mhz") {
        device.bandwidth_mhz = static_cast<int>(parse_int(value, key));
    } else if (field == "antennas") {
        device.antennas = static_cast<int>(parse_int(value, key));
    } else if (field == "tx_power_dbm") {
        device.tx_power_dbm = parse_double(value, key);
    } else if (field == "rx_sensitivity_dbm") {
        device.rx_sensitivity_dbm = parse_double(value, key);
    } else if (field == "offset_ps") {
        device.clock.offset_ps = parse_int(value, key);
    } else if (field == "drift_ppm") {
        device.clock.drift_ppm = parse_double(value, key);
    } else if (field == "near_field_range_m") {
        device.near_field_range_m = parse_double(value, key);
    } else if (field == "near_field_bias_ns") {
        device.near_field_bias_ns = parse_double(value, key);
    } else {
        throw ParseError("unknown device field '" + key + "'");
    }
}

void set_channel_field(phy::ChannelModel& channel, const std::string& field,
                       const std::string& value, const std::string& key) {
    if (field == "pathloss_exponent_n") {
        channel.pathloss_exponent_n = parse_double(value, key);
    } else if (field == "rssi_ref_dbm_a") {
        channel.rssi_ref_dbm_a = parse_double(value, key);
    } else if (field == "ref_tx_power_dbm") {
        channel.ref_tx_power_dbm = parse_double(value, key);
    } else if (field == "multipath_mean_excess_ns") {
        channel.multipath_mean_excess_ns = parse_double(value, key);
    } else if (field == "fac_residual") {
        channel.fac_residual = parse_double(value, key);
    } else if (field == "rssi_noise_db_std") {
        channel.rssi_noise_db_std = parse_double(value, key);
    } else {
        throw ParseError("unknown channel field '" + key + "'");
    }
}

void set_session_field(protocol::SessionConfig& session, bool& mode_explicit,
                       const std::string& field, const std::string& value,
                       const std::string& key) {
    if (field == "mode") {
        if (value == "single") {
            session.mode = protocol::SessionMode::Single;
        } else if (value == "burst") {
            session.mode = protocol::SessionMode::Burst;
        } else {
            throw ParseError("'" + key + "' must be single or burst");
        }
        mode_explicit = true;
    } else if (field == "burst_size") {
        session.burst_size = static_cast<int>(parse_int(value, key));
    } else if (field == "turnaround_ns") {
        session.turnaround_ns = parse_double(value, key);
    } else if (field == "inter_measurement_ns") {
        session.inter_measurement_ns = parse_double(value, key);
    } else if (field == "protected") {
        session.protected_frames = parse_bool(value, key);
    } else if (field == "pn_check") {
        session.pn_check = parse_bool(value, key);
    } else if (field == "key_hex") {
        session.key = parse_key_hex(value, key);
    } else if (field == "use_median") {
        session.use_median = parse_bool(value, key);
    } else if (field == "ideal_timing") {
        session.ideal_timing = parse_bool(value, key);
    } else {
        throw ParseError("unknown session field '" + key + "'");
    }
}

void set_attacker_field(adversary::AttackerConfig& attacker, const std::string& field,
                        const std::string& value, const std::string& key) {
    if (field == "kind") {
        if (value == "sniffer") {
            attacker.kind = adversary::AttackerKind::Sniffer;
        } else if (value == "replayer") {
            attacker.kind = adversary::AttackerKind::Replayer;
        } else if (value == "rogue_responder") {
            attacker.kind = adversary::AttackerKind::RogueResponder;
        } else {
            throw ParseError("'" + key + "' must be sniffer, replayer or rogue_responder");
        }
    } else if (field == "t1_bias_ps") {
        attacker.t1_bias_ps = parse_int(value, key);
    } else if (field == "replay_delay_samples") {
        attacker.replay_delay_samples = static_cast<int>(parse_int(value, key));
    } else {
        throw ParseError("unknown attacker field '" + key + "'");
    }
}

const phy::DeviceProfile& device_preset(const std::string& name) {
    const auto& catalog = builtin_presets();
    const auto it = catalog.devices.find(name);
    if (it == catalog.devices.end()) {
        throw UnknownPreset("unknown device preset '" + name + "'");
    }
    return it->second;
}

const phy::ChannelModel& channel_preset(const std::string& name) {
    const auto& catalog = builtin_presets();
    const auto it = catalog.channels.find(name);
    if (it == catalog.channels.end()) {
        throw UnknownPreset("unknown channel preset '" + name + "'");
    }
    return it->second;
}

std::string format_fixed4(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

void append_capture(std::vector<wire::CapturedFrame>& capture, const wire::FtmFrame& frame,
                    double true_time_ps) {
    wire::CapturedFrame captured;
    captured.capture_time_us =
        static_cast<std::uint64_t>(std::llround(std::max(0.0, true_time_ps) / 1.0e6));
    captured.bytes = wire::encode_frame(frame);
    capture.push_back(captured);
}

// Runs the configured attacker against the finished capture/session state and
// records the outcome plus a human-readable report.
void run_attack(ResultSet& results, const Scenario& scenario, protocol::ExchangeEnv& env,
                const std::vector<wire::CapturedFrame>& capture) {
    const adversary::AttackerConfig& attacker = *scenario.attacker;
    adversary::validate_attacker(attacker);

    std::ostringstream report;
    report << "attacker: " << adversary::attacker_kind_name(attacker.kind) << '\n';
    adversary::AttackOutcome outcome;

    switch (attacker.kind) {
        case adversary::AttackerKind::Sniffer: {
            // A passive outsider never holds the session key.
            report << adversary::sniff(results.frame_log_text, std::nullopt);
            std::size_t readable = 0;
            for (const auto& captured : capture) {
                const wire::FtmFrame frame = wire::decode_frame(captured.bytes);
                if (frame.frame_type == wire::FrameType::Ftm && !frame.protected_flag) {
                    ++readable;
                }
            }
            outcome.succeeded = readable > 0;
            outcome.mechanism = readable > 0 ? "ACCEPTED_CLEARTEXT_READ" : "REDACTED_PROTECTED";
            break;
        }
        case adversary::AttackerKind::Replayer: {
            const wire::CapturedFrame* first_ftm = nullptr;
            for (const auto& captured : capture) {
                if (wire::decode_frame(captured.bytes).frame_type == wire::FrameType::Ftm) {
                    first_ftm = &captured;
                    break;
                }
            }
            if (first_ftm == nullptr) {
                outcome.succeeded = false;
                outcome.mechanism = "NO_CAPTURE";
                break;
            }
            const wire::FtmFrame frame = wire::decode_frame(first_ftm->bytes);
            report << "captured_pn: " << frame.packet_number << '\n';
            // The classic replay: resend the capture verbatim a few sample
            // ticks after it was recorded.
            env.now_ps = static_cast<double>(first_ftm->capture_time_us) * 1.0e6 +
                         static_cast<double>(attacker.replay_delay_samples) *
                             scenario.sample_interval_ms * 1.0e9;
            outcome = adversary::replay(frame, scenario.session, env, /*key_known=*/false,
                                        /*mutate_pn=*/false);
            break;
        }
        case adversary::AttackerKind::RogueResponder: {
            report << "t1_bias_ps: " << attacker.t1_bias_ps << '\n';
            const double shift = adversary::rogue_t1_bias(
                scenario.initiator, scenario.responder, scenario.channel,
                scenario.distances_m.front(), scenario.session, attacker.t1_bias_ps);
            outcome.succeeded = true;
            outcome.mechanism = "ACCEPTED_FORGED_T1";
            outcome.induced_distance_error_m = shift;
            break;
        }
    }

    report << "outcome: mechanism=" << outcome.mechanism
           << " succeeded=" << (outcome.succeeded ? 1 : 0)
           << " induced_error_m=" << format_fixed4(outcome.induced_distance_error_m) << '\n';
    results.attacks.push_back(outcome);
    results.attack_report = report.str();
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
    if (!(scenario.duration_s > 0.0)) {
        throw ValidationError("duration_s must be positive");
    }
    if (!(scenario.sample_interval_ms > 0.0)) {
        throw ValidationError("sample_interval_ms must be positive");
    }
    if (scenario.distances_m.empty()) {
        throw ValidationError("distances_m must not be empty");
    }
    for (double distance : scenario.distances_m) {
        if (!(distance >= 0.01)) {
            throw ValidationError("every distance must be at least 0.01 m");
        }
    }
    phy::validate_device(scenario.initiator);
    phy::validate_device(scenario.responder);
    phy::validate_channel(scenario.channel);
    protocol::validate_session(scenario.session);
    if (scenario.attacker.has_value()) {
        adversary::validate_attacker(*scenario.attacker);
    }
}

int samples_per_distance(const Scenario& scenario) {
    return static_cast<int>(
               std::floor(scenario.duration_s * 1000.0 / scenario.sample_interval_ms)) +
           1;
}

namespace {

// splitmix64 finalizer over a distance's bit pattern.
std::uint64_t mix_distance_bits(double distance_m) {
    std::uint64_t z = std::bit_cast<std::uint64_t>(distance_m);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t scenario_seed, double distance_m, int sample_index) {
    // Golden-ratio multiplies over the mixed distance bits: any
    // (distance, index) pair lands on an independent stream.
    return scenario_seed ^ (0x9E3779B97F4A7C15ULL * mix_distance_bits(distance_m)) ^
           (0xBF58476D1CE4E5B9ULL * (static_cast<std::uint64_t>(sample_index) + 1));
}

const PresetCatalog& builtin_presets() {
    static const PresetCatalog catalog = [] {
        PresetCatalog c;

        // --- devices -------------------------------------------------------
        // RF and timing calibrations are fitted so simulated error statistics
        // land in the accuracy bands measured for this hardware; they are not
        // datasheet values.
        phy::DeviceProfile pixel_vht80;
        pixel_vht80.name = "pixel4a_wcn3990";
        pixel_vht80.band_mhz = 5745;
        pixel_vht80.bandwidth_mhz = 80;
        pixel_vht80.antennas = 2;
        pixel_vht80.tx_power_dbm = 15.0;
        pixel_vht80.rx_sensitivity_dbm = -92.0;
        pixel_vht80.clock = {271828, 2.1};
        c.devices[pixel_vht80.name] = pixel_vht80;

        phy::DeviceProfile ap;
        ap.name = "google_ap_qca4019";
        ap.band_mhz = 5745;
        ap.bandwidth_mhz = 80;
        ap.antennas = 4;
        ap.tx_power_dbm = 18.0;
        ap.rx_sensitivity_dbm = -95.0;
        ap.clock = {-314159, -1.3};
        c.devices[ap.name] = ap;

        phy::DeviceProfile esp32;
        esp32.name = "esp32s2";
        esp32.band_mhz = 2412;
        esp32.bandwidth_mhz = 20;
        esp32.antennas = 5;   // fitted effective diversity, not physical antennas
        esp32.tx_power_dbm = 13.0;
        esp32.rx_sensitivity_dbm = -88.0;
        esp32.clock = {161803, 8.5};
        esp32.near_field_range_m = 2.0;
        esp32.near_field_bias_ns = 9.5;
        c.devices[esp32.name] = esp32;

        phy::DeviceProfile pixel_ht20 = pixel_vht80;
        pixel_ht20.name = "pixel4a_wcn3990_ht20";
        pixel_ht20.band_mhz = 2412;
        pixel_ht20.bandwidth_mhz = 20;
        pixel_ht20.near_field_range_m = 2.0;
        pixel_ht20.near_field_bias_ns = 9.2;
        c.devices[pixel_ht20.name] = pixel_ht20;

        // --- channels ------------------------------------------------------
        phy::ChannelModel indoor;
        indoor.pathloss_exponent_n = 3.0;
        indoor.rssi_ref_dbm_a = -40.0;
        indoor.ref_tx_power_dbm = 15.0;
        indoor.multipath_mean_excess_ns = 30.0;
        indoor.fac_residual = 0.05;
        indoor.rssi_noise_db_std = 2.0;
        c.channels["indoor"] = indoor;

        phy::ChannelModel outdoor;
        outdoor.pathloss_exponent_n = 2.0;
        outdoor.rssi_ref_dbm_a = -40.0;
        outdoor.ref_tx_power_dbm = 15.0;
        outdoor.multipath_mean_excess_ns = 15.0;
        outdoor.fac_residual = 0.05;
        outdoor.rssi_noise_db_std = 1.5;
        c.channels["outdoor"] = outdoor;

        // --- scenarios -----------------------------------------------------
        const std::vector<double> indoor_distances = {0.5, 1.0, 1.5};
        const std::vector<double> outdoor_distances = {3.0, 5.0, 10.0};

        const auto make_scenario = [&](const std::string& name,
                                       const phy::DeviceProfile& initiator,
                                       const phy::DeviceProfile& responder, bool is_indoor,
                                       int burst_size) {
            Scenario s;
            s.name = name;
            s.config_name = name;
            s.initiator = initiator;
            s.responder = responder;
            s.channel = is_indoor ? indoor : outdoor;
            s.distances_m = is_indoor ? indoor_distances : outdoor_distances;
            s.session.mode =
                burst_size > 1 ? protocol::SessionMode::Burst : protocol::SessionMode::Single;
            s.session.burst_size = burst_size;
            return s;
        };

        c.scenarios["config1"] = make_scenario("config1", pixel_vht80, ap, true, 8);
        c.scenarios["config1_outdoor"] = make_scenario("config1_outdoor", pixel_vht80, ap, false, 8);
        c.scenarios["config2"] = make_scenario("config2", esp32, esp32, true, 2);
        c.scenarios["config2_outdoor"] = make_scenario("config2_outdoor", esp32, esp32, false, 2);
        c.scenarios["config3"] = make_scenario("config3", pixel_ht20, pixel_ht20, true, 8);
        c.scenarios["config3_outdoor"] =
            make_scenario("config3_outdoor", pixel_ht20, pixel_ht20, false, 8);
        return c;
    }();
    return catalog;
}

Scenario load_scenario(const std::string& config_text) {
    const auto& catalog = builtin_presets();
    Scenario scenario;
    scenario.distances_m.clear();
    bool mode_explicit = false;
    bool have_distances = false;

    std::istringstream stream(config_text);
    std::string raw_line;
    int line_number = 0;
    while (std::getline(stream, raw_line)) {
        ++line_number;
        const auto hash = raw_line.find('#');
        if (hash != std::string::npos) {
            raw_line.erase(hash);
        }
        const std::string line = trim(raw_line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(line_number) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("line " + std::to_string(line_number) + ": empty key or value");
        }

        if (key == "name") {
            scenario.name = value;
        } else if (key == "preset") {
            const auto it = catalog.scenarios.find(value);
            if (it == catalog.scenarios.end()) {
                throw UnknownPreset("unknown scenario preset '" + value + "'");
            }
            const std::string kept_name = scenario.name;
            scenario = it->second;
            if (kept_name != "scenario") {
                scenario.name = kept_name;
            }
            have_distances = true;
        } else if (key == "seed") {
            scenario.seed = parse_u64(value, key);
        } else if (key == "duration_s") {
            scenario.duration_s = parse_double(value, key);
        } else if (key == "sample_interval_ms") {
            scenario.sample_interval_ms = parse_double(value, key);
        } else if (key == "distances_m") {
            scenario.distances_m = parse_double_list(value, key);
            have_distances = true;
        } else if (key == "initiator") {
            scenario.initiator = device_preset(value);
        } else if (key == "responder") {
            scenario.responder = device_preset(value);
        } else if (key == "channel") {
            scenario.channel = channel_preset(value);
        } else if (key.rfind("initiator.", 0) == 0) {
            set_device_field(scenario.initiator, key.substr(10), value, key);
        } else if (key.rfind("responder.", 0) == 0) {
            set_device_field(scenario.responder, key.substr(10), value, key);
        } else if (key.rfind("channel.", 0) == 0) {
            set_channel_field(scenario.channel, key.substr(8), value, key);
        } else if (key.rfind("session.", 0) == 0) {
            set_session_field(scenario.session, mode_explicit, key.substr(8), value, key);
        } else if (key.rfind("attacker.", 0) == 0) {
            if (!scenario.attacker.has_value()) {
                scenario.attacker.emplace();
            }
            set_attacker_field(*scenario.attacker, key.substr(9), value, key);
        } else {
            throw ParseError("line " + std::to_string(line_number) + ": unknown key '" + key +
                             "'");
        }
    }

    if (!have_distances) {
        throw ValidationError("scenario must list distances_m or name a preset");
    }
    if (!mode_explicit && scenario.session.burst_size > 1) {
        scenario.session.mode = protocol::SessionMode::Burst;
    }
    validate_scenario(scenario);
    return scenario;
}

ResultSet run_scenario(const Scenario& scenario) {
    validate_scenario(scenario);

    ResultSet results;
    results.scenario_name = scenario.name;
    results.seed = scenario.seed;
    results.config_name = scenario.config_name;

    std::vector<wire::CapturedFrame> capture;
    protocol::ExchangeEnv env;
    env.frame_log = &capture;
    env.now_ps = kStartEpochPs;
    env.dialog_token = 1;

    // One negotiation opens the session: FTMR out, grant back.
    wire::FtmFrame ftmr;
    ftmr.frame_type = wire::FrameType::FtmRequest;
    ftmr.dialog_token = env.dialog_token;
    ftmr.burst_size = static_cast<std::uint8_t>(scenario.session.burst_size);
    ftmr.packet_number = env.initiator_pn++;
    if (scenario.session.protected_frames) {
        wire::protect_frame(ftmr, *scenario.session.key);
    }
    append_capture(capture, ftmr, env.now_ps);

    const protocol::Negotiation negotiation = protocol::negotiate(ftmr, scenario.session);
    if (!negotiation.accepted) {
        throw ProtocolViolation("responder rejected the ranging request");
    }
    wire::FtmFrame grant = negotiation.ack;
    grant.packet_number = env.responder_pn++;
    if (grant.protected_flag) {
        wire::protect_frame(grant, *scenario.session.key);
    }
    append_capture(capture, grant, env.now_ps + 1.0e8);

    const int n_samples = samples_per_distance(scenario);
    const double block_span_ps = (scenario.duration_s * 1000.0 + 1000.0) * 1.0e9;

    for (std::size_t di = 0; di < scenario.distances_m.size(); ++di) {
        const double distance = scenario.distances_m[di];
        // The block's position in absolute time is derived from the distance
        // value, never from its index in distances_m: with drifting clocks the
        // picosecond rounding phase depends on the epoch, so index-based
        // placement would make results depend on list order. A slot collision
        // between two distances is harmless - blocks interact only through
        // packet counters, which advance monotonically either way.
        const double slot = static_cast<double>(mix_distance_bits(distance) % 32);
        const double block_base_ps = kStartEpochPs + 1.0e9 + slot * block_span_ps;

        DistanceResult per_distance;
        per_distance.true_distance_m = distance;
        std::vector<double> estimates;
        estimates.reserve(static_cast<std::size_t>(n_samples));

        for (int j = 0; j < n_samples; ++j) {
            const double elapsed_ms = static_cast<double>(j) * scenario.sample_interval_ms;
            env.now_ps = block_base_ps + elapsed_ms * 1.0e9;
            phy::Rng rng(sample_seed(scenario.seed, distance, j));
            try {
                const protocol::BurstResult burst =
                    protocol::run_burst(scenario.initiator, scenario.responder, scenario.channel,
                                        distance, scenario.session, rng, &env);
                SampleRow row;
                row.sample_index = j;
                row.elapsed_ms = elapsed_ms;
                row.est_distance_m = protocol::burst_estimate_m(burst, scenario.session);
                double rtt_sum = 0.0;
                double rssi_sum = 0.0;
                for (const auto& record : burst.records) {
                    rtt_sum += record.rtt_ps;
                    rssi_sum += record.rssi_dbm;
                }
                const double delivered = static_cast<double>(burst.records.size());
                row.rtt_ps = rtt_sum / delivered;
                row.rssi_dbm = rssi_sum / delivered;
                row.burst_std_m = burst.std_distance_m;
                row.dropped = burst.dropped_count;
                per_distance.samples.push_back(row);
                estimates.push_back(row.est_distance_m);
            } catch (const AllFramesDropped&) {
                ++per_distance.dropped_samples;
            }
        }

        per_distance.all_dropped = per_distance.samples.empty();
        if (!per_distance.all_dropped) {
            per_distance.stats = estimators::summarize(estimates, distance);
        }
        results.distances.push_back(std::move(per_distance));
    }

    results.frame_log_text = wire::format_frame_log(capture);
    if (scenario.attacker.has_value()) {
        run_attack(results, scenario, env, capture);
    }
    return results;
}

std::string export_csv(const ResultSet& results) {
    std::ostringstream csv;
    csv << "scenario,seed,config_name,true_distance_m,sample_index,elapsed_ms,est_distance_m,"
           "rtt_ps,rssi_dbm,burst_std_m,dropped\n";
    for (const auto& per_distance : results.distances) {
        const std::string prefix = results.scenario_name + ',' + std::to_string(results.seed) +
                                   ',' + results.config_name + ',' +
                                   format_fixed4(per_distance.true_distance_m) + ',';
        if (per_distance.all_dropped) {
            csv << prefix << "-1," << format_fixed4(0.0) << ',' << format_fixed4(0.0) << ','
                << format_fixed4(0.0) << ',' << format_fixed4(0.0) << ',' << format_fixed4(0.0)
                << ",all\n";
            continue;
        }
        for (const auto& row : per_distance.samples) {
            csv << prefix << row.sample_index << ',' << format_fixed4(row.elapsed_ms) << ','
                << format_fixed4(row.est_distance_m) << ',' << format_fixed4(row.rtt_ps) << ','
                << format_fixed4(row.rssi_dbm) << ',' << format_fixed4(row.burst_std_m) << ','
                << row.dropped << '\n';
        }
    }
    return csv.str();
}

}  // namespace ftmsim::harness
