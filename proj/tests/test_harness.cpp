// Copyright 2026 The ftmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ftmsim/errors.hpp"
#include "ftmsim/harness.hpp"
#include "ftmsim/wire.hpp"

using namespace ftmsim;
using namespace ftmsim::harness;

namespace {

// A small, fully deterministic scenario: clean channel, drift-free default
// clocks, ideal timing. Estimates equal the true distance exactly.
std::string exact_config_text() {
    return "name = exact\n"
           "seed = 3\n"
           "duration_s = 1\n"
           "sample_interval_ms = 500\n"
           "distances_m = [5.0]\n"
           "session.mode = burst\n"
           "session.burst_size = 2\n"
           "session.ideal_timing = true\n";
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) {
        if (c == '\n') {
            ++lines;
        }
    }
    return lines;
}

}  // namespace

TEST_CASE("builtin device presets carry the documented radio parameters") {
    const PresetCatalog& catalog = builtin_presets();

    const auto& pixel = catalog.devices.at("pixel4a_wcn3990");
    CHECK(pixel.band_mhz == 5745);
    CHECK(pixel.bandwidth_mhz == 80);
    CHECK(pixel.antennas == 2);
    CHECK(pixel.near_field_range_m == doctest::Approx(0.0));

    const auto& ap = catalog.devices.at("google_ap_qca4019");
    CHECK(ap.band_mhz == 5745);
    CHECK(ap.bandwidth_mhz == 80);
    CHECK(ap.antennas == 4);
    CHECK(ap.near_field_range_m == doctest::Approx(0.0));

    const auto& esp = catalog.devices.at("esp32s2");
    CHECK(esp.band_mhz == 2412);
    CHECK(esp.bandwidth_mhz == 20);
    CHECK(esp.near_field_range_m > 0.0);

    const auto& pixel_ht20 = catalog.devices.at("pixel4a_wcn3990_ht20");
    CHECK(pixel_ht20.band_mhz == 2412);
    CHECK(pixel_ht20.bandwidth_mhz == 20);
    CHECK(pixel_ht20.antennas == pixel.antennas);
    CHECK(pixel_ht20.near_field_range_m > 0.0);

    // Every preset clock drifts a little; none beyond commodity crystal spec.
    for (const auto& [name, device] : catalog.devices) {
        CHECK(std::abs(device.clock.drift_ppm) <= 20.0);
        CHECK(device.clock.offset_ps != 0);
    }
}

TEST_CASE("builtin experiment presets pair devices, channel and burst size") {
    const PresetCatalog& catalog = builtin_presets();

    const Scenario& config1 = catalog.scenarios.at("config1");
    CHECK(config1.initiator.name == "pixel4a_wcn3990");
    CHECK(config1.responder.name == "google_ap_qca4019");
    CHECK(config1.initiator.bandwidth_mhz == 80);
    CHECK(config1.session.burst_size == 8);
    CHECK(config1.session.mode == protocol::SessionMode::Burst);
    CHECK(config1.distances_m == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(config1.channel.pathloss_exponent_n == doctest::Approx(3.0));

    const Scenario& config2 = catalog.scenarios.at("config2");
    CHECK(config2.initiator.name == "esp32s2");
    CHECK(config2.responder.name == "esp32s2");
    CHECK(config2.initiator.bandwidth_mhz == 20);
    CHECK(config2.session.burst_size == 2);

    const Scenario& config3 = catalog.scenarios.at("config3");
    CHECK(config3.initiator.name == "pixel4a_wcn3990_ht20");
    CHECK(config3.session.burst_size == 8);

    for (const std::string name : {"config1", "config2", "config3"}) {
        const Scenario& indoor = catalog.scenarios.at(name);
        const Scenario& outdoor = catalog.scenarios.at(name + "_outdoor");
        CHECK(indoor.distances_m == std::vector<double>{0.5, 1.0, 1.5});
        CHECK(outdoor.distances_m == std::vector<double>{3.0, 5.0, 10.0});
        CHECK(outdoor.channel.pathloss_exponent_n == doctest::Approx(2.0));
        CHECK(indoor.duration_s == doctest::Approx(25.0));
        CHECK(indoor.sample_interval_ms == doctest::Approx(380.0));
        CHECK(indoor.config_name == name);
        CHECK(outdoor.session.burst_size == indoor.session.burst_size);
        CHECK_NOTHROW(validate_scenario(indoor));
        CHECK_NOTHROW(validate_scenario(outdoor));
    }
}

TEST_CASE("a preset name is a complete scenario description") {
    const Scenario scenario = load_scenario("preset = config1\n");
    CHECK(scenario.name == "config1");
    CHECK(scenario.config_name == "config1");
    CHECK(scenario.seed == 0);
    CHECK(scenario.duration_s == doctest::Approx(25.0));
    CHECK(scenario.sample_interval_ms == doctest::Approx(380.0));
    CHECK(scenario.session.burst_size == 8);
}

TEST_CASE("scenario text may rename and override a preset") {
    const Scenario scenario = load_scenario(
        "name = office_test   # comment survives nowhere\n"
        "preset = config2\n"
        "seed = 42\n"
        "duration_s = 2\n"
        "distances_m = [1.0, 2.0]\n"
        "session.burst_size = 4\n"
        "session.mode = burst\n"
        "channel.rssi_noise_db_std = 0\n"
        "responder.tx_power_dbm = 19.5\n");
    CHECK(scenario.name == "office_test");
    CHECK(scenario.config_name == "config2");  // provenance sticks to the preset
    CHECK(scenario.seed == 42);
    CHECK(scenario.duration_s == doctest::Approx(2.0));
    CHECK(scenario.distances_m == std::vector<double>{1.0, 2.0});
    CHECK(scenario.session.burst_size == 4);
    CHECK(scenario.channel.rssi_noise_db_std == doctest::Approx(0.0));
    CHECK(scenario.responder.tx_power_dbm == doctest::Approx(19.5));
    CHECK(scenario.initiator.name == "esp32s2");
}

TEST_CASE("scenario parser reports failures with line numbers and kinds") {
    CHECK_THROWS_AS(load_scenario("preset = nope\n"), UnknownPreset);
    CHECK_THROWS_AS(load_scenario("initiator = unknown_device\ndistances_m = [1]\n"),
                    UnknownPreset);
    CHECK_THROWS_AS(load_scenario("channel = underwater\ndistances_m = [1]\n"), UnknownPreset);

    try {
        load_scenario("distances_m = [1]\n\nthis line has no equals sign\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nwhatever = 3\n"), ParseError);
    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nseed = twelve\n"), ParseError);
    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nsession.pn_check = yes\n"), ParseError);
    CHECK_THROWS_AS(load_scenario("distances_m = [1,,2]\n"), ParseError);
    CHECK_THROWS_AS(load_scenario("distances_m = 1 2 3\n"), ParseError);

    // Structural problems surface as validation, not parse, failures.
    CHECK_THROWS_AS(load_scenario("distances_m = []\n"), ValidationError);
    CHECK_THROWS_AS(load_scenario("seed = 1\n"), ValidationError);  // no distances at all
    CHECK_THROWS_AS(load_scenario("distances_m = [0.001]\n"), ValidationError);
    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nsession.protected = true\n"),
                    ValidationError);
    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nduration_s = 0\n"), ValidationError);
}

TEST_CASE("session keys parse from hex") {
    const Scenario scenario = load_scenario(
        "distances_m = [1.0]\n"
        "session.protected = true\n"
        "session.key_hex = 000102030405060708090a0b0c0d0e0f\n");
    REQUIRE(scenario.session.key.has_value());
    CHECK((*scenario.session.key)[0] == 0x00);
    CHECK((*scenario.session.key)[15] == 0x0F);

    CHECK_THROWS_AS(load_scenario("distances_m = [1]\nsession.key_hex = abcd\n"), ParseError);
    CHECK_THROWS_AS(
        load_scenario("distances_m = [1]\nsession.key_hex = 0g0102030405060708090a0b0c0d0e0f\n"),
        ParseError);
}

TEST_CASE("sample count law") {
    Scenario scenario;
    scenario.distances_m = {1.0};
    CHECK(samples_per_distance(scenario) == 66);  // default 25 s at 380 ms

    scenario.duration_s = 1.0;
    scenario.sample_interval_ms = 500.0;
    CHECK(samples_per_distance(scenario) == 3);  // ticks at 0, 500, 1000 ms

    scenario.duration_s = 0.999;
    CHECK(samples_per_distance(scenario) == 2);
}

TEST_CASE("per-sample seeds are deterministic and well spread") {
    CHECK(sample_seed(7, 5.0, 3) == sample_seed(7, 5.0, 3));

    std::set<std::uint64_t> seen;
    for (double d : {0.5, 1.0, 1.5, 3.0, 5.0, 10.0}) {
        for (int j = 0; j < 66; ++j) {
            seen.insert(sample_seed(0, d, j));
        }
    }
    CHECK(seen.size() == 6 * 66);  // no collisions across the whole default grid

    CHECK(sample_seed(0, 5.0, 1) != sample_seed(1, 5.0, 1));
    CHECK(sample_seed(0, 5.0, 1) != sample_seed(0, 5.0, 2));
    CHECK(sample_seed(0, 5.0, 1) != sample_seed(0, 3.0, 1));
}

TEST_CASE("a clean ideal scenario estimates every distance exactly") {
    const Scenario scenario = load_scenario(exact_config_text());
    const ResultSet results = run_scenario(scenario);

    REQUIRE(results.distances.size() == 1);
    const DistanceResult& at5 = results.distances.front();
    CHECK(at5.true_distance_m == doctest::Approx(5.0));
    CHECK(at5.samples.size() == 3);
    CHECK(at5.dropped_samples == 0);
    CHECK_FALSE(at5.all_dropped);
    for (const SampleRow& row : at5.samples) {
        // Session epochs sit around 1e13 ps, where a double resolves ~0.01 ps;
        // timestamp formation therefore carries a few-micrometre granularity.
        CHECK(row.est_distance_m == doctest::Approx(5.0).epsilon(1e-5));
        CHECK(row.burst_std_m == doctest::Approx(0.0));
        CHECK(row.dropped == 0);
    }
    CHECK(at5.stats.n_samples == 3);
    CHECK(at5.stats.mean_abs_error_m == doctest::Approx(0.0));

    // Sample ticks land at the configured cadence.
    CHECK(at5.samples[0].elapsed_ms == doctest::Approx(0.0));
    CHECK(at5.samples[1].elapsed_ms == doctest::Approx(500.0));
    CHECK(at5.samples[2].elapsed_ms == doctest::Approx(1000.0));
}

TEST_CASE("the on-air capture holds the negotiation plus every exchange") {
    const ResultSet results = run_scenario(load_scenario(exact_config_text()));
    const auto capture = wire::parse_frame_log(results.frame_log_text);
    // 1 FTMR + 1 grant, then 3 samples x 2 measurements x (FTM + ACK).
    REQUIRE(capture.size() == 2 + 3 * 2 * 2);
    CHECK(wire::decode_frame(capture[0].bytes).frame_type == wire::FrameType::FtmRequest);
    CHECK(wire::decode_frame(capture[1].bytes).frame_type == wire::FrameType::Ack);
    CHECK(wire::decode_frame(capture[2].bytes).frame_type == wire::FrameType::Ftm);
    CHECK(wire::decode_frame(capture[3].bytes).frame_type == wire::FrameType::Ack);

    // Packet numbers start at zero per transmitter and never repeat.
    CHECK(wire::decode_frame(capture[0].bytes).packet_number == 0);  // initiator's FTMR
    CHECK(wire::decode_frame(capture[1].bytes).packet_number == 0);  // responder's grant
    std::set<std::uint32_t> responder_pns;
    for (const auto& frame : capture) {
        const wire::FtmFrame decoded = wire::decode_frame(frame.bytes);
        if (decoded.frame_type == wire::FrameType::Ftm) {
            CHECK(responder_pns.insert(decoded.packet_number).second);
        }
    }
    CHECK(responder_pns.size() == 6);
}

TEST_CASE("identical scenarios export byte-identical CSV") {
    const Scenario noisy = load_scenario(
        "preset = config2\n"
        "duration_s = 2\n"
        "seed = 9\n");
    const std::string a = export_csv(run_scenario(noisy));
    const std::string b = export_csv(run_scenario(noisy));
    CHECK(a == b);
    CHECK(count_lines(a) == 1 + 3 * samples_per_distance(noisy));
}

TEST_CASE("reordering the distance list does not change per-distance results") {
    Scenario forward = load_scenario(
        "preset = config2\n"
        "duration_s = 2\n"
        "seed = 5\n");
    Scenario backward = forward;
    backward.distances_m = {1.5, 1.0, 0.5};

    const ResultSet fwd = run_scenario(forward);
    const ResultSet bwd = run_scenario(backward);
    REQUIRE(fwd.distances.size() == 3);
    REQUIRE(bwd.distances.size() == 3);
    for (const DistanceResult& lhs : fwd.distances) {
        for (const DistanceResult& rhs : bwd.distances) {
            if (lhs.true_distance_m != rhs.true_distance_m) {
                continue;
            }
            REQUIRE(lhs.samples.size() == rhs.samples.size());
            for (std::size_t i = 0; i < lhs.samples.size(); ++i) {
                CHECK(lhs.samples[i].est_distance_m == rhs.samples[i].est_distance_m);
                CHECK(lhs.samples[i].rtt_ps == rhs.samples[i].rtt_ps);
                CHECK(lhs.samples[i].rssi_dbm == rhs.samples[i].rssi_dbm);
            }
        }
    }
}

TEST_CASE("CSV carries the documented header and formatting") {
    const ResultSet results = run_scenario(load_scenario(exact_config_text()));
    const std::string csv = export_csv(results);

    std::istringstream stream(csv);
    std::string header;
    std::getline(stream, header);
    CHECK(header ==
          "scenario,seed,config_name,true_distance_m,sample_index,elapsed_ms,est_distance_m,"
          "rtt_ps,rssi_dbm,burst_std_m,dropped");

    std::string first_row;
    std::getline(stream, first_row);
    std::istringstream fields(first_row);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(fields, col, ',')) {
        cols.push_back(col);
    }
    REQUIRE(cols.size() == 11);
    CHECK(cols[0] == "exact");
    CHECK(cols[1] == "3");
    CHECK(cols[2] == "custom");
    CHECK(cols[3] == "5.0000");
    CHECK(cols[4] == "0");
    CHECK(cols[5] == "0.0000");
    CHECK(cols[6] == "5.0000");
    CHECK(cols[10] == "0");
    // Four-decimal fixed point everywhere a float lands.
    for (int i : {3, 5, 6, 7, 8, 9}) {
        const auto dot = cols[static_cast<std::size_t>(i)].find('.');
        REQUIRE(dot != std::string::npos);
        CHECK(cols[static_cast<std::size_t>(i)].size() - dot - 1 == 4);
    }
}

TEST_CASE("a distance nobody can hear yields one flagged summary row") {
    const Scenario scenario = load_scenario(
        "name = deaf\n"
        "duration_s = 1\n"
        "sample_interval_ms = 500\n"
        "distances_m = [2.0, 5.0]\n"
        "initiator.rx_sensitivity_dbm = -50\n");  // hears 2 m (-46 dBm), misses 5 m (-54 dBm)
    const ResultSet results = run_scenario(scenario);
    REQUIRE(results.distances.size() == 2);
    CHECK_FALSE(results.distances[0].all_dropped);
    CHECK(results.distances[1].all_dropped);
    CHECK(results.distances[1].dropped_samples == 3);
    CHECK(results.distances[1].samples.empty());

    const std::string csv = export_csv(results);
    CHECK(csv.find("deaf,0,custom,5.0000,-1,") != std::string::npos);
    CHECK(csv.find(",all\n") != std::string::npos);
    // The audible distance still contributes ordinary rows.
    CHECK(csv.find("deaf,0,custom,2.0000,0,") != std::string::npos);
}

TEST_CASE("sniffer attack reads unprotected captures and nothing else") {
    const std::string base = exact_config_text();
    const ResultSet open_run =
        run_scenario(load_scenario(base + "attacker.kind = sniffer\n"));
    REQUIRE(open_run.attacks.size() == 1);
    CHECK(open_run.attacks[0].succeeded);
    CHECK(open_run.attacks[0].mechanism == "ACCEPTED_CLEARTEXT_READ");
    CHECK(open_run.attack_report.find("attacker: sniffer\n") == 0);
    CHECK(open_run.attack_report.find(" FTM ") != std::string::npos);
    CHECK(open_run.attack_report.find("succeeded=1") != std::string::npos);

    const ResultSet sealed_run = run_scenario(load_scenario(
        base +
        "session.protected = true\n"
        "session.key_hex = 00112233445566778899aabbccddeeff\n"
        "attacker.kind = sniffer\n"));
    REQUIRE(sealed_run.attacks.size() == 1);
    CHECK_FALSE(sealed_run.attacks[0].succeeded);
    CHECK(sealed_run.attacks[0].mechanism == "REDACTED_PROTECTED");
    CHECK(sealed_run.attack_report.find("REDACTED UNVERIFIED") != std::string::npos);
    CHECK(sealed_run.attack_report.find("succeeded=0") != std::string::npos);
}

TEST_CASE("replay attack outcome pivots on duplicate detection") {
    const std::string base = exact_config_text();
    const ResultSet open_run = run_scenario(load_scenario(
        base +
        "attacker.kind = replayer\n"
        "attacker.replay_delay_samples = 1\n"));
    REQUIRE(open_run.attacks.size() == 1);
    CHECK(open_run.attacks[0].succeeded);
    CHECK(open_run.attacks[0].mechanism == "ACCEPTED_NO_PN_CHECK");
    CHECK(open_run.attack_report.find("captured_pn:") != std::string::npos);

    const ResultSet guarded_run = run_scenario(load_scenario(
        base +
        "session.pn_check = true\n"
        "attacker.kind = replayer\n"
        "attacker.replay_delay_samples = 1\n"));
    REQUIRE(guarded_run.attacks.size() == 1);
    CHECK_FALSE(guarded_run.attacks[0].succeeded);
    CHECK(guarded_run.attacks[0].mechanism == "REJECTED_DUPLICATE_PN");
}

TEST_CASE("rogue responder attack reports the analytic shift") {
    const ResultSet results = run_scenario(load_scenario(
        exact_config_text() +
        "attacker.kind = rogue_responder\n"
        "attacker.t1_bias_ps = 66712\n"));
    REQUIRE(results.attacks.size() == 1);
    CHECK(results.attacks[0].succeeded);
    CHECK(results.attacks[0].mechanism == "ACCEPTED_FORGED_T1");
    CHECK(results.attacks[0].induced_distance_error_m ==
          doctest::Approx(-9.9998772).epsilon(1e-6));
    CHECK(results.attack_report.find("t1_bias_ps: 66712") != std::string::npos);
    CHECK(results.attack_report.find("induced_error_m=-9.9999") != std::string::npos);
}

TEST_CASE("scenario validation composes the per-module validators") {
    Scenario scenario = load_scenario(exact_config_text());
    CHECK_NOTHROW(validate_scenario(scenario));

    Scenario bad_interval = scenario;
    bad_interval.sample_interval_ms = 0.0;
    CHECK_THROWS_AS(validate_scenario(bad_interval), ValidationError);

    Scenario bad_device = scenario;
    bad_device.initiator.bandwidth_mhz = 17;
    CHECK_THROWS_AS(validate_scenario(bad_device), ValidationError);

    Scenario bad_channel = scenario;
    bad_channel.channel.pathloss_exponent_n = 0.0;
    CHECK_THROWS_AS(validate_scenario(bad_channel), ValidationError);

    Scenario bad_attacker = scenario;
    bad_attacker.attacker.emplace();
    bad_attacker.attacker->kind = adversary::AttackerKind::Sniffer;
    bad_attacker.attacker->t1_bias_ps = 5;
    CHECK_THROWS_AS(validate_scenario(bad_attacker), ValidationError);
}
