// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ftmsim/errors.hpp"

namespace ftmsim::protocol {

namespace {

// Appends one on-air frame to the capture sink, stamped with the true
// transmission instant converted to whole microseconds.
void log_frame(ExchangeEnv* env, const wire::FtmFrame& frame, double true_time_ps) {
    if (env == nullptr || env->frame_log == nullptr) {
        return;
    }
    wire::CapturedFrame captured;
    captured.capture_time_us = static_cast<std::uint64_t>(
        std::llround(std::max(0.0, true_time_ps) / 1.0e6));
    captured.bytes = wire::encode_frame(frame);
    env->frame_log->push_back(captured);
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void validate_session(const SessionConfig& session) {
    if (session.burst_size < 1 || session.burst_size > 255) {
        throw ValidationError("burst_size must be in [1, 255]");
    }
    if (session.mode == SessionMode::Single && session.burst_size != 1) {
        throw ValidationError("single mode requires burst_size 1");
    }
    if (!(session.turnaround_ns > 0.0)) {
        throw ValidationError("turnaround_ns must be positive");
    }
    if (session.inter_measurement_ns < 0.0) {
        throw ValidationError("inter_measurement_ns must be non-negative");
    }
    if (session.protected_frames && !session.key.has_value()) {
        throw ValidationError("protected session requires an authentication key");
    }
}

double compute_rtt_ps(double t1_ps, double t2_ps, double t3_ps, double t4_ps) {
    return (t4_ps - t1_ps) + (t2_ps - t3_ps);
}

double rtt_to_distance_m(double rtt_ps) {
    return rtt_ps * 1.0e-12 * kSpeedOfLightMps / 2.0;
}

double burst_estimate_m(const BurstResult& burst, const SessionConfig& session) {
    if (burst.records.empty()) {
        throw EmptySample("burst holds no delivered measurements");
    }
    if (!session.use_median) {
        return burst.mean_distance_m;
    }
    std::vector<double> distances;
    distances.reserve(burst.records.size());
    for (const auto& record : burst.records) {
        distances.push_back(record.distance_m);
    }
    return median_of(std::move(distances));
}

const char* reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::ProtectionMismatch:
            return "PROTECTION_MISMATCH";
    }
    std::abort();  // unreachable: all enumerators handled above
}

Negotiation negotiate(const wire::FtmFrame& request, const SessionConfig& responder_limits) {
    if (request.frame_type != wire::FrameType::FtmRequest) {
        throw ProtocolViolation("negotiation expects an FTM request frame");
    }
    wire::validate_frame(request);

    Negotiation result;
    if (request.protected_flag != responder_limits.protected_frames) {
        result.accepted = false;
        result.reject_reason = RejectReason::ProtectionMismatch;
        return result;
    }

    result.accepted = true;
    result.granted_burst_size =
        std::min<int>(request.burst_size, responder_limits.burst_size);

    wire::FtmFrame ack;
    ack.frame_type = wire::FrameType::Ack;
    ack.dialog_token = request.dialog_token;
    ack.burst_size = static_cast<std::uint8_t>(result.granted_burst_size);
    ack.t1_ps = 0;
    ack.packet_number = 0;
    if (responder_limits.protected_frames && responder_limits.key.has_value()) {
        wire::protect_frame(ack, *responder_limits.key);
    }
    result.ack = ack;
    return result;
}

FrameCheck check_incoming_ftm(const wire::FtmFrame& frame, const SessionConfig& session,
                              ExchangeEnv& env) {
    if (session.protected_frames) {
        if (!frame.protected_flag || !session.key.has_value() ||
            !wire::verify_auth_tag(frame, *session.key)) {
            return FrameCheck::BadTag;
        }
    }
    if (session.pn_check) {
        if (env.accepted_ftm_pns.count(frame.packet_number) != 0) {
            return FrameCheck::DuplicatePn;
        }
        env.accepted_ftm_pns.insert(frame.packet_number);
    }
    return FrameCheck::Accepted;
}

MeasurementRecord run_single_exchange(const phy::DeviceProfile& initiator,
                                      const phy::DeviceProfile& responder,
                                      const phy::ChannelModel& channel, double distance_m,
                                      const SessionConfig& session, phy::Rng& rng,
                                      ExchangeEnv* env) {
    validate_session(session);
    phy::validate_device(initiator);
    phy::validate_device(responder);
    phy::validate_channel(channel);
    if (distance_m < 0.01) {
        throw ValidationError("measurement distance must be at least 0.01 m");
    }

    ExchangeEnv local_env;
    if (env == nullptr) {
        env = &local_env;
    }
    const bool ideal = session.ideal_timing;
    // Reception timestamps are corrected by the expected quantization delay,
    // mirroring the per-device factory calibration real chipsets apply.
    const double cal_initiator =
        ideal ? 0.0 : static_cast<double>(phy::expected_quantization_delay_ps(initiator));
    const double cal_responder =
        ideal ? 0.0 : static_cast<double>(phy::expected_quantization_delay_ps(responder));
    const double prop_ps = phy::propagation_delay_ps(distance_m);

    MeasurementRecord record;

    // --- measurement frame, responder -> initiator --------------------------
    const double ftm_departure_ps = env->now_ps;
    const double t1 = phy::clock_read_ps(ftm_departure_ps, responder.clock, !ideal) +
                      env->rogue_t1_bias_ps;

    wire::FtmFrame ftm;
    ftm.frame_type = wire::FrameType::Ftm;
    ftm.dialog_token = env->dialog_token;
    ftm.burst_size = static_cast<std::uint8_t>(session.burst_size);
    ftm.t1_ps = static_cast<std::uint64_t>(std::llround(std::max(0.0, t1)));
    ftm.packet_number = env->responder_pn++;
    if (session.protected_frames) {
        wire::protect_frame(ftm, *session.key);
    }
    log_frame(env, ftm, ftm_departure_ps);

    const double ftm_rssi = phy::rssi_at(distance_m, channel, responder.tx_power_dbm, rng);
    if (!phy::frame_delivered(ftm_rssi, initiator)) {
        throw NoResponse("measurement frame below receiver sensitivity");
    }

    switch (check_incoming_ftm(ftm, session, *env)) {
        case FrameCheck::Accepted:
            break;
        case FrameCheck::BadTag:
            throw ReplayRejected("measurement frame failed tag verification");
        case FrameCheck::DuplicatePn:
            throw ReplayRejected("measurement frame reused a packet number");
    }

    const double det_initiator =
        phy::detection_delay_ps(initiator, channel, distance_m, rng, ideal);
    const double ftm_detect_ps = ftm_departure_ps + prop_ps + det_initiator;
    const double t2 = phy::clock_read_ps(ftm_detect_ps, initiator.clock, !ideal) - cal_initiator;

    // --- acknowledgment, initiator -> responder -----------------------------
    // The turnaround is realized on the initiator's clock: it transmits when
    // its corrected clock shows t3, so (t2 - t3) is exact by construction.
    const double t3 = t2 + session.turnaround_ns * 1000.0;
    const double ack_departure_ps = phy::clock_invert_ps(t3, initiator.clock);

    wire::FtmFrame ack;
    ack.frame_type = wire::FrameType::Ack;
    ack.dialog_token = env->dialog_token;
    ack.burst_size = 0;
    ack.t1_ps = 0;
    ack.packet_number = env->initiator_pn++;
    if (session.protected_frames) {
        wire::protect_frame(ack, *session.key);
    }
    log_frame(env, ack, ack_departure_ps);

    const double ack_rssi = phy::rssi_at(distance_m, channel, initiator.tx_power_dbm, rng);
    if (!phy::frame_delivered(ack_rssi, responder)) {
        throw NoResponse("acknowledgment below receiver sensitivity");
    }

    const double det_responder =
        phy::detection_delay_ps(responder, channel, distance_m, rng, ideal);
    const double ack_detect_ps = ack_departure_ps + prop_ps + det_responder;
    const double t4 = phy::clock_read_ps(ack_detect_ps, responder.clock, !ideal) - cal_responder;

    record.t1_ps = t1;
    record.t2_ps = t2;
    record.t3_ps = t3;
    record.t4_ps = t4;
    record.rtt_ps = compute_rtt_ps(t1, t2, t3, t4);
    record.distance_m = rtt_to_distance_m(record.rtt_ps);
    record.rssi_dbm = ftm_rssi;
    env->now_ps = ack_detect_ps;
    return record;
}

BurstResult run_burst(const phy::DeviceProfile& initiator, const phy::DeviceProfile& responder,
                      const phy::ChannelModel& channel, double distance_m,
                      const SessionConfig& session, phy::Rng& rng, ExchangeEnv* env) {
    validate_session(session);

    ExchangeEnv local_env;
    if (env == nullptr) {
        env = &local_env;
    }

    BurstResult burst;
    for (int i = 0; i < session.burst_size; ++i) {
        if (i > 0) {
            env->now_ps += session.inter_measurement_ns * 1000.0;
        }
        try {
            MeasurementRecord record =
                run_single_exchange(initiator, responder, channel, distance_m, session, rng, env);
            record.measurement_index = i;
            burst.records.push_back(record);
        } catch (const NoResponse&) {
            ++burst.dropped_count;
        }
    }

    if (burst.records.empty()) {
        throw AllFramesDropped("no measurement in the burst was delivered");
    }

    double sum = 0.0;
    for (const auto& record : burst.records) {
        sum += record.distance_m;
    }
    burst.mean_distance_m = sum / static_cast<double>(burst.records.size());

    double sq = 0.0;
    for (const auto& record : burst.records) {
        const double d = record.distance_m - burst.mean_distance_m;
        sq += d * d;
    }
    burst.std_distance_m = std::sqrt(sq / static_cast<double>(burst.records.size()));
    return burst;
}

}  // namespace ftmsim::protocol
