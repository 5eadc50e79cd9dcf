// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "ftmsim/phy.hpp"
#include "ftmsim/wire.hpp"

namespace ftmsim::protocol {

enum class SessionMode { Single, Burst };

/// Per-session ranging parameters, negotiated once and fixed for the run.
struct SessionConfig {
    SessionMode mode = SessionMode::Single;
    int burst_size = 1;
    double turnaround_ns = 16000.0;        ///< initiator t2 -> t3 processing delay
    double inter_measurement_ns = 100000.0;
    bool protected_frames = false;
    bool pn_check = false;
    std::optional<wire::AuthKey> key;      ///< required when protected_frames
    bool use_median = false;               ///< burst aggregate: median instead of mean
    bool ideal_timing = false;             ///< test hook: continuous time, no quantization,
                                           ///< no picosecond rounding, no calibration
};

/// Throws ValidationError on an inconsistent configuration.
void validate_session(const SessionConfig& session);

/// One timestamp quadruple. t1/t4 are responder-clock readings, t2/t3
/// initiator-clock readings; rtt_ps = (t4 - t1) + (t2 - t3) exactly and
/// distance_m is derived from rtt_ps alone. Values are whole picoseconds
/// except under the ideal-timing hook.
struct MeasurementRecord {
    double t1_ps = 0.0;
    double t2_ps = 0.0;
    double t3_ps = 0.0;
    double t4_ps = 0.0;
    double rtt_ps = 0.0;
    double distance_m = 0.0;
    double rssi_dbm = 0.0;   ///< received power of the measurement frame at the initiator
    int measurement_index = 0;
};

struct BurstResult {
    std::vector<MeasurementRecord> records;  ///< delivered measurements only
    double mean_distance_m = 0.0;
    double std_distance_m = 0.0;             ///< population std over delivered records
    int dropped_count = 0;
};

/// The burst's point estimate: mean by default, median when the session asks.
double burst_estimate_m(const BurstResult& burst, const SessionConfig& session);

/// Eq.-of-motion of the protocol: clock offsets cancel in this combination.
double compute_rtt_ps(double t1_ps, double t2_ps, double t3_ps, double t4_ps);

/// Half the round trip at the speed of light. Negative input gives a negative
/// distance, passed through unclamped.
double rtt_to_distance_m(double rtt_ps);

// -- negotiation ------------------------------------------------------------

enum class RejectReason { ProtectionMismatch };

const char* reject_reason_name(RejectReason reason);

struct Negotiation {
    bool accepted = false;
    int granted_burst_size = 0;
    std::optional<RejectReason> reject_reason;
    wire::FtmFrame ack;   ///< meaningful only when accepted
};

/// Responder-side handling of an FTMR: grants min(requested, limit) or
/// rejects on a protection mismatch. Throws ProtocolViolation if the request
/// is not an FTMR.
Negotiation negotiate(const wire::FtmFrame& request, const SessionConfig& responder_limits);

// -- measurement exchange ---------------------------------------------------

/// Mutable per-session state shared by consecutive exchanges: the true-time
/// cursor, per-device packet counters, the duplicate-PN set kept by the
/// initiator, and an optional on-air capture sink.
struct ExchangeEnv {
    double now_ps = 0.0;
    std::uint32_t initiator_pn = 0;
    std::uint32_t responder_pn = 0;
    std::uint8_t dialog_token = 1;
    std::unordered_set<std::uint32_t> accepted_ftm_pns;
    std::vector<wire::CapturedFrame>* frame_log = nullptr;
    double rogue_t1_bias_ps = 0.0;   ///< adversarial responder: reported-t1 inflation
};

/// Initiator-side acceptance check for an incoming measurement frame.
/// Order: tag first (when the session is protected), then the duplicate-PN
/// check. Accepting registers the packet number.
enum class FrameCheck { Accepted, BadTag, DuplicatePn };

FrameCheck check_incoming_ftm(const wire::FtmFrame& frame, const SessionConfig& session,
                              ExchangeEnv& env);

/// Runs one complete measurement: FTM departure stamped t1 by the responder,
/// detected arrival stamped t2 by the initiator, ACK transmitted at
/// t3 = t2 + turnaround, detected ACK arrival stamped t4 by the responder.
/// Reception timestamps are corrected by the device's expected quantization
/// delay. Throws NoResponse when either direction misses the delivery
/// threshold, ReplayRejected when the PN check rejects the frame.
MeasurementRecord run_single_exchange(const phy::DeviceProfile& initiator,
                                      const phy::DeviceProfile& responder,
                                      const phy::ChannelModel& channel, double distance_m,
                                      const SessionConfig& session, phy::Rng& rng,
                                      ExchangeEnv* env = nullptr);

/// burst_size sequential exchanges with fresh packet numbers; statistics over
/// the delivered ones. Throws AllFramesDropped when nothing got through.
BurstResult run_burst(const phy::DeviceProfile& initiator, const phy::DeviceProfile& responder,
                      const phy::ChannelModel& channel, double distance_m,
                      const SessionConfig& session, phy::Rng& rng, ExchangeEnv* env = nullptr);

}  // namespace ftmsim::protocol
