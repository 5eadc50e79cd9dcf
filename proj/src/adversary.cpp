// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/adversary.hpp"

#include <cstdlib>
#include <sstream>

#include "ftmsim/errors.hpp"

namespace ftmsim::adversary {

namespace {

// A packet number the victim has not seen, so a re-numbered replay passes
// duplicate detection.
std::uint32_t fresh_packet_number(const wire::FtmFrame& captured,
                                  const protocol::ExchangeEnv& victim) {
    std::uint32_t pn = captured.packet_number + 1;
    while (victim.accepted_ftm_pns.count(pn) != 0) {
        ++pn;
    }
    return pn;
}

}  // namespace

const char* attacker_kind_name(AttackerKind kind) {
    switch (kind) {
        case AttackerKind::Sniffer:
            return "sniffer";
        case AttackerKind::Replayer:
            return "replayer";
        case AttackerKind::RogueResponder:
            return "rogue_responder";
    }
    std::abort();  // unreachable
}

void validate_attacker(const AttackerConfig& attacker) {
    if (attacker.t1_bias_ps != 0 && attacker.kind != AttackerKind::RogueResponder) {
        throw ValidationError("t1_bias_ps is meaningful only for a rogue responder");
    }
    if (attacker.replay_delay_samples < 0) {
        throw ValidationError("replay_delay_samples must be non-negative");
    }
}

std::string sniff(const std::string& frame_log_text, const std::optional<wire::AuthKey>& key) {
    const std::vector<wire::CapturedFrame> capture = wire::parse_frame_log(frame_log_text);

    std::ostringstream report;
    for (std::size_t idx = 0; idx < capture.size(); ++idx) {
        const wire::FtmFrame frame = wire::decode_frame(capture[idx].bytes);
        report << idx << ' ' << wire::frame_type_name(frame.frame_type) << ' '
               << frame.packet_number << ' ' << (frame.protected_flag ? 1 : 0) << ' ';
        if (!frame.protected_flag) {
            report << frame.t1_ps << " NONE";
        } else if (!key.has_value()) {
            report << "REDACTED UNVERIFIED";
        } else {
            report << frame.t1_ps << ' '
                   << (wire::verify_auth_tag(frame, *key) ? "VALID" : "INVALID");
        }
        report << '\n';
    }
    return report.str();
}

AttackOutcome replay(const wire::FtmFrame& captured, const protocol::SessionConfig& session,
                     protocol::ExchangeEnv& victim, bool key_known, bool mutate_pn) {
    wire::FtmFrame frame = captured;
    if (mutate_pn) {
        frame.packet_number = fresh_packet_number(captured, victim);
        if (session.protected_frames && key_known && session.key.has_value()) {
            wire::protect_frame(frame, *session.key);
        }
        // Without the key the stale tag no longer covers the new number and
        // verification is left to fail.
    }

    AttackOutcome outcome;
    switch (protocol::check_incoming_ftm(frame, session, victim)) {
        case protocol::FrameCheck::Accepted: {
            outcome.succeeded = true;
            outcome.mechanism = session.pn_check ? "ACCEPTED_FORGED_PN" : "ACCEPTED_NO_PN_CHECK";
            // The victim stamps its reception now but computes with the
            // capture's old departure timestamp, inflating the round trip by
            // the capture's age.
            const double staleness_ps = victim.now_ps - static_cast<double>(captured.t1_ps);
            outcome.induced_distance_error_m = protocol::rtt_to_distance_m(staleness_ps);
            break;
        }
        case protocol::FrameCheck::BadTag:
            outcome.succeeded = false;
            outcome.mechanism = "REJECTED_BAD_TAG";
            break;
        case protocol::FrameCheck::DuplicatePn:
            outcome.succeeded = false;
            outcome.mechanism = "REJECTED_DUPLICATE_PN";
            break;
    }
    return outcome;
}

AttackOutcome replay(const wire::FtmFrame& captured, const protocol::SessionConfig& session,
                     protocol::ExchangeEnv& victim, bool key_known) {
    const bool mutate_pn =
        session.pn_check && (!session.protected_frames || key_known);
    return replay(captured, session, victim, key_known, mutate_pn);
}

double rogue_t1_bias(const phy::DeviceProfile& initiator, const phy::DeviceProfile& responder,
                     const phy::ChannelModel& channel, double distance_m,
                     const protocol::SessionConfig& session, std::int64_t t1_bias_ps) {
    // Identical seeds make every channel and timing draw cancel in the
    // difference; only the reported-t1 shift survives.
    constexpr std::uint64_t kProbeSeed = 0x726f677565ULL;

    phy::Rng honest_rng(kProbeSeed);
    protocol::ExchangeEnv honest_env;
    const protocol::MeasurementRecord honest = protocol::run_single_exchange(
        initiator, responder, channel, distance_m, session, honest_rng, &honest_env);

    phy::Rng rogue_rng(kProbeSeed);
    protocol::ExchangeEnv rogue_env;
    rogue_env.rogue_t1_bias_ps = static_cast<double>(t1_bias_ps);
    const protocol::MeasurementRecord forged = protocol::run_single_exchange(
        initiator, responder, channel, distance_m, session, rogue_rng, &rogue_env);

    return forged.distance_m - honest.distance_m;
}

}  // namespace ftmsim::adversary
