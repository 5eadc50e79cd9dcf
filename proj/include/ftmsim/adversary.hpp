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
#include <string>

#include "ftmsim/phy.hpp"
#include "ftmsim/protocol.hpp"
#include "ftmsim/wire.hpp"

namespace ftmsim::adversary {

enum class AttackerKind { Sniffer, Replayer, RogueResponder };

const char* attacker_kind_name(AttackerKind kind);

struct AttackerConfig {
    AttackerKind kind = AttackerKind::Sniffer;
    std::int64_t t1_bias_ps = 0;     ///< RogueResponder: reported-t1 inflation
    int replay_delay_samples = 1;    ///< Replayer: capture age, in sample ticks
};

/// Throws ValidationError when fields are set for the wrong attacker kind.
void validate_attacker(const AttackerConfig& attacker);

struct AttackOutcome {
    bool succeeded = false;
    std::string mechanism;           ///< ACCEPTED_* or REJECTED_* code
    double induced_distance_error_m = 0.0;
};

/// Passive sniffer over a capture in the wire module's log format. Emits one
/// line per frame: `<idx> <type> <pn> <protected> <t1_ps|REDACTED> <tag_status>`.
/// Unprotected frames are fully readable (tag_status NONE). Protected frames
/// without the key keep their timestamp redacted (tag_status UNVERIFIED);
/// with the key, t1 is reported and the tag checked (VALID / INVALID).
/// Throws MalformedLog on a bad capture.
std::string sniff(const std::string& frame_log_text, const std::optional<wire::AuthKey>& key);

/// Replays a previously accepted measurement frame into the victim session.
/// mutate_pn selects the attacker's move: re-number the frame (re-signing it
/// only when the key is known) versus replaying it verbatim. Rejection is an
/// outcome, never an exception.
AttackOutcome replay(const wire::FtmFrame& captured, const protocol::SessionConfig& session,
                     protocol::ExchangeEnv& victim, bool key_known, bool mutate_pn);

/// Adaptive-attacker convenience: mutates the packet number exactly when that
/// helps (duplicate detection on, and either no protection or key known).
AttackOutcome replay(const wire::FtmFrame& captured, const protocol::SessionConfig& session,
                     protocol::ExchangeEnv& victim, bool key_known);

/// Distance shift a lying responder induces by inflating its reported t1.
/// Runs the exchange twice with identical draws (bias applied vs not) and
/// returns the difference, which is exactly -(t1_bias_ps/2)*c regardless of
/// channel noise because every other term cancels.
double rogue_t1_bias(const phy::DeviceProfile& initiator, const phy::DeviceProfile& responder,
                     const phy::ChannelModel& channel, double distance_m,
                     const protocol::SessionConfig& session, std::int64_t t1_bias_ps);

}  // namespace ftmsim::adversary
