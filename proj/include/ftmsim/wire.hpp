// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ftmsim/errors.hpp"

namespace ftmsim::wire {

/// Message kinds of the ranging exchange. Codec byte values are fixed:
/// 0x01 FTMR (request), 0x02 FTM (timestamped measurement), 0x03 ACK.
enum class FrameType : std::uint8_t {
    FtmRequest = 0x01,
    Ftm        = 0x02,
    Ack        = 0x03,
};

const char* frame_type_name(FrameType type);

constexpr std::size_t kFrameSize    = 24;  ///< fixed on-air frame length in octets
constexpr std::size_t kFrameBodyLen = 15;  ///< octets covered by the auth tag (type .. packet_number)
constexpr std::size_t kTagLen       = 8;
constexpr std::size_t kKeyLen       = 16;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;
using AuthTag    = std::array<std::uint8_t, kTagLen>;
using AuthKey    = std::array<std::uint8_t, kKeyLen>;

/// One ranging message. Field semantics:
///  - t1_ps is the responder-clock departure timestamp and is meaningful only
///    for Ftm frames; it must be zero on FTMR and ACK frames.
///  - packet_number is a monotone per-transmitter counter (duplicate detection).
///  - auth_tag is all-zero whenever the frame is unprotected.
struct FtmFrame {
    FrameType frame_type = FrameType::FtmRequest;
    std::uint8_t dialog_token = 0;
    std::uint8_t burst_size = 1;
    std::uint64_t t1_ps = 0;
    std::uint32_t packet_number = 0;
    bool protected_flag = false;
    AuthTag auth_tag{};

    bool operator==(const FtmFrame&) const = default;
};

/// Throws InvariantViolation if the field combination is invalid
/// (non-Ftm frame with nonzero t1_ps, FTMR with burst_size 0,
/// unprotected frame with a nonzero tag).
void validate_frame(const FtmFrame& frame);

/// Serializes to the fixed 24-octet little-endian layout. Deterministic.
FrameBytes encode_frame(const FtmFrame& frame);

/// Parses 24 octets; throws MalformedFrame on unknown type byte, reserved
/// flag bits, or any invariant violation. decode(encode(f)) == f.
FtmFrame decode_frame(const FrameBytes& bytes);

/// Length-checked convenience overload; throws MalformedFrame unless
/// bytes.size() == 24.
FtmFrame decode_frame(const std::vector<std::uint8_t>& bytes);

/// The octets the auth tag covers: frame octets 0..14 (type through
/// packet_number). The protected flag and the tag itself are excluded.
std::array<std::uint8_t, kFrameBodyLen> frame_body(const FtmFrame& frame);

/// Deterministic keyed 8-octet tag over a 15-octet frame body (SipHash-2-4).
AuthTag compute_auth_tag(const std::array<std::uint8_t, kFrameBodyLen>& body, const AuthKey& key);

/// Marks the frame protected and stamps the tag for `key`.
void protect_frame(FtmFrame& frame, const AuthKey& key);

/// True iff the frame is protected and its tag matches `key` over the current
/// body. Unprotected frames always verify false.
bool verify_auth_tag(const FtmFrame& frame, const AuthKey& key);

// -- frame log --------------------------------------------------------------

/// One on-air capture: transmit time plus the raw octets.
struct CapturedFrame {
    std::uint64_t capture_time_us = 0;
    FrameBytes bytes{};

    bool operator==(const CapturedFrame&) const = default;
};

/// Log line format: `<capture_time_us> <24 octets hex lowercase>\n` per frame.
std::string format_frame_log(const std::vector<CapturedFrame>& frames);

/// Inverse of format_frame_log; throws MalformedLog on any bad line.
std::vector<CapturedFrame> parse_frame_log(const std::string& text);

}  // namespace ftmsim::wire
