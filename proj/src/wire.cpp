// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/wire.hpp"

#include <sodium.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <sstream>

namespace ftmsim::wire {

namespace {

void put_u64_le(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

void put_u32_le(std::uint8_t* out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

std::uint64_t get_u64_le(const std::uint8_t* in) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | in[i];
    }
    return v;
}

std::uint32_t get_u32_le(const std::uint8_t* in) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | in[i];
    }
    return v;
}

bool tag_is_zero(const AuthTag& tag) {
    return std::all_of(tag.begin(), tag.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

const char* frame_type_name(FrameType type) {
    switch (type) {
        case FrameType::FtmRequest: return "FTMR";
        case FrameType::Ftm:        return "FTM";
        case FrameType::Ack:        return "ACK";
    }
    return "?";
}

void validate_frame(const FtmFrame& frame) {
    switch (frame.frame_type) {
        case FrameType::FtmRequest:
        case FrameType::Ftm:
        case FrameType::Ack:
            break;
        default:
            throw InvariantViolation("unknown frame type");
    }
    if (frame.frame_type != FrameType::Ftm && frame.t1_ps != 0) {
        throw InvariantViolation(std::string(frame_type_name(frame.frame_type)) +
                                 " frame must carry t1_ps = 0");
    }
    if (frame.frame_type == FrameType::FtmRequest && frame.burst_size < 1) {
        throw InvariantViolation("FTMR burst_size must be >= 1");
    }
    if (!frame.protected_flag && !tag_is_zero(frame.auth_tag)) {
        throw InvariantViolation("unprotected frame must carry an all-zero auth tag");
    }
}

FrameBytes encode_frame(const FtmFrame& frame) {
    validate_frame(frame);
    FrameBytes out{};
    out[0] = static_cast<std::uint8_t>(frame.frame_type);
    out[1] = frame.dialog_token;
    out[2] = frame.burst_size;
    put_u64_le(&out[3], frame.t1_ps);
    put_u32_le(&out[11], frame.packet_number);
    out[15] = frame.protected_flag ? 0x01 : 0x00;
    std::copy(frame.auth_tag.begin(), frame.auth_tag.end(), out.begin() + 16);
    return out;
}

FtmFrame decode_frame(const FrameBytes& bytes) {
    FtmFrame frame;
    switch (bytes[0]) {
        case 0x01: frame.frame_type = FrameType::FtmRequest; break;
        case 0x02: frame.frame_type = FrameType::Ftm; break;
        case 0x03: frame.frame_type = FrameType::Ack; break;
        default:
            throw MalformedFrame("unknown frame-type byte");
    }
    frame.dialog_token = bytes[1];
    frame.burst_size = bytes[2];
    frame.t1_ps = get_u64_le(&bytes[3]);
    frame.packet_number = get_u32_le(&bytes[11]);
    if ((bytes[15] & ~0x01u) != 0) {
        throw MalformedFrame("reserved flag bits must be zero");
    }
    frame.protected_flag = (bytes[15] & 0x01u) != 0;
    std::copy(bytes.begin() + 16, bytes.end(), frame.auth_tag.begin());
    try {
        validate_frame(frame);
    } catch (const InvariantViolation& e) {
        throw MalformedFrame(e.what());
    }
    return frame;
}

FtmFrame decode_frame(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() != kFrameSize) {
        throw MalformedFrame("frame must be exactly 24 octets");
    }
    FrameBytes fixed{};
    std::copy(bytes.begin(), bytes.end(), fixed.begin());
    return decode_frame(fixed);
}

std::array<std::uint8_t, kFrameBodyLen> frame_body(const FtmFrame& frame) {
    std::array<std::uint8_t, kFrameBodyLen> body{};
    body[0] = static_cast<std::uint8_t>(frame.frame_type);
    body[1] = frame.dialog_token;
    body[2] = frame.burst_size;
    put_u64_le(&body[3], frame.t1_ps);
    put_u32_le(&body[11], frame.packet_number);
    return body;
}

AuthTag compute_auth_tag(const std::array<std::uint8_t, kFrameBodyLen>& body, const AuthKey& key) {
    static_assert(kTagLen == crypto_shorthash_BYTES);
    static_assert(kKeyLen == crypto_shorthash_KEYBYTES);
    AuthTag tag{};
    crypto_shorthash(tag.data(), body.data(), body.size(), key.data());
    return tag;
}

void protect_frame(FtmFrame& frame, const AuthKey& key) {
    frame.protected_flag = true;
    frame.auth_tag = compute_auth_tag(frame_body(frame), key);
}

bool verify_auth_tag(const FtmFrame& frame, const AuthKey& key) {
    if (!frame.protected_flag) {
        return false;
    }
    return frame.auth_tag == compute_auth_tag(frame_body(frame), key);
}

std::string format_frame_log(const std::vector<CapturedFrame>& frames) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(frames.size() * (kFrameSize * 2 + 24));
    for (const CapturedFrame& f : frames) {
        out += std::to_string(f.capture_time_us);
        out += ' ';
        for (std::uint8_t b : f.bytes) {
            out += hex[b >> 4];
            out += hex[b & 0x0f];
        }
        out += '\n';
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::vector<CapturedFrame> parse_frame_log(const std::string& text) {
    std::vector<CapturedFrame> frames;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto space = line.find(' ');
        if (space == std::string::npos) {
            throw MalformedLog("line " + std::to_string(lineno) + ": missing capture time");
        }
        CapturedFrame cf;
        const char* begin = line.data();
        const char* end = begin + space;
        auto [ptr, ec] = std::from_chars(begin, end, cf.capture_time_us);
        if (ec != std::errc() || ptr != end) {
            throw MalformedLog("line " + std::to_string(lineno) + ": bad capture time");
        }
        const std::string_view hex(line.data() + space + 1, line.size() - space - 1);
        if (hex.size() != kFrameSize * 2) {
            throw MalformedLog("line " + std::to_string(lineno) + ": expected 48 hex digits");
        }
        for (std::size_t i = 0; i < kFrameSize; ++i) {
            const int hi = hex_nibble(hex[2 * i]);
            const int lo = hex_nibble(hex[2 * i + 1]);
            if (hi < 0 || lo < 0) {
                throw MalformedLog("line " + std::to_string(lineno) + ": bad hex digit");
            }
            cf.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        frames.push_back(cf);
    }
    return frames;
}

}  // namespace ftmsim::wire
