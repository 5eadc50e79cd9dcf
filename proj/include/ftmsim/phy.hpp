// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "ftmsim/errors.hpp"

namespace ftmsim {

constexpr double kSpeedOfLightMps = 299792458.0;

namespace phy {

/// Deterministic pseudo-random stream. Same seed, same build -> identical
/// draw sequence. Variates are derived by hand from the raw 64-bit engine
/// output so the stream does not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double next_uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_uniform();
    }

    /// Exponential with the given mean; mean 0 yields 0 (one draw is always
    /// consumed so the stream layout is independent of the parameter).
    double exponential(double mean) {
        const double u = next_uniform();
        return mean <= 0.0 ? 0.0 : -mean * std::log1p(-u);
    }

    /// Zero-mean Gaussian via Box-Muller; consumes two draws.
    double normal(double stddev) {
        // First uniform is shifted into (0, 1] so the log is finite.
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return stddev * r * std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// A device's local time base. Readings are true_time * (1 + drift_ppm*1e-6)
/// + offset_ps. Offsets are whole picoseconds so they cancel bit-exactly in
/// timestamp differences.
struct ClockModel {
    std::int64_t offset_ps = 0;
    double drift_ppm = 0.0;
};

constexpr double kMaxAbsDriftPpm = 1000.0;

/// Radio hardware profile: RF parameters plus the clock and the short-range
/// degradation knobs (near_field_range_m = 0 disables the mechanism).
struct DeviceProfile {
    std::string name;
    int band_mhz = 2412;
    int bandwidth_mhz = 20;
    int antennas = 1;
    double tx_power_dbm = 15.0;
    double rx_sensitivity_dbm = -92.0;
    ClockModel clock;
    double near_field_range_m = 0.0;
    double near_field_bias_ns = 0.0;
};

/// Log-distance path loss with optional shadowing, plus the multipath excess
/// surviving first-arrival correction. rssi_ref_dbm_a is the RSSI at 1 m for
/// a transmitter at ref_tx_power_dbm.
struct ChannelModel {
    double pathloss_exponent_n = 2.0;
    double rssi_ref_dbm_a = -40.0;
    double ref_tx_power_dbm = 15.0;
    double multipath_mean_excess_ns = 0.0;
    double fac_residual = 0.0;
    double rssi_noise_db_std = 0.0;
};

/// Throws ValidationError when a profile violates its bounds.
void validate_device(const DeviceProfile& device);
void validate_channel(const ChannelModel& channel);

/// Baseband sampling period: 1000 / bandwidth, nanoseconds.
/// Throws UnsupportedBandwidth unless bandwidth is 20, 40, 80 or 160 MHz.
double sampling_period_ns(int bandwidth_mhz);

/// One-way flight time, picoseconds (fractional). Throws NegativeDistance.
double propagation_delay_ps(double distance_m);

/// Received power at distance_m for the given transmit power, including
/// shadowing noise (one normal draw unless rssi_noise_db_std is 0, in which
/// case no draw is consumed). Throws NonPositiveDistance for d <= 0.
double rssi_at(double distance_m, const ChannelModel& channel, double tx_power_dbm, Rng& rng);

/// Receiver-side detection delay, picoseconds: the best (minimum) over the
/// device's antennas of sampling quantization U(0, Ts) plus residual
/// multipath excess, plus one extra exponential near-field term when the
/// device is inside its near-field range. The near-field mean grows linearly
/// with distance up to the range edge, matching the short-range behavior this
/// models. With continuous_time the sampling term is the Ts -> 0 limit.
double detection_delay_ps(const DeviceProfile& device, const ChannelModel& channel,
                          double distance_m, Rng& rng, bool continuous_time = false);

/// Expected detection delay in a clean channel (no multipath, no near field):
/// the mean of the min of `antennas` U(0, Ts) draws, rounded to whole
/// picoseconds. This is the calibration constant ranging firmware subtracts
/// from reception timestamps.
std::int64_t expected_quantization_delay_ps(const DeviceProfile& device);

/// Reads the device clock at a true instant. quantize_ps rounds the drifted
/// time to the nearest picosecond (ties away from zero) before the integer
/// offset is applied; pass false for the continuous-time test hook.
double clock_read_ps(double true_time_ps, const ClockModel& clock, bool quantize_ps = true);

/// Inverse of clock_read_ps without quantization: the true instant at which
/// the clock shows `reading_ps`.
double clock_invert_ps(double reading_ps, const ClockModel& clock);

/// Hard delivery threshold, inclusive at equality.
bool frame_delivered(double rssi_dbm, const DeviceProfile& device);

}  // namespace phy
}  // namespace ftmsim
