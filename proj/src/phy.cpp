// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/phy.hpp"

#include <algorithm>
#include <cmath>

namespace ftmsim::phy {

void validate_device(const DeviceProfile& device) {
    if (device.bandwidth_mhz != 20 && device.bandwidth_mhz != 40 && device.bandwidth_mhz != 80 &&
        device.bandwidth_mhz != 160) {
        throw ValidationError("device '" + device.name + "': bandwidth must be 20/40/80/160 MHz");
    }
    if (device.antennas < 1) {
        throw ValidationError("device '" + device.name + "': antennas must be >= 1");
    }
    if (device.near_field_range_m < 0.0 || device.near_field_bias_ns < 0.0) {
        throw ValidationError("device '" + device.name + "': near-field parameters must be >= 0");
    }
    if (std::abs(device.clock.drift_ppm) > kMaxAbsDriftPpm) {
        throw ValidationError("device '" + device.name + "': |drift_ppm| must be <= 1000");
    }
}

void validate_channel(const ChannelModel& channel) {
    if (!(channel.pathloss_exponent_n > 0.0)) {
        throw ValidationError("channel: pathloss exponent must be > 0");
    }
    if (channel.multipath_mean_excess_ns < 0.0) {
        throw ValidationError("channel: multipath excess must be >= 0");
    }
    if (channel.fac_residual < 0.0 || channel.fac_residual > 1.0) {
        throw ValidationError("channel: fac_residual must lie in [0, 1]");
    }
    if (channel.rssi_noise_db_std < 0.0) {
        throw ValidationError("channel: rssi noise stddev must be >= 0");
    }
}

double sampling_period_ns(int bandwidth_mhz) {
    switch (bandwidth_mhz) {
        case 20:
        case 40:
        case 80:
        case 160:
            return 1000.0 / static_cast<double>(bandwidth_mhz);
        default:
            throw UnsupportedBandwidth("bandwidth must be 20/40/80/160 MHz, got " +
                                       std::to_string(bandwidth_mhz));
    }
}

double propagation_delay_ps(double distance_m) {
    if (distance_m < 0.0) {
        throw NegativeDistance("distance must be >= 0");
    }
    return distance_m / kSpeedOfLightMps * 1e12;
}

double rssi_at(double distance_m, const ChannelModel& channel, double tx_power_dbm, Rng& rng) {
    if (!(distance_m > 0.0)) {
        throw NonPositiveDistance("rssi is undefined at distance <= 0");
    }
    double rssi = -10.0 * channel.pathloss_exponent_n * std::log10(distance_m) +
                  channel.rssi_ref_dbm_a + (tx_power_dbm - channel.ref_tx_power_dbm);
    if (channel.rssi_noise_db_std > 0.0) {
        rssi += rng.normal(channel.rssi_noise_db_std);
    }
    return rssi;
}

double detection_delay_ps(const DeviceProfile& device, const ChannelModel& channel,
                          double distance_m, Rng& rng, bool continuous_time) {
    const double ts_ns = continuous_time ? 0.0 : sampling_period_ns(device.bandwidth_mhz);
    const double excess_mean_ns = channel.multipath_mean_excess_ns * channel.fac_residual;

    double best_ns = 0.0;
    for (int a = 0; a < device.antennas; ++a) {
        const double candidate = rng.uniform(0.0, ts_ns) + rng.exponential(excess_mean_ns);
        if (a == 0 || candidate < best_ns) {
            best_ns = candidate;
        }
    }

    if (device.near_field_range_m > 0.0 && distance_m < device.near_field_range_m) {
        // Short-range degradation: mean excess ramps up linearly with distance
        // toward the range edge. See the preset documentation for the fit.
        const double mean_ns =
            device.near_field_bias_ns * (distance_m / device.near_field_range_m);
        best_ns += rng.exponential(mean_ns);
    }

    return best_ns * 1000.0;
}

std::int64_t expected_quantization_delay_ps(const DeviceProfile& device) {
    const double ts_ns = sampling_period_ns(device.bandwidth_mhz);
    const double mean_ns = ts_ns / static_cast<double>(device.antennas + 1);
    return static_cast<std::int64_t>(std::llround(mean_ns * 1000.0));
}

double clock_read_ps(double true_time_ps, const ClockModel& clock, bool quantize_ps) {
    const double drifted = true_time_ps * (1.0 + clock.drift_ppm * 1e-6);
    if (!quantize_ps) {
        return drifted + static_cast<double>(clock.offset_ps);
    }
    // Rounding before the integer offset is applied is algebraically the same
    // as rounding the sum, and keeps offset cancellation exact in doubles.
    return std::round(drifted) + static_cast<double>(clock.offset_ps);
}

double clock_invert_ps(double reading_ps, const ClockModel& clock) {
    return (reading_ps - static_cast<double>(clock.offset_ps)) /
           (1.0 + clock.drift_ppm * 1e-6);
}

bool frame_delivered(double rssi_dbm, const DeviceProfile& device) {
    return rssi_dbm >= device.rx_sensitivity_dbm;
}

}  // namespace ftmsim::phy
