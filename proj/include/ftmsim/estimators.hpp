// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace ftmsim::estimators {

/// Inverts the log-distance path-loss law: the distance whose modeled RSSI
/// equals the observed one. Throws InvalidExponent when the path-loss
/// exponent is not positive.
double rssi_distance_m(double rssi_dbm, double a_dbm, double n);

/// Summary of a batch of range estimates against one true distance.
/// Spreads are population statistics; the percentile is nearest-rank.
struct RangingStats {
    std::size_t n_samples = 0;
    double mean_est_m = 0.0;
    double std_est_m = 0.0;
    double mean_abs_error_m = 0.0;
    double p90_abs_error_m = 0.0;
    double true_distance_m = 0.0;
};

/// Throws EmptySample on an empty batch.
RangingStats summarize(const std::vector<double>& estimates_m, double true_distance_m);

/// Head-to-head ratio report: values > 1 mean the first argument is noisier.
struct Comparison {
    double std_ratio = 0.0;   ///< a.std_est_m / b.std_est_m
    double mae_ratio = 0.0;   ///< a.mean_abs_error_m / b.mean_abs_error_m
};

/// Throws DegenerateComparison when a denominator statistic of b is zero.
Comparison compare(const RangingStats& a, const RangingStats& b);

}  // namespace ftmsim::estimators
