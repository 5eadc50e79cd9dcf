// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "ftmsim/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "ftmsim/errors.hpp"

namespace ftmsim::estimators {

double rssi_distance_m(double rssi_dbm, double a_dbm, double n) {
    if (!(n > 0.0)) {
        throw InvalidExponent("path-loss exponent must be positive");
    }
    return std::pow(10.0, (a_dbm - rssi_dbm) / (10.0 * n));
}

RangingStats summarize(const std::vector<double>& estimates_m, double true_distance_m) {
    if (estimates_m.empty()) {
        throw EmptySample("cannot summarize an empty batch of estimates");
    }

    RangingStats stats;
    stats.n_samples = estimates_m.size();
    stats.true_distance_m = true_distance_m;
    const double n = static_cast<double>(stats.n_samples);

    double sum = 0.0;
    double abs_err_sum = 0.0;
    std::vector<double> abs_errors;
    abs_errors.reserve(estimates_m.size());
    for (double estimate : estimates_m) {
        sum += estimate;
        const double abs_err = std::fabs(estimate - true_distance_m);
        abs_err_sum += abs_err;
        abs_errors.push_back(abs_err);
    }
    stats.mean_est_m = sum / n;
    stats.mean_abs_error_m = abs_err_sum / n;

    double sq = 0.0;
    for (double estimate : estimates_m) {
        const double d = estimate - stats.mean_est_m;
        sq += d * d;
    }
    stats.std_est_m = std::sqrt(sq / n);

    std::sort(abs_errors.begin(), abs_errors.end());
    // Nearest-rank percentile: the ceil(0.9 n)-th smallest absolute error.
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * n));
    stats.p90_abs_error_m = abs_errors[rank - 1];
    return stats;
}

Comparison compare(const RangingStats& a, const RangingStats& b) {
    if (b.std_est_m == 0.0 || b.mean_abs_error_m == 0.0) {
        throw DegenerateComparison("comparison baseline has zero spread or zero error");
    }
    Comparison result;
    result.std_ratio = a.std_est_m / b.std_est_m;
    result.mae_ratio = a.mean_abs_error_m / b.mean_abs_error_m;
    return result;
}

}  // namespace ftmsim::estimators
