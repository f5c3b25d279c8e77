#pragma once

#include <cmath>
#include <stdexcept>

#include "bpvec/geometry.hpp"

namespace bpvec {

// Log-distance path-loss channel. Rates follow the Shannon form
// W_b * log2(1 + SNR); W_b is configured in MB, so rates come out in MB/s.
struct ChannelParams {
    double bandwidth_mb = 15.0;          // W_b
    double tx_power_w = 0.28183815;      // P_t
    double transceiver_eta = 1.63726e-9; // eta
    double ref_distance_m = 100.0;       // d_0
    double noise_w = 1.2589e-13;         // N_0
    double pathloss_exp = 2.0;           // delta

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct LinkMetric {
    double distance_m = 0.0;
    double snr = 0.0;
    double rate_mbps = 0.0;
};

inline double snr_at_distance(double d, const ChannelParams& ch) {
    if (d <= 0.0) throw std::invalid_argument("snr: zero distance");
    return ch.tx_power_w * ch.transceiver_eta *
           std::pow(ch.ref_distance_m / d, ch.pathloss_exp) / ch.noise_w;
}

inline double snr(const Vec2& a, const Vec2& b, const ChannelParams& ch) {
    return snr_at_distance(distance(a, b), ch);
}

inline double rate_from_snr(double s, const ChannelParams& ch) {
    return ch.bandwidth_mb * std::log2(1.0 + s);
}

inline double rate_mbps(const Vec2& a, const Vec2& b, const ChannelParams& ch) {
    return rate_from_snr(snr(a, b, ch), ch);
}

inline LinkMetric link(const Vec2& a, const Vec2& b, const ChannelParams& ch) {
    LinkMetric m;
    m.distance_m = distance(a, b);
    m.snr = snr_at_distance(m.distance_m, ch);
    m.rate_mbps = rate_from_snr(m.snr, ch);
    return m;
}

inline double mbps_to_bps(double mbps) { return mbps * kBitsPerMb; }

}  // namespace bpvec
