#pragma once

#include <array>

namespace bpvec {

// Residence time of a parked vehicle is modeled as a two-component Gamma
// mixture (short-term and long-term parking), with one parameter row per
// arrival hour. `arg_mode` selects how the CDF argument is scaled:
// theta_pow_kappa uses t / theta^kappa (the form the fitted tables use),
// theta uses the textbook t / theta.
enum class GammaArgMode { theta_pow_kappa, theta };

struct GammaMixRow {
    double shape_short = 1.2;
    double scale_short = 516.37059293853627;  // scale^shape ~= 1800 s
    double shape_long = 2.0;
    double scale_long = 169.70562748477141;   // scale^shape ~= 28800 s
    double weight_short = 0.6;
    double weight_long = 0.4;

    friend bool operator==(const GammaMixRow&, const GammaMixRow&) = default;
};

struct ParkingMixture {
    std::array<GammaMixRow, 24> hours{};
    GammaArgMode arg_mode = GammaArgMode::theta_pow_kappa;

    friend bool operator==(const ParkingMixture&, const ParkingMixture&) = default;
};

struct StayQuery {
    double parked_s = 0.0;   // time already parked
    double horizon_s = 0.0;  // additional time the vehicle must stay
    int arrival_hour = 0;
};

struct StayProbability {
    double value = 0.0;
    // Set when the CDF at parked_s is numerically 1: the vehicle is certain
    // to have left, so the conditional probability is pinned to 0.
    bool departed = false;
};

// Lower incomplete gamma function, relative accuracy ~1e-12.
double lower_incomplete_gamma(double shape, double x);

// Regularized P(shape, x) = gamma(shape, x) / Gamma(shape).
double regularized_gamma_p(double shape, double x);

// Regularized upper tail Q = 1 - P, computed without the cancellation that
// 1 - P suffers deep in the tail.
double regularized_gamma_q(double shape, double x);

double residence_cdf(double parked_s, int arrival_hour, const ParkingMixture& tbl);

// Mixture survival 1 - F, tail-accurate.
double residence_survival(double parked_s, int arrival_hour, const ParkingMixture& tbl);

StayProbability stay_probability(const StayQuery& q, const ParkingMixture& tbl);

void validate_parking(const ParkingMixture& tbl);

}  // namespace bpvec
