#include "bpvec/parking.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bpvec {

namespace {

// Regularized lower incomplete gamma by series expansion, valid for x < k+1.
double gamma_p_series(double k, double x) {
    double term = 1.0 / k;
    double sum = term;
    double a = k;
    for (int i = 0; i < 1000; ++i) {
        a += 1.0;
        term *= x / a;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(k * std::log(x) - x - std::lgamma(k));
}

// Regularized upper incomplete gamma by Lentz continued fraction, x >= k+1.
double gamma_q_contfrac(double k, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - k;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - k);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(k * std::log(x) - x - std::lgamma(k));
}

double mixture_arg(double t, double shape, double scale, GammaArgMode mode) {
    double denom = mode == GammaArgMode::theta_pow_kappa ? std::pow(scale, shape) : scale;
    return t / denom;
}

}  // namespace

double regularized_gamma_p(double shape, double x) {
    if (shape <= 0.0) throw std::invalid_argument("lower_incomplete_gamma: shape must be positive");
    if (x < 0.0) throw std::invalid_argument("lower_incomplete_gamma: negative argument");
    if (x == 0.0) return 0.0;
    if (x < shape + 1.0) return gamma_p_series(shape, x);
    return 1.0 - gamma_q_contfrac(shape, x);
}

double regularized_gamma_q(double shape, double x) {
    if (shape <= 0.0) throw std::invalid_argument("lower_incomplete_gamma: shape must be positive");
    if (x < 0.0) throw std::invalid_argument("lower_incomplete_gamma: negative argument");
    if (x == 0.0) return 1.0;
    // P stays well below 1 on the series branch, so the complement is safe
    if (x < shape + 1.0) return 1.0 - gamma_p_series(shape, x);
    return gamma_q_contfrac(shape, x);
}

double lower_incomplete_gamma(double shape, double x) {
    return regularized_gamma_p(shape, x) * std::tgamma(shape);
}

namespace {

void check_residence_args(double parked_s, int arrival_hour) {
    if (parked_s < 0.0) throw std::invalid_argument("residence_cdf: negative parked time");
    if (arrival_hour < 0 || arrival_hour > 23)
        throw std::invalid_argument("residence_cdf: arrival hour out of 0..23");
}

}  // namespace

double residence_cdf(double parked_s, int arrival_hour, const ParkingMixture& tbl) {
    check_residence_args(parked_s, arrival_hour);
    const GammaMixRow& r = tbl.hours[static_cast<size_t>(arrival_hour)];
    double f = r.weight_short *
                   regularized_gamma_p(r.shape_short,
                                       mixture_arg(parked_s, r.shape_short, r.scale_short, tbl.arg_mode)) +
               r.weight_long *
                   regularized_gamma_p(r.shape_long,
                                       mixture_arg(parked_s, r.shape_long, r.scale_long, tbl.arg_mode));
    // guards against weight round-off pushing the mixture out of [0,1]
    return std::fmin(1.0, std::fmax(0.0, f));
}

double residence_survival(double parked_s, int arrival_hour, const ParkingMixture& tbl) {
    check_residence_args(parked_s, arrival_hour);
    const GammaMixRow& r = tbl.hours[static_cast<size_t>(arrival_hour)];
    double s = r.weight_short *
                   regularized_gamma_q(r.shape_short,
                                       mixture_arg(parked_s, r.shape_short, r.scale_short, tbl.arg_mode)) +
               r.weight_long *
                   regularized_gamma_q(r.shape_long,
                                       mixture_arg(parked_s, r.shape_long, r.scale_long, tbl.arg_mode));
    return std::fmin(1.0, std::fmax(0.0, s));
}

StayProbability stay_probability(const StayQuery& q, const ParkingMixture& tbl) {
    if (q.parked_s < 0.0 || q.horizon_s < 0.0)
        throw std::invalid_argument("stay_probability: negative duration");
    double survive_now = residence_survival(q.parked_s, q.arrival_hour, tbl);
    if (survive_now <= 0.0) return {0.0, true};
    if (q.horizon_s == 0.0) return {1.0, false};
    double survive_later = residence_survival(q.parked_s + q.horizon_s, q.arrival_hour, tbl);
    double p = survive_later / survive_now;
    return {std::fmin(1.0, std::fmax(0.0, p)), false};
}

void validate_parking(const ParkingMixture& tbl) {
    for (size_t h = 0; h < tbl.hours.size(); ++h) {
        const GammaMixRow& r = tbl.hours[h];
        auto bad = [&](const std::string& field) {
            throw std::invalid_argument("parking hour " + std::to_string(h) + ": " + field);
        };
        if (r.shape_short <= 0.0 || r.scale_short <= 0.0) bad("short component parameters must be positive");
        if (r.shape_long <= 0.0 || r.scale_long <= 0.0) bad("long component parameters must be positive");
        if (r.weight_short < 0.0 || r.weight_long < 0.0) bad("weights must be non-negative");
        if (std::fabs(r.weight_short + r.weight_long - 1.0) > 1e-12) bad("weights must sum to 1");
    }
}

}  // namespace bpvec
