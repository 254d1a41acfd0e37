#pragma once

// Photon-phonon entanglement and steering from the reduced 4x4 covariance matrix.

#include <cmath>
#include <limits>
#include <string>

#include "magnomech/gaussian.hpp"

namespace magnomech {

/// Values of the clamped measures below this are reported as exactly zero.
inline constexpr double kMeasureFloor = 1e-12;
/// A steering direction counts as present above this value.
inline constexpr double kSteeringThreshold = 1e-6;

struct ReducedCM {
    Mat2 sigma1;  // photon
    Mat2 sigma2;  // phonon
    Mat2 sigma3;  // photon-phonon correlations

    Mat4 assembled() const {
        Mat4 r;
        r.block<2, 2>(0, 0) = sigma1;
        r.block<2, 2>(0, 2) = sigma3;
        r.block<2, 2>(2, 0) = sigma3.transpose();
        r.block<2, 2>(2, 2) = sigma2;
        return r;
    }

    static ReducedCM from_matrix(const Mat4& m) {
        const Mat4 s = 0.5 * (m + m.transpose());
        return {s.block<2, 2>(0, 0), s.block<2, 2>(2, 2), s.block<2, 2>(0, 2)};
    }
};

inline ReducedCM reduce_photon_phonon(const CovarianceMatrix& sigma) {
    return ReducedCM::from_matrix(sigma.matrix().block<4, 4>(0, 0));
}

struct SymplecticInvariants {
    double i1, i2, i3, i4;
};

inline SymplecticInvariants symplectic_invariants(const ReducedCM& r) {
    return {det2(r.sigma1), det2(r.sigma2), det2(r.sigma3), det4(r.assembled())};
}

struct MeasuresResult {
    double i1 = 0, i2 = 0, i3 = 0, i4 = 0;
    double sigma_minus = 0;
    double theta = 0;  // smallest partially-transposed symplectic eigenvalue
    double e_n = 0;
    double g_a = 0;  // photon -> phonon steering
    double g_b = 0;  // phonon -> photon steering
};

namespace detail {
inline double floor_small(double v) { return v < kMeasureFloor ? 0.0 : v; }

inline double smallest_pt_symplectic(const SymplecticInvariants& inv, double& sigma_minus) {
    sigma_minus = inv.i1 + inv.i2 - 2.0 * inv.i3;
    double disc = sigma_minus * sigma_minus - 4.0 * inv.i4;
    if (disc < -1e-12)
        throw Error(ErrorKind::DegenerateDiscriminant, "Sigma_-^2 - 4 I4 = " + std::to_string(disc));
    disc = std::max(disc, 0.0);
    return std::sqrt(std::max(0.0, sigma_minus - std::sqrt(disc)) / 2.0);
}

inline double steering_from(double local_det, double i4) {
    if (!(i4 > 1e-300)) throw Error(ErrorKind::SingularState, "det(sigma_R) is not positive");
    return floor_small(std::max(0.0, 0.5 * std::log(local_det / (4.0 * i4))));
}
}  // namespace detail

inline double log_negativity(const ReducedCM& r) {
    const auto inv = symplectic_invariants(r);
    double sigma_minus = 0.0;
    const double theta = detail::smallest_pt_symplectic(inv, sigma_minus);
    if (theta <= 0.0) return std::numeric_limits<double>::infinity();
    return detail::floor_small(std::max(0.0, -std::log(2.0 * theta)));
}

inline double steering_a_to_b(const ReducedCM& r) {
    const auto inv = symplectic_invariants(r);
    return detail::steering_from(inv.i1, inv.i4);
}

inline double steering_b_to_a(const ReducedCM& r) {
    const auto inv = symplectic_invariants(r);
    return detail::steering_from(inv.i2, inv.i4);
}

inline MeasuresResult compute_measures(const ReducedCM& r) {
    const auto inv = symplectic_invariants(r);
    MeasuresResult out;
    out.i1 = inv.i1;
    out.i2 = inv.i2;
    out.i3 = inv.i3;
    out.i4 = inv.i4;
    out.theta = detail::smallest_pt_symplectic(inv, out.sigma_minus);
    out.e_n = out.theta > 0.0 ? detail::floor_small(std::max(0.0, -std::log(2.0 * out.theta)))
                              : std::numeric_limits<double>::infinity();
    out.g_a = detail::steering_from(inv.i1, inv.i4);
    out.g_b = detail::steering_from(inv.i2, inv.i4);
    return out;
}

inline MeasuresResult compute_measures(const CovarianceMatrix& sigma) {
    return compute_measures(reduce_photon_phonon(sigma));
}

enum class SteeringRegime { NoSteering, OneWayAtoB, OneWayBtoA, TwoWay };

inline std::string_view to_string(SteeringRegime r) {
    switch (r) {
        case SteeringRegime::NoSteering: return "no_steering";
        case SteeringRegime::OneWayAtoB: return "one_way_a_to_b";
        case SteeringRegime::OneWayBtoA: return "one_way_b_to_a";
        case SteeringRegime::TwoWay: return "two_way";
    }
    return "unknown";
}

inline SteeringRegime classify_steering(double g_a, double g_b) {
    const bool a = g_a > kSteeringThreshold;
    const bool b = g_b > kSteeringThreshold;
    if (a && b) return SteeringRegime::TwoWay;
    if (a) return SteeringRegime::OneWayAtoB;
    if (b) return SteeringRegime::OneWayBtoA;
    return SteeringRegime::NoSteering;
}

/// Occupation <beta^dag beta> of beta = a cosh r + b^dag sinh r, read off the
/// photon-phonon block after the two-mode squeezing congruence.
inline double bogoliubov_occupation(const CovarianceMatrix& sigma, double r2) {
    if (!std::isfinite(r2)) throw Error(ErrorKind::InvalidArgument, "squeezing parameter must be finite", "r2");
    const double ch = std::cosh(r2);
    const double sh = std::sinh(r2);
    Eigen::Matrix<double, 2, 4> s;
    s << ch, 0.0, sh, 0.0,
         0.0, ch, 0.0, -sh;
    const Mat2 beta = s * sigma.matrix().block<4, 4>(0, 0) * s.transpose();
    return std::max(0.0, 0.5 * beta.trace() - 0.5);
}

struct QuadratureVariances {
    double var_q;
    double var_p;
    double min_rotated_var;  // minimum over quadrature angle
};

template <int N>
QuadratureVariances quadrature_variances(const Covariance<N>& sigma, Mode mode) {
    const int q = q_index(mode);
    if (q + 1 >= N) throw Error(ErrorKind::InvalidArgument, "mode not present in this covariance matrix");
    const Mat2 block = sigma.matrix().template block<2, 2>(q, q);
    const double mean = 0.5 * (block(0, 0) + block(1, 1));
    const double half_diff = 0.5 * (block(0, 0) - block(1, 1));
    const double radius = std::hypot(half_diff, block(0, 1));
    return {block(0, 0), block(1, 1), mean - radius};
}

}  // namespace magnomech
