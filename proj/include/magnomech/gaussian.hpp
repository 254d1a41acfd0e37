#pragma once

// Small dense Gaussian-state helpers: quadrature ordering, symplectic form,
// covariance matrix value type, cofactor determinants, and the conversion
// of linear mode equations into a real quadrature drift matrix.
//
// Quadrature convention: q = (o + o^dag)/sqrt(2), p = (o - o^dag)/(i sqrt(2)),
// so the vacuum variance is 1/2. Modes are ordered (a, b, m): cavity photon,
// phonon, magnon, giving R = (q_a, p_a, q_b, p_b, q_m, p_m).

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include "magnomech/error.hpp"

namespace magnomech {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

enum class Mode : int { Photon = 0, Phonon = 1, Magnon = 2 };

inline constexpr int q_index(Mode m) { return 2 * static_cast<int>(m); }
inline constexpr int p_index(Mode m) { return 2 * static_cast<int>(m) + 1; }

inline constexpr double kPhysicalityTol = 1e-9;

/// Standard symplectic form, block diagonal with [[0, 1], [-1, 0]].
template <int N>
Eigen::Matrix<double, N, N> symplectic_form() {
    static_assert(N % 2 == 0);
    Eigen::Matrix<double, N, N> omega = Eigen::Matrix<double, N, N>::Zero();
    for (int k = 0; k < N / 2; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

inline double det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline double det3(const Eigen::Matrix3d& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Laplace expansion along the first row.
inline double det4(const Mat4& m) {
    double det = 0.0;
    for (int col = 0; col < 4; ++col) {
        Eigen::Matrix3d minor;
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int c = 0; c < 4; ++c) {
                if (c == col) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        const double sign = (col % 2 == 0) ? 1.0 : -1.0;
        det += sign * m(0, col) * det3(minor);
    }
    return det;
}

/// Symmetric matrix of symmetrized quadrature second moments.
/// Construction symmetrizes the input, so the stored matrix is exactly symmetric.
template <int N>
class Covariance {
public:
    using Matrix = Eigen::Matrix<double, N, N>;

    Covariance() : m_(Matrix::Identity() * 0.5) {}
    explicit Covariance(const Matrix& m) : m_(0.5 * (m + m.transpose())) {}

    const Matrix& matrix() const noexcept { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }
    static constexpr int dim() { return N; }

    static Covariance vacuum() { return Covariance(); }

private:
    Matrix m_;
};

using CovarianceMatrix = Covariance<6>;
using CovarianceMatrix4 = Covariance<4>;

/// Vacuum photon and magnon, thermal phonon.
inline CovarianceMatrix default_initial_state(double nbar_b) {
    Mat6 s = Mat6::Identity() * 0.5;
    s(2, 2) = s(3, 3) = nbar_b + 0.5;
    return CovarianceMatrix(s);
}

struct PhysicalityReport {
    bool physical = false;
    double min_symplectic_eig = 0.0;
};

/// Symplectic eigenvalues are the moduli of the (purely imaginary) eigenvalues of Omega*sigma.
template <int N>
std::array<double, N / 2> symplectic_eigenvalues(const Eigen::Matrix<double, N, N>& sigma) {
    const Eigen::Matrix<double, N, N> w = symplectic_form<N>() * sigma;
    Eigen::EigenSolver<Eigen::Matrix<double, N, N>> solver(w, false);
    std::array<double, N> moduli{};
    for (int i = 0; i < N; ++i) moduli[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(moduli.begin(), moduli.end());
    std::array<double, N / 2> out{};
    // eigenvalues come in +-i*nu pairs; take every other sorted modulus
    for (int k = 0; k < N / 2; ++k) out[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
    return out;
}

template <int N>
PhysicalityReport physicality_check(const Covariance<N>& sigma) {
    const auto nu = symplectic_eigenvalues<N>(sigma.matrix());
    PhysicalityReport r;
    r.min_symplectic_eig = nu[0];
    // a non-positive-definite sigma can still produce symplectic moduli >= 1/2
    const bool finite = sigma.matrix().allFinite();
    bool positive = finite;
    if (finite) {
        Eigen::SelfAdjointEigenSolver<typename Covariance<N>::Matrix> es(sigma.matrix(), Eigen::EigenvaluesOnly);
        positive = es.eigenvalues()(0) > 0.0;
    }
    r.physical = finite && positive && nu[0] >= 0.5 - kPhysicalityTol;
    return r;
}

/// Linear mode equations  d o_j/dt = sum_k A_jk o_k + B_jk o_k^dag - (damping_j/2) o_j
/// mapped onto the quadrature drift dR/dt = M R.
template <int Modes>
Eigen::Matrix<double, 2 * Modes, 2 * Modes> quadrature_drift(
    const Eigen::Matrix<std::complex<double>, Modes, Modes>& a,
    const Eigen::Matrix<std::complex<double>, Modes, Modes>& b,
    const std::array<double, Modes>& damping) {
    Eigen::Matrix<double, 2 * Modes, 2 * Modes> m;
    for (int j = 0; j < Modes; ++j) {
        for (int k = 0; k < Modes; ++k) {
            const std::complex<double> sum = a(j, k) + b(j, k);
            const std::complex<double> diff = a(j, k) - b(j, k);
            m(2 * j, 2 * k) = sum.real();
            m(2 * j, 2 * k + 1) = -diff.imag();
            m(2 * j + 1, 2 * k) = sum.imag();
            m(2 * j + 1, 2 * k + 1) = diff.real();
        }
        m(2 * j, 2 * j) -= 0.5 * damping[j];
        m(2 * j + 1, 2 * j + 1) -= 0.5 * damping[j];
    }
    return m;
}

/// Phase-space rotation matching o -> e^{-i theta} o.
inline Mat2 mode_rotation(double theta) {
    Mat2 r;
    r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return r;
}

}  // namespace magnomech
