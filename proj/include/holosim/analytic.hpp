#pragma once

// Closed-form small-noise results: noise moments, the averaged density
// matrix, final-state purity, gate fidelity, and the linear law I = 2F - 1.
// Everything here is first order in the noise variances; the Monte Carlo
// engine is the independent check of that truncation.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holosim/holonomy.hpp"
#include "holosim/ou.hpp"
#include "holosim/qubit.hpp"

namespace holosim {

// Second-moment functionals of the OU noise over a loop side.
//   F_x = e^{-4 d_x} (l_x - (1 - e^{-G l_x}) / G_x)        (and F_y with +4 d_y)
//   combined = 8 sigma F / Gamma  -> E[alpha^2] (resp. E[beta^2]) to first order
//   mean_alpha = -2 sigma_x l_x e^{-2 d_x},  mean_beta = +2 sigma_y l_y e^{+2 d_y}
struct NoiseMoments {
    double Fx;
    double Fy;
    double combined_x;
    double combined_y;
    double mean_alpha;
    double mean_beta;
};

struct ScenarioParams {
    LoopPair loops;
    OuParams noise_x;
    OuParams noise_y;
    QubitState psi;
};

namespace detail {
// h(z) = (z - 1 + e^{-z}) / z^2, finite and smooth with h(0) = 1/2. The naive
// form cancels for small z; switch to the series below z = 1e-4.
inline double ou_area_kernel(double z) {
    if (z < 1e-4) return 0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0;
    return (std::expm1(-z) + z) / (z * z);
}
}  // namespace detail

inline NoiseMoments noise_moments(const ScenarioParams& s) {
    const double lx = s.loops.loop_I.side(), dx = s.loops.loop_I.d;
    const double ly = s.loops.loop_II.side(), dy = s.loops.loop_II.d;
    const double zx = s.noise_x.bandwidth * lx;
    const double zy = s.noise_y.bandwidth * ly;
    const double hx = detail::ou_area_kernel(zx);
    const double hy = detail::ou_area_kernel(zy);
    NoiseMoments m;
    // l - (1 - e^{-z})/Gamma = l z h(z)
    m.Fx = std::exp(-4.0 * dx) * lx * zx * hx;
    m.Fy = std::exp(4.0 * dy) * ly * zy * hy;
    m.combined_x = 8.0 * s.noise_x.variance * lx * lx * std::exp(-4.0 * dx) * hx;
    m.combined_y = 8.0 * s.noise_y.variance * ly * ly * std::exp(4.0 * dy) * hy;
    m.mean_alpha = -2.0 * s.noise_x.variance * lx * std::exp(-2.0 * dx);
    m.mean_beta = 2.0 * s.noise_y.variance * ly * std::exp(2.0 * dy);
    return m;
}

// rho^(0) = H_0 |psi><psi| H_0, written out in the amplitudes and
// cross-checked against the conjugation route.
inline DensityMatrix rho_ideal(const QubitState& psi) {
    const cplx cross = psi.c0 * std::conj(psi.c1);  // c0 c1*
    const double pop_diff = std::norm(psi.c0) - std::norm(psi.c1);
    const cplx r00 = 0.5 * (1.0 + std::conj(cross) + cross);
    const cplx r01 = 0.5 * (pop_diff + std::conj(cross) - cross);
    const Mat2 m{{r00, r01, std::conj(r01), 1.0 - r00}};
    const DensityMatrix rho(m);
    if (max_abs_diff(rho.mat(), density_from_pure(hadamard(), psi).mat()) > kAlgebraTol)
        throw std::logic_error("rho_ideal: explicit form and conjugation disagree");
    return rho;
}

// Noise-averaged final density matrix, first order in the variances. The
// lower-left entry is the conjugate of the upper-right and <1|rho|1> is
// 1 - <0|rho|0>, so Hermiticity and unit trace are exact by construction.
inline DensityMatrix averaged_density(const ScenarioParams& s) {
    const NoiseMoments m = noise_moments(s);
    const cplx c0 = s.psi.c0, c1 = s.psi.c1;
    const cplx cross = c0 * std::conj(c1);
    const double re2 = 2.0 * cross.real();   // c0 c1* + c0* c1
    const double im2 = 2.0 * cross.imag();   // (c0 c1* - c0* c1) / i
    const double pop_diff = std::norm(c0) - std::norm(c1);
    const double sx_term = -0.5 * m.mean_alpha;  // sigma_x l_x e^{-2 d_x}
    const double sy_term = 0.5 * m.mean_beta;    // sigma_y l_y e^{+2 d_y}

    const double r00 = 0.5 * (1.0 + re2) - 2.0 * pop_diff * sx_term + 2.0 * im2 * sy_term -
                       re2 * (m.combined_x + m.combined_y);
    const cplx r01 = 0.5 * (c0 + c1) * (std::conj(c0) - std::conj(c1)) +
                     2.0 * re2 * cplx(sx_term, sy_term) - m.combined_x * pop_diff +
                     m.combined_y * cplx(0, im2);

    return DensityMatrix::unchecked(
        Mat2{{cplx(r00, 0), r01, std::conj(r01), cplx(1.0 - r00, 0)}});
}

namespace detail {
// shared loss term t: purity I = 1 - 2t, fidelity F = 1 - t, so I = 2F - 1
// holds identically.
inline double fidelity_loss(const ScenarioParams& s) {
    const NoiseMoments m = noise_moments(s);
    const cplx sum_sq = s.psi.c0 * s.psi.c0 + s.psi.c1 * s.psi.c1;
    return 4.0 * m.combined_y * std::norm(s.psi.c0) * std::norm(s.psi.c1) +
           m.combined_x * std::norm(sum_sq);
}

inline double fidelity_loss_angles(const ScenarioParams& s, double phi) {
    const double s2 = std::sin(2.0 * phi);
    // state must be e^{i xi} cos(phi), e^{i chi} sin(phi) with xi - chi = pi n
    const cplx cross = s.psi.c0 * std::conj(s.psi.c1);
    if (std::abs(std::abs(s.psi.c0) - std::abs(std::cos(phi))) > kGridTol ||
        std::abs(std::abs(s.psi.c1) - std::abs(std::sin(phi))) > kGridTol ||
        std::abs(cross.imag()) > kGridTol)
        throw std::invalid_argument("angle form requires xi - chi = pi n and matching phi");
    const NoiseMoments m = noise_moments(s);
    return m.combined_x + m.combined_y * s2 * s2;
}
}  // namespace detail

// I = 1 - (64 sy/Gy) Fy |c0|^2 |c1|^2 - (16 sx/Gx) Fx |c0^2 + c1^2|^2
inline double analytic_purity(const ScenarioParams& s) {
    return 1.0 - 2.0 * detail::fidelity_loss(s);
}

// F = 1 - (32 sy/Gy) Fy |c0|^2 |c1|^2 - (8 sx/Gx) Fx |c0^2 + c1^2|^2
inline double analytic_fidelity(const ScenarioParams& s) {
    return 1.0 - detail::fidelity_loss(s);
}

// I = 1 - (16 sx/Gx) Fx - (16 sy/Gy) Fy sin^2(2 phi)
inline double analytic_purity_angles(const ScenarioParams& s, double phi) {
    return 1.0 - 2.0 * detail::fidelity_loss_angles(s, phi);
}

// F = 1 - (8 sx/Gx) Fx - (8 sy/Gy) Fy sin^2(2 phi)
inline double analytic_fidelity_angles(const ScenarioParams& s, double phi) {
    return 1.0 - detail::fidelity_loss_angles(s, phi);
}

}  // namespace holosim
