#pragma once

// Rectangular control loops in the (x, r1) and (y, r1) squeezing planes and
// the holonomies they generate. The weighted areas
//   Sigma_I  = l_x (1 - e^{-2 d_x}),   Sigma_II = l_y (e^{2 d_y} - 1)
// set the rotation angles; the Hadamard gate (up to the fixed global phase -i)
// is exp(-i sigma_x pi/2) * exp(-i sigma_y pi/4). Squeezing-control noise on
// the top edge r1 = d perturbs the areas by the path functionals alpha, beta.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holosim/ou.hpp"
#include "holosim/qubit.hpp"

namespace holosim {

constexpr double kLoopTol = 1e-10;   // Sigma invariants of a LoopPair
constexpr double kGridTol = 1e-9;    // grid/loop endpoint matching

// Axis-aligned rectangle with bottom edge on r1 = 0 and top edge at r1 = d.
struct RectLoop {
    Plane plane;
    double a;  // lower loop coordinate
    double b;  // upper loop coordinate
    double d;  // height in r1

    RectLoop(Plane plane_, double a_, double b_, double d_)
        : plane(plane_), a(a_), b(b_), d(d_) {
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(d)))
            throw std::invalid_argument("RectLoop: non-finite geometry");
        if (!(b > a)) throw std::invalid_argument("RectLoop: need b > a");
        if (d < 0.0) throw std::invalid_argument("RectLoop: need d >= 0");
        if (plane == Plane::XR1 && !(side() > std::numbers::pi / 4))
            throw std::invalid_argument("RectLoop: x-plane loop needs side length > pi/4");
    }

    double side() const { return b - a; }
};

// Sigma_I = integral over the rectangle of 2 e^{-2 r1} dx dr1 = l (1 - e^{-2d})
inline double sigma_I(const RectLoop& loop) {
    if (loop.plane != Plane::XR1) throw std::invalid_argument("sigma_I: loop not in (x, r1)");
    return loop.side() * -std::expm1(-2.0 * loop.d);
}

// Sigma_II = integral of 2 e^{+2 r1} dy dr1 = l (e^{2d} - 1)
inline double sigma_II(const RectLoop& loop) {
    if (loop.plane != Plane::YR1) throw std::invalid_argument("sigma_II: loop not in (y, r1)");
    return loop.side() * std::expm1(2.0 * loop.d);
}

// d_x = -1/2 ln(1 - pi/(4 l_x)); reachable only for l_x > pi/4.
inline double solve_dx(double lx) {
    if (!std::isfinite(lx) || !(lx > std::numbers::pi / 4))
        throw std::domain_error("solve_dx: Sigma_I = pi/4 requires l_x > pi/4");
    return -0.5 * std::log1p(-std::numbers::pi / (4.0 * lx));
}

// d_y = 1/2 ln(1 + pi/(2 l_y))
inline double solve_dy(double ly) {
    if (!std::isfinite(ly) || !(ly > 0.0)) throw std::domain_error("solve_dy: need l_y > 0");
    return 0.5 * std::log1p(std::numbers::pi / (2.0 * ly));
}

// Pair of loops realizing Sigma_I = pi/4 and Sigma_II = pi/2.
struct LoopPair {
    RectLoop loop_I;
    RectLoop loop_II;

    LoopPair(RectLoop loop_I_, RectLoop loop_II_)
        : loop_I(std::move(loop_I_)), loop_II(std::move(loop_II_)) {
        if (loop_I.plane != Plane::XR1 || loop_II.plane != Plane::YR1)
            throw std::invalid_argument("LoopPair: loops in wrong planes");
        if (std::abs(sigma_I(loop_I) - std::numbers::pi / 4) > kLoopTol)
            throw std::invalid_argument("LoopPair: Sigma_I != pi/4");
        if (std::abs(sigma_II(loop_II) - std::numbers::pi / 2) > kLoopTol)
            throw std::invalid_argument("LoopPair: Sigma_II != pi/2");
    }

    // loops [0, lx] x [0, dx] and [0, ly] x [0, dy] with the solved heights
    static LoopPair hadamard(double lx, double ly) {
        return LoopPair(RectLoop(Plane::XR1, 0.0, lx, solve_dx(lx)),
                        RectLoop(Plane::YR1, 0.0, ly, solve_dy(ly)));
    }
};

// Gamma(C_II) Gamma(C_I) = -i H_0
inline Mat2 ideal_gate(const LoopPair& loops) {
    if (std::abs(sigma_I(loops.loop_I) - std::numbers::pi / 4) > kLoopTol ||
        std::abs(sigma_II(loops.loop_II) - std::numbers::pi / 2) > kLoopTol)
        throw std::invalid_argument("ideal_gate: loop areas off target");
    return su2_exp(1, 0, 0, std::numbers::pi / 2) * su2_exp(0, 1, 0, std::numbers::pi / 4);
}

// Integrated area deviations caused by one noise realization.
struct PerturbationAngles {
    double alpha;
    double beta;

    PerturbationAngles(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        if (!std::isfinite(alpha) || !std::isfinite(beta))
            throw std::invalid_argument("PerturbationAngles: non-finite angle");
    }
};

namespace detail {
inline void require_grid_matches(const RectLoop& loop, const NoisePath& path, const char* who) {
    const double scale = std::max(1.0, std::max(std::abs(loop.a), std::abs(loop.b)));
    if (std::abs(path.start - loop.a) > kGridTol * scale ||
        std::abs(path.end() - loop.b) > kGridTol * scale)
        throw std::invalid_argument(std::string(who) + ": path grid does not span the loop side");
}
}  // namespace detail

// alpha = e^{-2 d_x} * integral_a^b (1 - e^{-2 dr_x(x)}) dx, left Riemann sum
// on the sampling grid (the noise is only defined at grid points).
inline double alpha_from_path(const RectLoop& loop, const NoisePath& path) {
    if (loop.plane != Plane::XR1) throw std::invalid_argument("alpha_from_path: loop not in (x, r1)");
    detail::require_grid_matches(loop, path, "alpha_from_path");
    double sum = 0.0;
    for (std::size_t k = 0; k < path.n_steps(); ++k) sum += -std::expm1(-2.0 * path.values[k]);
    return std::exp(-2.0 * loop.d) * path.step * sum;
}

// beta = e^{+2 d_y} * integral_a^b (e^{2 dr_y(y)} - 1) dy
inline double beta_from_path(const RectLoop& loop, const NoisePath& path) {
    if (loop.plane != Plane::YR1) throw std::invalid_argument("beta_from_path: loop not in (y, r1)");
    detail::require_grid_matches(loop, path, "beta_from_path");
    double sum = 0.0;
    for (std::size_t k = 0; k < path.n_steps(); ++k) sum += std::expm1(2.0 * path.values[k]);
    return std::exp(2.0 * loop.d) * path.step * sum;
}

namespace detail {
// -iH as the explicit trigonometric closed form
inline Mat2 perturbed_gate_closed_form(double alpha, double beta) {
    const double r = 1.0 / std::sqrt(2.0);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const Mat2 term1 = cplx(-r * (ca - sa), 0) *
                       (cplx(sb, 0) * Mat2::identity() + cplx(0, cb) * pauli(Axis::X));
    const Mat2 term2 = cplx(0, -r * (ca + sa)) *
                       (cplx(cb, 0) * pauli(Axis::Z) - cplx(sb, 0) * pauli(Axis::Y));
    return term1 + term2;
}
}  // namespace detail

// -iH = exp(-i sigma_x (pi/2 + beta)) exp(-i sigma_y (pi/4 + alpha)),
// cross-checked against the closed form before returning.
inline Mat2 perturbed_gate(const PerturbationAngles& angles) {
    const Mat2 product = su2_exp(1, 0, 0, std::numbers::pi / 2 + angles.beta) *
                         su2_exp(0, 1, 0, std::numbers::pi / 4 + angles.alpha);
    if (max_abs_diff(product, detail::perturbed_gate_closed_form(angles.alpha, angles.beta)) >
        kAlgebraTol)
        throw std::logic_error("perturbed_gate: product and closed form disagree");
    return product;
}

// rho = H |psi><psi| H^dag for one noise realization, via the closed form in
// gamma = alpha - pi/4, cross-checked against direct conjugation.
inline DensityMatrix realized_density(const PerturbationAngles& angles, const QubitState& psi) {
    const double g2 = 2.0 * (angles.alpha - std::numbers::pi / 4);
    const double b2 = 2.0 * angles.beta;
    const double cg = std::cos(g2), sg = std::sin(g2);
    const double cb = std::cos(b2), sb = std::sin(b2);

    const cplx cross = psi.c0 * std::conj(psi.c1);           // c0 c1*
    const double re_cross = 2.0 * cross.real();              // c0 c1* + c0* c1
    const double im_cross = 2.0 * cross.imag();              // (c0 c1* - c0* c1) / i
    const double pop_diff = std::norm(psi.c0) - std::norm(psi.c1);

    const double rho00 = 0.5 + 0.5 * pop_diff * cb * cg - 0.5 * re_cross * cb * sg +
                         0.5 * im_cross * sb;
    const cplx rho01(-0.5 * pop_diff * sg - 0.5 * re_cross * cg,
                     0.5 * pop_diff * sb * cg - 0.5 * re_cross * sb * sg - 0.5 * im_cross * cb);

    const Mat2 m{{cplx(rho00, 0), rho01, std::conj(rho01), cplx(1.0 - rho00, 0)}};
    const DensityMatrix rho(m);

    const DensityMatrix direct = density_from_pure(perturbed_gate(angles), psi);
    if (max_abs_diff(rho.mat(), direct.mat()) > kAlgebraTol)
        throw std::logic_error("realized_density: closed form and conjugation disagree");
    return rho;
}

}  // namespace holosim
