#pragma once

// Complex 2x2 algebra for a single qubit: Pauli matrices, SU(2) rotations,
// pure states and density matrices, purity and fidelity.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace holosim {

using cplx = std::complex<double>;

constexpr double kAlgebraTol = 1e-12;   // algebraic identities
constexpr double kUnitaryTol = 1e-10;   // unitarity / PSD gates on inputs

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Dense complex 2x2 matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> m{};

    cplx& operator()(int r, int c) { return m[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return m[2 * r + c]; }

    static Mat2 identity() { return Mat2{{cplx(1, 0), 0, 0, cplx(1, 0)}}; }
    static Mat2 zero() { return Mat2{}; }

    Mat2 adjoint() const {
        return Mat2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }
    cplx trace() const { return m[0] + m[3]; }
    cplx det() const { return m[0] * m[3] - m[1] * m[2]; }

    bool finite() const {
        for (const auto& z : m)
            if (!is_finite(z)) return false;
        return true;
    }

    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        return Mat2{{a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]}};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return Mat2{{a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]}};
    }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return Mat2{{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
                     a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
    }
    friend Mat2 operator*(cplx s, const Mat2& a) {
        return Mat2{{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}};
    }
};

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a.m[i] - b.m[i]));
    return worst;
}

// largest entry of U^dag U - I
inline double unitarity_defect(const Mat2& u) {
    return max_abs_diff(u.adjoint() * u, Mat2::identity());
}

enum class Axis { X, Y, Z };

inline Mat2 pauli(Axis axis) {
    switch (axis) {
        case Axis::X: return Mat2{{0, cplx(1, 0), cplx(1, 0), 0}};
        case Axis::Y: return Mat2{{0, cplx(0, -1), cplx(0, 1), 0}};
        case Axis::Z: return Mat2{{cplx(1, 0), 0, 0, cplx(-1, 0)}};
    }
    throw std::invalid_argument("pauli: bad axis");
}

// H = (sigma_x + sigma_z)/sqrt(2)
inline Mat2 hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    return Mat2{{cplx(r, 0), cplx(r, 0), cplx(r, 0), cplx(-r, 0)}};
}

// exp(-i theta n.sigma) = cos(theta) I - i sin(theta) (n.sigma), |n| = 1.
inline Mat2 su2_exp(double nx, double ny, double nz, double theta) {
    const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9)
        throw std::invalid_argument("su2_exp: axis must have unit norm");
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx is(0, s);
    return Mat2{{c - is * nz, -is * (nx - cplx(0, 1) * ny),
                 -is * (nx + cplx(0, 1) * ny), c + is * nz}};
}

// Pure state c0|0> + c1|1>, |c0|^2 + |c1|^2 = 1 within 1e-12.
struct QubitState {
    cplx c0;
    cplx c1;

    QubitState(cplx a0, cplx a1) : c0(a0), c1(a1) {
        if (!is_finite(c0) || !is_finite(c1))
            throw std::invalid_argument("QubitState: non-finite amplitude");
        const double n = std::norm(c0) + std::norm(c1);
        if (std::abs(n - 1.0) > kAlgebraTol)
            throw std::invalid_argument("QubitState: not normalized, |c0|^2+|c1|^2 = " +
                                        std::to_string(n));
    }

    // c0 = e^{i xi} cos(phi), c1 = e^{i chi} sin(phi)
    static QubitState from_angles(double xi, double chi, double phi) {
        return QubitState(std::cos(phi) * cplx(std::cos(xi), std::sin(xi)),
                          std::sin(phi) * cplx(std::cos(chi), std::sin(chi)));
    }

    // Rescales amplitudes whose norm is off by at most `slack`.
    static QubitState normalized(cplx a0, cplx a1, double slack = 1e-6) {
        const double n = std::sqrt(std::norm(a0) + std::norm(a1));
        if (!std::isfinite(n) || std::abs(n - 1.0) > slack)
            throw std::invalid_argument("QubitState: norm " + std::to_string(n) +
                                        " too far from 1 to renormalize");
        return QubitState(a0 / n, a1 / n);
    }
};

// Hermitian, unit-trace, positive-semidefinite 2x2 matrix.
class DensityMatrix {
  public:
    explicit DensityMatrix(const Mat2& m) : mat_(m) { validate(m); }

    // Skips the PSD gate. For perturbative closed forms that are Hermitian and
    // unit-trace by construction but may leave the PSD cone outside their
    // validity regime.
    static DensityMatrix unchecked(const Mat2& m) { return DensityMatrix(m, Unchecked{}); }

    const Mat2& mat() const { return mat_; }
    cplx operator()(int r, int c) const { return mat_(r, c); }

    // eigenvalues of the Hermitian matrix, descending
    std::array<double, 2> eigenvalues() const {
        const double half_tr = 0.5 * (mat_(0, 0).real() + mat_(1, 1).real());
        const double half_diff = 0.5 * (mat_(0, 0).real() - mat_(1, 1).real());
        const double disc = std::sqrt(half_diff * half_diff + std::norm(mat_(0, 1)));
        return {half_tr + disc, half_tr - disc};
    }

  private:
    struct Unchecked {};
    DensityMatrix(const Mat2& m, Unchecked) : mat_(m) {
        if (!m.finite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
    }

    static void validate(const Mat2& m) {
        if (!m.finite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
        if (max_abs_diff(m, m.adjoint()) > kAlgebraTol)
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        if (std::abs(m.trace() - cplx(1, 0)) > kAlgebraTol)
            throw std::invalid_argument("DensityMatrix: trace != 1");
        const double half_diff = 0.5 * (m(0, 0).real() - m(1, 1).real());
        const double lo = 0.5 * (m(0, 0).real() + m(1, 1).real()) -
                          std::sqrt(half_diff * half_diff + std::norm(m(0, 1)));
        if (lo < -kUnitaryTol)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lo));
    }

    Mat2 mat_;
};

// U |psi><psi| U^dag. Computed as the outer product of U|psi>, which keeps the
// result exactly Hermitian in floating point.
inline DensityMatrix density_from_pure(const Mat2& u, const QubitState& psi) {
    if (unitarity_defect(u) > kUnitaryTol)
        throw std::invalid_argument("density_from_pure: matrix is not unitary");
    const cplx w0 = u(0, 0) * psi.c0 + u(0, 1) * psi.c1;
    const cplx w1 = u(1, 0) * psi.c0 + u(1, 1) * psi.c1;
    return DensityMatrix(Mat2{{w0 * std::conj(w0), w0 * std::conj(w1),
                               w1 * std::conj(w0), w1 * std::conj(w1)}});
}

// tr(rho^2)
inline double purity(const DensityMatrix& rho) {
    const Mat2 sq = rho.mat() * rho.mat();
    return sq.trace().real();
}

// F = tr(rho0 rho); real for Hermitian arguments.
inline double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho) {
    const cplx t = (rho0.mat() * rho.mat()).trace();
    if (std::abs(t.imag()) > kAlgebraTol)
        throw std::logic_error("fidelity: trace has non-negligible imaginary part");
    return t.real();
}

}  // namespace holosim
