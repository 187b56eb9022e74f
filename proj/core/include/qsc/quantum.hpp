#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace qsc::quantum {

using Complex = std::complex<double>;

// 2x2 complex matrix, row major. Shared storage for unitaries,
// Hamiltonians and density matrices; the ops below validate the
// structure they require.
struct Mat2 {
    std::array<Complex, 4> m{};

    Complex& operator()(int r, int c) { return m[2 * r + c]; }
    const Complex& operator()(int r, int c) const { return m[2 * r + c]; }

    static Mat2 identity();
    static Mat2 zero();

    Mat2 dagger() const;
    Complex trace() const { return m[0] + m[3]; }
    Complex det() const { return m[0] * m[3] - m[1] * m[2]; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b);
    friend Mat2 operator+(const Mat2& a, const Mat2& b);
    friend Mat2 operator-(const Mat2& a, const Mat2& b);
    friend Mat2 operator*(Complex s, const Mat2& a);

    // Largest entrywise absolute value.
    double max_abs() const;

    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-12) const;
};

using UnitaryOperator = Mat2;
using Hamiltonian = Mat2;
using DensityMatrix = Mat2;

// Normalized two-component state vector (c0, c1).
struct PureState {
    Complex c0{1.0, 0.0};
    Complex c1{0.0, 0.0};

    double norm_sq() const { return std::norm(c0) + std::norm(c1); }
};

// Polar angle theta in [0, pi], phase angle phi in [0, 2*pi).
struct BlochPoint {
    double theta = 0.0;
    double phi = 0.0;
};

struct ControlSet {
    struct Member {
        std::string label;
        UnitaryOperator op;
    };
    std::array<Member, 3> controls;

    const UnitaryOperator& operator[](int action) const { return controls[action].op; }
};

// exp(-i (ax*sx + ay*sy + az*sz) / 2) with sx, sy, sz the Pauli matrices,
// evaluated in closed form. Zero exponent gives the identity.
UnitaryOperator pauli_exponential(double ax, double ay, double az);

// The three-switch controls: U1 (no control), U2 (positive impulse),
// U3 (negative impulse), each held over one control period of pi/15.
ControlSet build_control_set();

// exp(-i (h0 + u*hc) dt) for Hermitian h0, hc; the global phase from the
// identity component of the Hamiltonian is retained.
UnitaryOperator build_propagator(const Hamiltonian& h0, const Hamiltonian& hc,
                                 double u, double dt);

PureState apply(const UnitaryOperator& u, const PureState& s);

PureState bloch_to_state(const BlochPoint& p);

// Inverse of bloch_to_state up to global phase; phi is canonicalized to 0
// at the poles. Throws on unnormalized input.
BlochPoint state_to_bloch(const PureState& s);

// |<a|b>|^2, clamped to [0, 1].
double fidelity_pure(const PureState& a, const PureState& b);

// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via Hermitian eigendecomposition.
double fidelity_density(const DensityMatrix& rho, const DensityMatrix& sigma);

// |s><s| projector, for tests and the density fidelity bridge.
DensityMatrix projector(const PureState& s);

} // namespace qsc::quantum
