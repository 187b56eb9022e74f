#include "qsc/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsc::quantum {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(double x) { return std::isfinite(x); }
bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Eigendecomposition of a 2x2 Hermitian matrix.
// Returns eigenvalues (ascending) and orthonormal eigenvectors as columns.
struct HermEig {
    std::array<double, 2> val;
    std::array<std::array<Complex, 2>, 2> vec; // vec[k] = k-th eigenvector
};

HermEig herm_eig(const Mat2& h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = h(0, 1);
    const double mean = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    HermEig e;
    e.val = {mean - disc, mean + disc};
    if (std::abs(b) < 1e-300) {
        if (a <= d) {
            e.vec = {{{Complex{1, 0}, Complex{0, 0}}, {Complex{0, 0}, Complex{1, 0}}}};
        } else {
            e.vec = {{{Complex{0, 0}, Complex{1, 0}}, {Complex{1, 0}, Complex{0, 0}}}};
        }
        return e;
    }
    for (int k = 0; k < 2; ++k) {
        // (H - lambda I) v = 0  =>  v = (b, lambda - a)
        Complex v0 = b;
        Complex v1 = Complex{e.val[k] - a, 0.0};
        const double n = std::sqrt(std::norm(v0) + std::norm(v1));
        e.vec[k] = {v0 / n, v1 / n};
    }
    return e;
}

void check_density(const DensityMatrix& rho, const char* name) {
    if (!rho.is_hermitian(1e-12))
        throw std::invalid_argument(std::string(name) + ": not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
        throw std::invalid_argument(std::string(name) + ": trace != 1");
    const HermEig e = herm_eig(rho);
    if (e.val[0] < -1e-12)
        throw std::invalid_argument(std::string(name) + ": not positive semidefinite");
}

} // namespace

Mat2 Mat2::identity() {
    Mat2 r;
    r.m = {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}};
    return r;
}

Mat2 Mat2::zero() { return Mat2{}; }

Mat2 Mat2::dagger() const {
    Mat2 r;
    r(0, 0) = std::conj((*this)(0, 0));
    r(0, 1) = std::conj((*this)(1, 0));
    r(1, 0) = std::conj((*this)(0, 1));
    r(1, 1) = std::conj((*this)(1, 1));
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] + b.m[k];
    return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] - b.m[k];
    return r;
}

Mat2 operator*(Complex s, const Mat2& a) {
    Mat2 r;
    for (int k = 0; k < 4; ++k) r.m[k] = s * a.m[k];
    return r;
}

double Mat2::max_abs() const {
    double v = 0.0;
    for (const auto& z : m) v = std::max(v, std::abs(z));
    return v;
}

bool Mat2::is_hermitian(double tol) const {
    return (*this - dagger()).max_abs() <= tol;
}

bool Mat2::is_unitary(double tol) const {
    return (dagger() * (*this) - identity()).max_abs() <= tol;
}

UnitaryOperator pauli_exponential(double ax, double ay, double az) {
    if (!finite(ax) || !finite(ay) || !finite(az))
        throw std::invalid_argument("pauli_exponential: non-finite argument");
    const double m = std::sqrt(ax * ax + ay * ay + az * az);
    if (m == 0.0) return Mat2::identity();
    const double c = std::cos(0.5 * m);
    const double s = std::sin(0.5 * m);
    const double nx = ax / m, ny = ay / m, nz = az / m;
    Mat2 u;
    u(0, 0) = Complex{c, -s * nz};
    u(0, 1) = Complex{-s * ny, -s * nx};
    u(1, 0) = Complex{s * ny, -s * nx};
    u(1, 1) = Complex{c, s * nz};
    return u;
}

ControlSet build_control_set() {
    const double tau = std::numbers::pi / 15.0;
    // I_z = sz/2, I_x = sx/2, so the Pauli half-angle arguments are
    // (2*coef_x, 0, 2*coef_z) with coef in units of I_x, I_z.
    ControlSet cs;
    cs.controls[0] = {"U1", pauli_exponential(0.0, 0.0, tau)};
    cs.controls[1] = {"U2", pauli_exponential(0.5 * tau, 0.0, tau)};
    cs.controls[2] = {"U3", pauli_exponential(-0.5 * tau, 0.0, tau)};
    return cs;
}

UnitaryOperator build_propagator(const Hamiltonian& h0, const Hamiltonian& hc,
                                 double u, double dt) {
    if (!h0.is_hermitian(1e-12)) throw std::invalid_argument("build_propagator: h0 not Hermitian");
    if (!hc.is_hermitian(1e-12)) throw std::invalid_argument("build_propagator: hc not Hermitian");
    if (!(dt > 0.0)) throw std::invalid_argument("build_propagator: dt must be positive");
    if (!finite(u)) throw std::invalid_argument("build_propagator: non-finite control value");

    const Mat2 h = h0 + Complex{u, 0.0} * hc;
    // Pauli decomposition H = a0*I + a1*sx + a2*sy + a3*sz.
    const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double a1 = h(0, 1).real();
    const double a2 = -h(0, 1).imag();
    const double a3 = 0.5 * (h(0, 0).real() - h(1, 1).real());

    const Mat2 rot = pauli_exponential(2.0 * a1 * dt, 2.0 * a2 * dt, 2.0 * a3 * dt);
    const Complex phase = std::exp(-kI * a0 * dt);
    return phase * rot;
}

PureState apply(const UnitaryOperator& u, const PureState& s) {
    PureState r;
    r.c0 = u(0, 0) * s.c0 + u(0, 1) * s.c1;
    r.c1 = u(1, 0) * s.c0 + u(1, 1) * s.c1;
    return r;
}

PureState bloch_to_state(const BlochPoint& p) {
    PureState s;
    s.c0 = Complex{std::cos(0.5 * p.theta), 0.0};
    s.c1 = std::exp(kI * p.phi) * std::sin(0.5 * p.theta);
    return s;
}

BlochPoint state_to_bloch(const PureState& s) {
    if (std::abs(s.norm_sq() - 1.0) > 1e-9)
        throw std::invalid_argument("state_to_bloch: state not normalized");
    BlochPoint p;
    const double m0 = std::abs(s.c0);
    const double m1 = std::abs(s.c1);
    p.theta = 2.0 * std::atan2(m1, m0);
    if (m0 * m0 < 1e-24 || m1 * m1 < 1e-24) {
        p.phi = 0.0; // phase is undefined at the poles
        return p;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    double phi = std::arg(s.c1) - std::arg(s.c0);
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi = 0.0;
    p.phi = phi;
    return p;
}

double fidelity_pure(const PureState& a, const PureState& b) {
    const Complex ip = std::conj(a.c0) * b.c0 + std::conj(a.c1) * b.c1;
    const double f = std::norm(ip);
    return std::min(1.0, std::max(0.0, f));
}

double fidelity_density(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_density(rho, "fidelity_density: rho");
    check_density(sigma, "fidelity_density: sigma");
    // The eigenvalues of sqrt(rho) sigma sqrt(rho) satisfy
    // mu+ + mu- = tr(rho sigma) and mu+ mu- = det(rho) det(sigma), so
    // (sqrt(mu+) + sqrt(mu-))^2 = tr(rho sigma) + 2 sqrt(det(rho) det(sigma)).
    // This avoids the cancellation of forming the near-zero eigenvalue.
    const double t = (rho * sigma).trace().real();
    const double d = (rho.det() * sigma.det()).real();
    const double f = t + 2.0 * std::sqrt(std::max(d, 0.0));
    return std::min(1.0, std::max(0.0, f));
}

DensityMatrix projector(const PureState& s) {
    Mat2 r;
    r(0, 0) = s.c0 * std::conj(s.c0);
    r(0, 1) = s.c0 * std::conj(s.c1);
    r(1, 0) = s.c1 * std::conj(s.c0);
    r(1, 1) = s.c1 * std::conj(s.c1);
    return r;
}

} // namespace qsc::quantum
