#include "couette/fields.hpp"

#include "couette/error.hpp"
#include "couette/norms.hpp"
#include "couette/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace couette {

VelocityField VelocityField::zeros(const GridPtr& g, Rep rep) {
    return {ScalarField::zeros(g, rep), ScalarField::zeros(g, rep)};
}

VelocityField& VelocityField::operator+=(const VelocityField& o) {
    u1 += o.u1;
    u2 += o.u2;
    return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
    u1 -= o.u1;
    u2 -= o.u2;
    return *this;
}

VelocityField& VelocityField::operator*=(cplx c) {
    u1 *= c;
    u2 *= c;
    return *this;
}

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(cplx c, VelocityField a) { return a *= c; }

cplx inner_product(const VelocityField& u, const VelocityField& w) {
    return inner_product(u.u1, w.u1) + inner_product(u.u2, w.u2);
}

BaseFlow BaseFlow::from_field(const VelocityField& U, double P) {
    const GridPtr& g = U.grid();
    const VelocityField s = U.spectral();
    const int r0 = g->row_of_mode(0);
    double scale = s.u1.data.cwiseAbs().maxCoeff() + 1.0;
    for (int r = 0; r < g->nx; ++r) {
        if (r != r0 && s.u1.data.row(r).cwiseAbs().maxCoeff() > 1e-13 * scale)
            throw ArgumentError("BaseFlow: only x-independent parallel shear flows are supported");
    }
    if (s.u2.data.cwiseAbs().maxCoeff() > 1e-13 * scale)
        throw ArgumentError("BaseFlow: U2 must vanish for a parallel shear flow");
    if (s.u1.data.row(r0).imag().cwiseAbs().maxCoeff() > 1e-13 * scale)
        throw ArgumentError("BaseFlow: U1 must be real");
    BaseFlow b;
    b.U = s;
    b.P = P;
    b.shear = s.u1.data.row(r0).real().transpose();
    b.dshear = g->dy1 * b.shear;
    return b;
}

BaseFlow couette_base(const GridPtr& grid) {
    VelocityField U = VelocityField::zeros(grid);
    U.u1.data.row(grid->row_of_mode(0)) = grid->y_nodes.transpose().cast<cplx>();
    BaseFlow b = BaseFlow::from_field(U);
    b.dshear.setOnes();
    return b;
}

ScalarField divergence(const VelocityField& u) {
    return differentiate(u.u1, Axis::x, 1) + differentiate(u.u2, Axis::y, 1);
}

ScalarField dealias_truncate(const ScalarField& f) {
    ScalarField s = f.spectral();
    const SpectralGrid& g = *f.grid;
    const int jmax = g.nx / 3;
    for (int r = 0; r < g.nx; ++r)
        if (std::abs(g.mode_index(r)) > jmax) s.data.row(r).setZero();
    return f.rep == Rep::spectral ? s : s.physical();
}

ScalarField product(const ScalarField& a, const ScalarField& b, bool dealias) {
    ScalarField pa = (dealias ? dealias_truncate(a) : a).physical();
    ScalarField pb = (dealias ? dealias_truncate(b) : b).physical();
    ScalarField out{a.grid, Rep::physical, pa.data.cwiseProduct(pb.data)};
    out = out.spectral();
    return dealias ? dealias_truncate(out) : out;
}

VelocityField convect(const VelocityField& a, const VelocityField& b, bool dealias) {
    VelocityField out;
    out.u1 = product(a.u1, differentiate(b.u1, Axis::x, 1), dealias) +
             product(a.u2, differentiate(b.u1, Axis::y, 1), dealias);
    out.u2 = product(a.u1, differentiate(b.u2, Axis::x, 1), dealias) +
             product(a.u2, differentiate(b.u2, Axis::y, 1), dealias);
    return out;
}

VelocityField random_divfree_field(const GridPtr& grid, std::uint64_t seed, int max_mode, double smoothness,
                                   const RandomFieldOptions& opts) {
    const SpectralGrid& g = *grid;
    if (max_mode >= g.nx / 2)
        throw ArgumentError("random_divfree_field: max_mode must be below nx/2 (" + std::to_string(g.nx / 2) +
                            "), got " + std::to_string(max_mode));
    if (max_mode < 0 || (max_mode == 0 && !opts.include_mean))
        throw ArgumentError("random_divfree_field: max_mode must be positive");
    const int d = opts.y_degree >= 0 ? opts.y_degree : std::max(0, (g.ny - 1) / 2 - 4);
    if (d + 4 > g.ny - 1) throw ArgumentError("random_divfree_field: y_degree too large for ny");

    const VectorXd& y = g.y_nodes;
    const VectorXd t = (2.0 * y.array() - 1.0).matrix();
    const VectorXd bump = (y.array().square() * (1.0 - y.array()).square()).matrix();
    MatrixXd legendre(g.ny, d + 1);
    legendre.col(0).setOnes();
    if (d >= 1) legendre.col(1) = t;
    for (int n = 1; n < d; ++n)
        legendre.col(n + 1) = (((2.0 * n + 1.0) * t.array() * legendre.col(n).array() - n * legendre.col(n - 1).array()) /
                               (n + 1.0)).matrix();

    SplitMix64 rng(seed);
    MatrixXcd psi = MatrixXcd::Zero(g.nx, g.ny);
    const int jstart = opts.include_mean ? 0 : 1;
    for (int j = jstart; j <= max_mode; ++j) {
        VectorXcd prof = VectorXcd::Zero(g.ny);
        for (int n = 0; n <= d; ++n) {
            double amp = rng.uniform(0.5, 1.0) * std::pow(1.0 + j, -smoothness) * std::pow(1.0 + n, -smoothness);
            double phase = 2.0 * std::numbers::pi * rng.uniform();
            cplx c = (j == 0) ? cplx(amp * std::cos(phase), 0.0) : std::polar(amp, phase);
            prof += c * legendre.col(n).cast<cplx>();
        }
        prof = prof.cwiseProduct(bump.cast<cplx>());
        psi.row(g.row_of_mode(j)) = prof.transpose();
        if (j > 0) psi.row(g.row_of_mode(-j)) = prof.conjugate().transpose();
    }
    ScalarField Psi{grid, Rep::spectral, psi};
    VelocityField u;
    u.u1 = differentiate(Psi, Axis::y, 1);
    u.u2 = cplx(-1.0) * differentiate(Psi, Axis::x, 1);
    return u;
}

VelocityField normalize_h6m(const VelocityField& f, double R) {
    const double n2 = h6m_norm_sq(f, R).value;
    if (!(n2 > 0.0)) throw ArgumentError("normalize_h6m: field has zero H6m norm");
    return cplx(1.0 / std::sqrt(n2)) * f;
}

} // namespace couette
