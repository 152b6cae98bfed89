#include "couette/linop.hpp"

#include "couette/error.hpp"
#include "couette/norms.hpp"
#include "couette/pressure.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace couette {

namespace {

ScalarField scale_columns(const ScalarField& f, const VectorXd& prof) {
    ScalarField s = f.spectral();
    s.data = s.data * prof.cast<cplx>().asDiagonal();
    return s;
}

// Phi^H M2 X for stacked [u1; u2] samples.
MatrixXcd mass_product(const SpectralGrid& g, const MatrixXcd& Phi, const MatrixXcd& X) {
    const int ny = g.ny;
    const MatrixXcd M = g.mass.cast<cplx>();
    return Phi.topRows(ny).adjoint() * M * X.topRows(ny) + Phi.bottomRows(ny).adjoint() * M * X.bottomRows(ny);
}

MatrixXd legendre_columns(const VectorXd& t, int count) {
    MatrixXd P(t.size(), std::max(count, 1));
    P.col(0).setOnes();
    if (count > 1) P.col(1) = t;
    for (int n = 1; n + 1 < count; ++n)
        P.col(n + 1) = (((2.0 * n + 1.0) * t.array() * P.col(n).array() - n * P.col(n - 1).array()) / (n + 1.0)).matrix();
    return P.leftCols(count);
}

VectorXcd stack(const VelocityField& u, int row) {
    const int ny = u.grid()->ny;
    VectorXcd v(2 * ny);
    v.head(ny) = u.u1.data.row(row).transpose();
    v.tail(ny) = u.u2.data.row(row).transpose();
    return v;
}

} // namespace

VelocityField apply_L(const VelocityField& u, const BaseFlow& U, double R) {
    if (!(R > 0.0)) throw ArgumentError("apply_L: R must be positive");
    const VelocityField s = u.spectral();
    const cplx invR(1.0 / R);
    VelocityField out;
    out.u1 = invR * (differentiate(s.u1, Axis::x, 2) + differentiate(s.u1, Axis::y, 2));
    out.u2 = invR * (differentiate(s.u2, Axis::x, 2) + differentiate(s.u2, Axis::y, 2));
    out.u1 -= scale_columns(s.u2, U.dshear);
    out.u1 -= scale_columns(differentiate(s.u1, Axis::x, 1), U.shear);
    out.u2 -= scale_columns(differentiate(s.u2, Axis::x, 1), U.shear);
    out -= gradient(solve_p1(s, U, R));
    return out;
}

VelocityField apply_P(const VelocityField& f, const BaseFlow& U, double R, double eps) {
    VelocityField out = apply_L(f, U, R) + f.spectral();
    if (eps != 0.0) out -= cplx(eps) * convect(f, f);
    return out;
}

int OperatorAssembly::dim() const {
    int d = 0;
    for (const auto& b : blocks) d += static_cast<int>(b.phi.cols());
    return d;
}

std::vector<int> OperatorAssembly::offsets() const {
    std::vector<int> off;
    int d = 0;
    for (const auto& b : blocks) {
        off.push_back(d);
        d += static_cast<int>(b.phi.cols());
    }
    return off;
}

VectorXcd OperatorAssembly::coords(const VelocityField& f) const {
    const VelocityField s = f.spectral();
    VectorXcd c(dim());
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        VectorXcd rhs = mass_product(*grid, b.phi, stack(s, b.row));
        c.segment(off, m) = b.gram.ldlt().solve(rhs);
        off += m;
    }
    return c;
}

VelocityField OperatorAssembly::field(const VectorXcd& c) const {
    VelocityField u = VelocityField::zeros(grid);
    const int ny = grid->ny;
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        VectorXcd v = b.phi * c.segment(off, m);
        u.u1.data.row(b.row) = v.head(ny).transpose();
        u.u2.data.row(b.row) = v.tail(ny).transpose();
        off += m;
    }
    return u;
}

VectorXcd OperatorAssembly::orth_coords(const VelocityField& f) const {
    const VelocityField s = f.spectral();
    VectorXcd a(dim());
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        VectorXcd rhs = mass_product(*grid, b.phi, stack(s, b.row));
        a.segment(off, m) = b.chol.triangularView<Eigen::Lower>().solve(rhs);
        off += m;
    }
    return a;
}

VelocityField OperatorAssembly::field_from_orth(const VectorXcd& a) const {
    VectorXcd c(dim());
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        c.segment(off, m) = b.chol.adjoint().triangularView<Eigen::Upper>().solve(a.segment(off, m));
        off += m;
    }
    return field(c);
}

VelocityField OperatorAssembly::project(const VelocityField& f) const { return field(coords(f)); }

MatrixXcd OperatorAssembly::dense_matrix() const {
    MatrixXcd A = MatrixXcd::Zero(dim(), dim());
    int off = 0;
    for (const auto& b : blocks) {
        const auto m = b.phi.cols();
        A.block(off, off, m, m) = b.matrix;
        off += static_cast<int>(m);
    }
    return A;
}

MatrixXcd OperatorAssembly::dense_gram() const {
    MatrixXcd G = MatrixXcd::Zero(dim(), dim());
    int off = 0;
    for (const auto& b : blocks) {
        const auto m = b.phi.cols();
        G.block(off, off, m, m) = b.gram;
        off += static_cast<int>(m);
    }
    return G;
}

double OperatorAssembly::gram_condition() const {
    double worst = 1.0;
    for (const auto& b : blocks) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(b.gram, Eigen::EigenvaluesOnly);
        const VectorXd ev = es.eigenvalues();
        worst = std::max(worst, ev.maxCoeff() / ev.minCoeff());
    }
    return worst;
}

VectorXcd OperatorAssembly::apply_orth(const VectorXcd& a) const {
    VectorXcd out(a.size());
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        out.segment(off, m) = b.a_orth * a.segment(off, m);
        off += m;
    }
    return out;
}

double OperatorAssembly::htilde_sq_orth(const VectorXcd& a) const {
    double acc = 0.0;
    int off = 0;
    for (const auto& b : blocks) {
        const int m = static_cast<int>(b.phi.cols());
        acc += (b.h_factor * a.segment(off, m)).squaredNorm();
        off += m;
    }
    return acc;
}

OperatorAssembly assemble_L(const GridPtr& grid, const BaseFlow& U, double R) {
    if (!(R > 0.0)) throw ArgumentError("assemble_L: R must be positive");
    const SpectralGrid& g = *grid;
    OperatorAssembly A;
    A.grid = grid;
    A.R = R;
    A.U = U;
    const int ny = g.ny;
    const VectorXd& y = g.y_nodes;
    const VectorXd t = (2.0 * y.array() - 1.0).matrix();
    const MatrixXd leg = legendre_columns(t, ny - 2);
    const VectorXd bump2 = (y.array().square() * (1.0 - y.array()).square()).matrix();
    const VectorXd bump1 = (y.array() * (1.0 - y.array())).matrix();

    for (int r = 0; r < g.nx; ++r) {
        if (g.is_nyquist(r)) continue;
        ModeBlock b;
        b.row = r;
        b.k = g.wavenumber(r);
        const cplx ik(0.0, b.k);
        if (g.mode_index(r) == 0) {
            const int m = ny - 2;
            b.phi = MatrixXcd::Zero(2 * ny, m);
            for (int n = 0; n < m; ++n) b.phi.col(n).head(ny) = bump1.cwiseProduct(leg.col(n)).cast<cplx>();
        } else {
            const int m = ny - 4;
            b.phi.resize(2 * ny, m);
            for (int n = 0; n < m; ++n) {
                const VectorXd psi = bump2.cwiseProduct(leg.col(n));
                b.phi.col(n).head(ny) = (g.dy1 * psi).cast<cplx>();
                b.phi.col(n).tail(ny) = -ik * psi.cast<cplx>();
            }
        }
        const int m = static_cast<int>(b.phi.cols());
        b.phi_y.resize(2 * ny, m);
        b.phi_y.topRows(ny) = g.dy1.cast<cplx>() * b.phi.topRows(ny);
        b.phi_y.bottomRows(ny) = g.dy1.cast<cplx>() * b.phi.bottomRows(ny);

        MatrixXcd Lphi(2 * ny, m);
        for (int n = 0; n < m; ++n) {
            VelocityField e = VelocityField::zeros(grid);
            e.u1.data.row(r) = b.phi.col(n).head(ny).transpose();
            e.u2.data.row(r) = b.phi.col(n).tail(ny).transpose();
            Lphi.col(n) = stack(apply_L(e, U, R), r);
        }
        b.gram = mass_product(g, b.phi, b.phi);
        b.gram = (0.5 * (b.gram + b.gram.adjoint())).eval();
        b.stiff = mass_product(g, b.phi, Lphi);
        Eigen::LLT<MatrixXcd> llt(b.gram);
        if (llt.info() != Eigen::Success) throw NumericalError("assemble_L: Gram matrix is not positive definite");
        b.chol = llt.matrixL();
        b.matrix = llt.solve(b.stiff);
        MatrixXcd X = b.chol.triangularView<Eigen::Lower>().solve(b.stiff);
        b.a_orth = b.chol.triangularView<Eigen::Lower>().solve(X.adjoint()).adjoint();

        const MatrixXcd Gy = mass_product(g, b.phi_y, b.phi_y);
        const double k2 = b.k * b.k;
        MatrixXcd GH = b.gram + (k2 * b.gram + Gy) / R + (k2 / (R * R)) * Gy;
        MatrixXcd Y = b.chol.triangularView<Eigen::Lower>().solve(GH);
        b.h_orth = b.chol.triangularView<Eigen::Lower>().solve(Y.adjoint()).adjoint();
        b.h_orth = (0.5 * (b.h_orth + b.h_orth.adjoint())).eval();
        Eigen::LLT<MatrixXcd> hl(b.h_orth);
        if (hl.info() != Eigen::Success) throw NumericalError("assemble_L: Htilde Gram is not positive definite");
        b.h_factor = hl.matrixL().adjoint();
        A.blocks.push_back(std::move(b));
    }
    const double cond = A.gram_condition();
    if (cond > 1e12) {
        std::ostringstream os;
        os << "assemble_L: degenerate basis, Gram condition number " << cond;
        throw NumericalError(os.str());
    }
    return A;
}

VectorXcd assembled_eigenvalues(const OperatorAssembly& A) {
    VectorXcd ev(A.dim());
    int off = 0;
    for (const auto& b : A.blocks) {
        Eigen::ComplexEigenSolver<MatrixXcd> es(b.a_orth, false);
        ev.segment(off, b.a_orth.rows()) = es.eigenvalues();
        off += static_cast<int>(b.a_orth.rows());
    }
    return ev;
}

double spectral_radius(const OperatorAssembly& A) { return assembled_eigenvalues(A).cwiseAbs().maxCoeff(); }

namespace {

double min_singular(const MatrixXcd& M) {
    Eigen::JacobiSVD<MatrixXcd> svd(M);
    const VectorXd sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 1e-14 * sv(0))) throw NumericalError("resolvent: sI - L is numerically singular");
    return smin;
}

} // namespace

double resolvent_norm(const OperatorAssembly& A, cplx s) {
    double best = 0.0;
    for (const auto& b : A.blocks) {
        MatrixXcd M = -b.a_orth;
        M.diagonal().array() += s;
        best = std::max(best, 1.0 / min_singular(M));
    }
    return best;
}

double resolvent_norm_htilde(const OperatorAssembly& A, cplx s) {
    double best = 0.0;
    for (const auto& b : A.blocks) {
        MatrixXcd M = -b.a_orth;
        M.diagonal().array() += s;
        (void)min_singular(M);
        MatrixXcd T = b.h_factor * M.partialPivLu().inverse();
        Eigen::JacobiSVD<MatrixXcd> svd(T);
        best = std::max(best, svd.singularValues()(0));
    }
    return best;
}

ResolventScan resolvent_sup_scan(const OperatorAssembly& A, double omega_max, int n_points) {
    if (n_points < 64) throw ArgumentError("resolvent_sup_scan: n_points must be at least 64");
    if (omega_max <= 0.0) omega_max = 10.0 * (1.0 + spectral_radius(A));
    ResolventScan scan;
    scan.R = A.R;
    const double omega_min = 1e-3;
    const int half = (n_points - 4) / 2;
    std::vector<double> omegas;
    for (int i = 0; i < half; ++i) {
        double w = omega_min * std::pow(omega_max / omega_min, static_cast<double>(i) / (half - 1));
        omegas.push_back(w);
        omegas.push_back(-w);
    }
    omegas.push_back(0.0);
    std::sort(omegas.begin(), omegas.end());
    auto eval = [&](cplx s) { return ScanPoint{s, resolvent_norm(A, s), resolvent_norm_htilde(A, s)}; };
    for (double w : omegas) scan.points.push_back(eval(cplx(0.0, w)));
    const std::size_t n_axis = scan.points.size();
    for (double sr : {1e-3, 1e-2, 1e-1}) scan.points.push_back(eval(cplx(sr, 0.0)));

    // refine on the imaginary axis around the best sample
    std::size_t best = 0;
    for (std::size_t i = 0; i < n_axis; ++i)
        if (scan.points[i].norm_l2 > scan.points[best].norm_l2) best = i;
    scan.edge_flag = (best == 0 || best + 1 == n_axis);
    if (!scan.edge_flag) {
        double lo = omegas[best - 1], hi = omegas[best + 1];
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - gr * (hi - lo), c = lo + gr * (hi - lo);
        double fa = resolvent_norm(A, cplx(0.0, a)), fc = resolvent_norm(A, cplx(0.0, c));
        for (int it = 0; it < 40; ++it) {
            if (fa > fc) {
                hi = c;
                c = a;
                fc = fa;
                a = hi - gr * (hi - lo);
                fa = resolvent_norm(A, cplx(0.0, a));
            } else {
                lo = a;
                a = c;
                fa = fc;
                c = lo + gr * (hi - lo);
                fc = resolvent_norm(A, cplx(0.0, c));
            }
        }
        const double w = fa > fc ? a : c;
        scan.points.push_back(eval(cplx(0.0, w)));
    }
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        if (scan.points[i].norm_l2 > scan.sup) {
            scan.sup = scan.points[i].norm_l2;
            scan.argmax = static_cast<int>(i);
        }
        if (scan.points[i].norm_htilde > scan.sup_htilde) {
            scan.sup_htilde = scan.points[i].norm_htilde;
            scan.argmax_htilde = static_cast<int>(i);
        }
    }
    return scan;
}

double l2f_sharpness(const VelocityField& f, const BaseFlow& U, double R) {
    const double d = h6m_norm_sq(f, R).value;
    if (d == 0.0) return 0.0;
    return l2_norm_sq(apply_L(apply_L(f, U, R), U, R)) / d;
}

double l2f_sharpness_truncated(const VelocityField& f, const BaseFlow& U, double R) {
    const double d = h6m_truncated_sq(f, R);
    if (d == 0.0) return 0.0;
    return l2_norm_sq(apply_L(apply_L(f, U, R), U, R)) / d;
}

} // namespace couette
