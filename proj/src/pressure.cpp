#include "couette/pressure.hpp"

#include "couette/error.hpp"
#include "couette/norms.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace couette {

NeumannPoissonSolver::NeumannPoissonSolver(GridPtr grid) : grid_(std::move(grid)) {
    const SpectralGrid& g = *grid_;
    const int ny = g.ny, N = ny - 1;
    auto op = [&](double k) {
        MatrixXd A = g.dy2 - k * k * MatrixXd::Identity(ny, ny);
        A.row(0) = g.dy1.row(0);
        A.row(N) = g.dy1.row(N);
        return A;
    };
    lu_.reserve(g.nx);
    for (int r = 0; r < g.nx; ++r) {
        if (g.mode_index(r) == 0) {
            lu_.emplace_back();
            continue;
        }
        lu_.emplace_back(op(g.wavenumber(r)));
    }
    const MatrixXd A0 = op(0.0);
    Eigen::JacobiSVD<MatrixXd> svd(A0, Eigen::ComputeFullU);
    z_ = svd.matrixU().col(ny - 1);
    MatrixXd B = MatrixXd::Zero(ny + 1, ny + 1);
    B.topLeftCorner(ny, ny) = A0;
    B.col(ny).head(ny) = z_;
    B.row(ny).head(ny) = g.quad_w.transpose();
    lu0_.compute(B);
}

VectorXd NeumannPoissonSolver::rhs_real(int, const VectorXd& src, double alpha, double beta) const {
    VectorXd b = src;
    b(0) = alpha;
    b(b.size() - 1) = beta;
    return b;
}

double NeumannPoissonSolver::compat_residual(const VectorXcd& src0, cplx alpha0, cplx beta0) const {
    VectorXcd b = src0;
    b(0) = alpha0;
    b(b.size() - 1) = beta0;
    const double nb = b.norm();
    if (nb == 0.0) return 0.0;
    return std::abs(z_.cast<cplx>().dot(b)) / nb;
}

VectorXcd NeumannPoissonSolver::solve_mode(int row, const VectorXcd& src, cplx alpha, cplx beta,
                                           CompatPolicy policy) const {
    const SpectralGrid& g = *grid_;
    const int ny = g.ny;
    VectorXcd h(ny);
    if (g.mode_index(row) != 0) {
        h.real() = lu_[row].solve(rhs_real(row, src.real(), alpha.real(), beta.real()));
        h.imag() = lu_[row].solve(rhs_real(row, src.imag(), alpha.imag(), beta.imag()));
        return h;
    }
    if (policy == CompatPolicy::check) {
        const double res = compat_residual(src, alpha, beta);
        if (res > compat_tol) {
            std::ostringstream os;
            os << "Neumann problem is incompatible: k=0 residual " << res << " exceeds " << compat_tol;
            throw SolvabilityError(os.str());
        }
    }
    for (int part = 0; part < 2; ++part) {
        VectorXd b = VectorXd::Zero(ny + 1);
        b.head(ny) = rhs_real(row, part == 0 ? VectorXd(src.real()) : VectorXd(src.imag()),
                              part == 0 ? alpha.real() : alpha.imag(), part == 0 ? beta.real() : beta.imag());
        VectorXd sol = lu0_.solve(b);
        if (part == 0) h.real() = sol.head(ny);
        else h.imag() = sol.head(ny);
    }
    return h;
}

ScalarField NeumannPoissonSolver::solve(const ScalarField& source, const VectorXcd& alpha, const VectorXcd& beta,
                                        CompatPolicy policy) const {
    const SpectralGrid& g = *grid_;
    const ScalarField s = source.spectral();
    ScalarField h = ScalarField::zeros(grid_);
    for (int r = 0; r < g.nx; ++r)
        h.data.row(r) = solve_mode(r, s.data.row(r).transpose(), alpha(r), beta(r), policy).transpose();
    return h;
}

std::shared_ptr<const NeumannPoissonSolver> neumann_solver(const GridPtr& grid) {
    struct Entry {
        std::weak_ptr<const SpectralGrid> grid;
        std::shared_ptr<const NeumannPoissonSolver> solver;
    };
    static std::mutex mu;
    static std::map<const SpectralGrid*, Entry> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = cache.begin(); it != cache.end();) {
        if (it->second.grid.expired()) it = cache.erase(it);
        else ++it;
    }
    auto it = cache.find(grid.get());
    if (it != cache.end()) return it->second.solver;
    auto s = std::make_shared<const NeumannPoissonSolver>(grid);
    cache[grid.get()] = Entry{grid, s};
    return s;
}

ScalarField zero_mean(ScalarField h) {
    h = h.spectral();
    const SpectralGrid& g = *h.grid;
    const int r0 = g.row_of_mode(0);
    const cplx mean = g.quad_w.cast<cplx>().dot(h.data.row(r0).transpose());
    h.data.row(r0).array() -= mean;
    return h;
}

VelocityField gradient(const ScalarField& h) { return {differentiate(h, Axis::x, 1), differentiate(h, Axis::y, 1)}; }

ScalarField solve_neumann_poisson(const VelocityField& g, CompatPolicy policy) {
    const GridPtr& grid = g.grid();
    const VectorXcd zero = VectorXcd::Zero(grid->nx);
    return neumann_solver(grid)->solve(divergence(g), zero, zero, policy);
}

cplx ModeCoefficients::value(int row, double y) const { return derivative(row, y, 0); }

cplx ModeCoefficients::derivative(int row, double y, int order) const {
    const double k = absk(row);
    if (k == 0.0) {
        if (order == 0) return k0_slope * (y - 0.5);
        return order == 1 ? k0_slope : cplx(0.0);
    }
    const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
    return std::pow(k, order) * (a(row) * std::exp(k * (y - 1.0)) + sgn * b(row) * std::exp(-k * y));
}

HarmonicLift harmonic_lift(const GridPtr& grid, const VectorXcd& alpha, const VectorXcd& beta) {
    const SpectralGrid& g = *grid;
    if (alpha.size() != g.nx || beta.size() != g.nx) throw ArgumentError("harmonic_lift: wall data must have nx entries");
    HarmonicLift out{ScalarField::zeros(grid), ModeCoefficients{grid, VectorXd::Zero(g.nx), VectorXcd::Zero(g.nx),
                                                               VectorXcd::Zero(g.nx), 0.0}};
    ModeCoefficients& mc = out.coeffs;
    const double scale = std::max(alpha.cwiseAbs().maxCoeff(), beta.cwiseAbs().maxCoeff());
    for (int r = 0; r < g.nx; ++r) {
        const double k = std::abs(g.wavenumber(r));
        mc.absk(r) = k;
        if (k == 0.0) {
            const cplx a0 = alpha(r), b0 = beta(r);
            if (std::abs(a0 - b0) > 1e-10 * (std::abs(a0) + std::abs(b0)) + 1e-13 * scale) {
                std::ostringstream os;
                os << "harmonic lift: k=0 wall data differ (" << a0 << " vs " << b0 << ")";
                throw SolvabilityError(os.str());
            }
            mc.k0_slope = 0.5 * (a0 + b0);
        } else {
            const double Einv = std::exp(-k);
            const double den = (1.0 - Einv * Einv) * k;
            mc.a(r) = (beta(r) - alpha(r) * Einv) / den;
            mc.b(r) = (beta(r) * Einv - alpha(r)) / den;
        }
        for (int m = 0; m < g.ny; ++m) out.h.data(r, m) = mc.value(r, g.y_nodes(m));
    }
    return out;
}

void p1_wall_data(const VelocityField& u, double R, VectorXcd& alpha, VectorXcd& beta) {
    const GridPtr& grid = u.grid();
    const ScalarField d2 = differentiate(u.u2.spectral(), Axis::y, 2);
    alpha = d2.data.col(0) / R;
    beta = d2.data.col(grid->ny - 1) / R;
}

namespace {

ScalarField scale_columns(const ScalarField& f, const VectorXd& prof) {
    ScalarField s = f.spectral();
    s.data = s.data * prof.cast<cplx>().asDiagonal();
    return s;
}

} // namespace

P1Parts solve_p1_parts(const VelocityField& u, const BaseFlow& U, double R, CompatPolicy policy) {
    if (!(R > 0.0)) throw ArgumentError("solve_p1: R must be positive");
    const GridPtr& grid = u.grid();
    const VelocityField s = u.spectral();
    // g = (u.grad)U + (U.grad)u for a parallel shear U = (U1(y), 0)
    VelocityField gsum;
    gsum.u1 = scale_columns(s.u2, U.dshear) + scale_columns(differentiate(s.u1, Axis::x, 1), U.shear);
    gsum.u2 = scale_columns(differentiate(s.u2, Axis::x, 1), U.shear);
    const ScalarField src = cplx(-1.0) * divergence(gsum);
    const auto solver = neumann_solver(grid);
    const VectorXcd zero = VectorXcd::Zero(grid->nx);
    P1Parts parts;
    parts.h1 = solver->solve(src, zero, zero, policy);
    VectorXcd alpha, beta;
    p1_wall_data(s, R, alpha, beta);
    parts.h2 = harmonic_lift(grid, alpha, beta);
    parts.p1 = parts.h1 + parts.h2.h;
    return parts;
}

ScalarField solve_p1(const VelocityField& u, const BaseFlow& U, double R, CompatPolicy policy) {
    return solve_p1_parts(u, U, R, policy).p1;
}

ScalarField solve_p2(const VelocityField& u, CompatPolicy policy, bool dealias) {
    const VelocityField c = convect(u, u, dealias);
    const GridPtr& grid = u.grid();
    const VectorXcd zero = VectorXcd::Zero(grid->nx);
    return neumann_solver(grid)->solve(cplx(-1.0) * divergence(c), zero, zero, policy);
}

PressureRatios verify_pressure_estimates(const VelocityField& u, double R) {
    PressureRatios out;
    const double l2 = l2_norm_sq(u);
    if (l2 == 0.0) return out;
    const BaseFlow U = couette_base(u.grid());
    const double gp1 = l2_norm_sq(gradient(solve_p1(u, U, R)));
    DerivativeTable t(u, 3);
    const double h1 = t.total_order_sq(0) + t.total_order_sq(1);
    const double yy = t.sq(2, 0, 2), yyy = t.sq(2, 0, 3);
    out.r1_sq = gp1 / (h1 + (yy + yyy) / (R * R));
    out.r1_lin = gp1 / (h1 + (std::sqrt(yy) + std::sqrt(yyy)) / (R * R));
    const double conv = l2_norm_sq(convect(u, u));
    out.r2 = conv > 0.0 ? l2_norm_sq(gradient(solve_p2(u))) / conv : 0.0;
    return out;
}

double neumann_energy_ratio(const VelocityField& g) {
    const double gg = l2_norm_sq(g);
    if (gg == 0.0) return 0.0;
    return l2_norm_sq(gradient(solve_neumann_poisson(g))) / gg;
}

} // namespace couette
