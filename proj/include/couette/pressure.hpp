#pragma once

#include "couette/fields.hpp"

#include <Eigen/LU>

#include <memory>
#include <vector>

namespace couette {

/// How the k = 0 Neumann compatibility condition is enforced.
enum class CompatPolicy {
    check,  ///< throw SolvabilityError when violated
    project ///< remove the incompatible component silently
};

/// Per-mode collocation solver for  h'' - k^2 h = s,  h'(0) = alpha,
/// h'(1) = beta; the y = 0 and y = 1 collocation rows carry the
/// boundary-derivative conditions. The k = 0 mode is bordered with the
/// mean-zero constraint and the left null vector of the singular operator.
class NeumannPoissonSolver {
public:
    explicit NeumannPoissonSolver(GridPtr grid);

    /// Relative size of the incompatible part of the k = 0 data.
    double compat_residual(const VectorXcd& src0, cplx alpha0, cplx beta0) const;

    VectorXcd solve_mode(int row, const VectorXcd& src, cplx alpha, cplx beta, CompatPolicy policy) const;

    ScalarField solve(const ScalarField& source, const VectorXcd& alpha, const VectorXcd& beta,
                      CompatPolicy policy = CompatPolicy::check) const;

    const GridPtr& grid() const { return grid_; }

    static constexpr double compat_tol = 1e-8;

private:
    VectorXd rhs_real(int row, const VectorXd& src, double alpha, double beta) const;

    GridPtr grid_;
    std::vector<Eigen::PartialPivLU<MatrixXd>> lu_; // one per Fourier row
    Eigen::PartialPivLU<MatrixXd> lu0_;             // bordered k = 0 system
    VectorXd z_;                                    // unit left null vector at k = 0
};

/// Shared solver for a grid (built on first use).
std::shared_ptr<const NeumannPoissonSolver> neumann_solver(const GridPtr& grid);

ScalarField zero_mean(ScalarField h);
VelocityField gradient(const ScalarField& h);

/// Delta h = div g with h_y = 0 at both walls; mean-zero.
ScalarField solve_neumann_poisson(const VelocityField& g, CompatPolicy policy = CompatPolicy::check);

/// Exponential profiles of the harmonic lift, one pair per Fourier row.
struct ModeCoefficients {
    GridPtr grid;
    VectorXd absk;
    VectorXcd a;       // coefficient of e^{|k|(y-1)}
    VectorXcd b;       // coefficient of e^{-|k|y}
    cplx k0_slope = 0; // k = 0 profile slope*(y - 1/2)

    cplx value(int row, double y) const;
    cplx derivative(int row, double y, int order) const;
};

struct HarmonicLift {
    ScalarField h;
    ModeCoefficients coeffs;
};

/// Harmonic function with h_y(x,0) = alpha(x), h_y(x,1) = beta(x), given by
/// Fourier coefficients (one per row). Requires alpha_0 = beta_0.
HarmonicLift harmonic_lift(const GridPtr& grid, const VectorXcd& alpha, const VectorXcd& beta);

/// Wall data (1/R) u2_yy at y = 0 and y = 1, per Fourier row.
void p1_wall_data(const VelocityField& u, double R, VectorXcd& alpha, VectorXcd& beta);

struct P1Parts {
    ScalarField h1;
    HarmonicLift h2;
    ScalarField p1;
};

P1Parts solve_p1_parts(const VelocityField& u, const BaseFlow& U, double R, CompatPolicy policy = CompatPolicy::check);
ScalarField solve_p1(const VelocityField& u, const BaseFlow& U, double R, CompatPolicy policy = CompatPolicy::check);
ScalarField solve_p2(const VelocityField& u, CompatPolicy policy = CompatPolicy::check, bool dealias = false);

struct PressureRatios {
    double r1_sq = 0.0;  // trailing terms squared
    double r1_lin = 0.0; // trailing terms unsquared
    double r2 = 0.0;
};

PressureRatios verify_pressure_estimates(const VelocityField& u, double R);

/// ||grad h||^2 / ||g||^2 for the Neumann problem with source div g.
double neumann_energy_ratio(const VelocityField& g);

} // namespace couette
