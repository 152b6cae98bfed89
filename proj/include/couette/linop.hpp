#pragma once

#include "couette/fields.hpp"

#include <vector>

namespace couette {

/// (1/R) Lap u - (u.grad)U - (U.grad)u - grad p1, evaluated pointwise
/// (no projection onto the divergence-free subspace).
VelocityField apply_L(const VelocityField& u, const BaseFlow& U, double R);

/// (L + I) f - eps (f.grad) f
VelocityField apply_P(const VelocityField& f, const BaseFlow& U, double R, double eps);

/// Operator restricted to one Fourier row. Basis functions are sampled as
/// stacked [u1; u2] columns of length 2*ny.
struct ModeBlock {
    int row = 0;
    double k = 0.0;
    MatrixXcd phi;     // basis samples
    MatrixXcd phi_y;   // their y-derivatives
    MatrixXcd gram;    // L2 Gram matrix G
    MatrixXcd stiff;   // <phi_i, L phi_j>
    MatrixXcd matrix;  // G^-1 stiff
    MatrixXcd chol;    // lower factor, G = chol chol^H
    MatrixXcd a_orth;  // operator in L2-orthonormal coordinates
    MatrixXcd h_orth;  // Htilde Gram in those coordinates
    MatrixXcd h_factor; // upper factor S^H with h_orth = S S^H
};

/// Block-diagonal Galerkin representation of L on the span of
/// divergence-free, wall-clamped fields. Rows |j| < nx/2 are retained:
/// k != 0 rows use streamfunctions y^2(1-y)^2 P_n(2y-1), n < ny-4; the
/// k = 0 row uses x-independent u1 = y(1-y) P_n(2y-1), n < ny-2.
class OperatorAssembly {
public:
    GridPtr grid;
    double R = 0.0;
    BaseFlow U;
    std::vector<ModeBlock> blocks;

    int dim() const;
    /// Galerkin coordinates (G^-1 Phi^H M f), concatenated over blocks.
    VectorXcd coords(const VelocityField& f) const;
    VelocityField field(const VectorXcd& c) const;
    /// L2-orthonormal coordinates and back.
    VectorXcd orth_coords(const VelocityField& f) const;
    VelocityField field_from_orth(const VectorXcd& a) const;
    /// L2-orthogonal projection onto the subspace.
    VelocityField project(const VelocityField& f) const;

    MatrixXcd dense_matrix() const;
    MatrixXcd dense_gram() const;
    /// Condition number of the worst block Gram matrix.
    double gram_condition() const;

    /// Operator applied in orthonormal coordinates.
    VectorXcd apply_orth(const VectorXcd& a) const;

    /// Htilde norm squared of a subspace element from its orthonormal coordinates.
    double htilde_sq_orth(const VectorXcd& a) const;

    std::vector<int> offsets() const;
};

OperatorAssembly assemble_L(const GridPtr& grid, const BaseFlow& U, double R);

/// Eigenvalues of the pencil (stiff, gram), all blocks.
VectorXcd assembled_eigenvalues(const OperatorAssembly& A);

/// ||(sI - L)^-1|| in the L2 geometry.
double resolvent_norm(const OperatorAssembly& A, cplx s);
/// ||(sI - L)^-1|| from L2 to Htilde.
double resolvent_norm_htilde(const OperatorAssembly& A, cplx s);

struct ScanPoint {
    cplx s;
    double norm_l2 = 0.0;
    double norm_htilde = 0.0;
};

struct ResolventScan {
    double R = 0.0;
    std::vector<ScanPoint> points;
    int argmax = -1; // index into points (L2 norm)
    double sup = 0.0;
    int argmax_htilde = -1;
    double sup_htilde = 0.0;
    /// sup sits on the outermost imaginary-axis sample
    bool edge_flag = false;
};

/// Scan of s = i omega on a symmetric log grid plus s = 0 and a few small
/// positive reals, followed by golden-section refinement at the maximum.
/// omega_max <= 0 selects 10 (1 + spectral radius).
ResolventScan resolvent_sup_scan(const OperatorAssembly& A, double omega_max, int n_points);

double spectral_radius(const OperatorAssembly& A);

/// ||L^2 f||^2 / ||f||^2_H6m (0 for f = 0).
double l2f_sharpness(const VelocityField& f, const BaseFlow& U, double R);
/// Same ratio against the H6m norm with its three sixth-order terms dropped.
double l2f_sharpness_truncated(const VelocityField& f, const BaseFlow& U, double R);

} // namespace couette
