#pragma once

#include "couette/fields.hpp"

#include <array>

namespace couette {

/// Squared L2 norms of every y-derivative (orders 0..6) of both
/// components, resolved per Fourier row. Mixed x-derivatives follow from
/// the wavenumber weights.
class DerivativeTable {
public:
    explicit DerivativeTable(const VelocityField& u, int max_y_order = 6);

    /// ||d_x^a d_y^b u_c||^2 with c in {1,2}.
    double sq(int c, int a, int b) const;
    /// sum over both components and all (a,b) with a+b = n, each
    /// multi-index once.
    double total_order_sq(int n) const;

private:
    GridPtr grid_;
    int max_y_order_;
    // rows: component*(max_y_order+1)+b, cols: Fourier rows
    MatrixXd q_;
};

double l2_norm_sq(const VelocityField& u);
/// sum_{n<=order} ||D^n u||^2, order in 0..4.
double hn_norm_sq(const VelocityField& u, int order);

struct HtildeNorm {
    double value = 0.0;
    /// ||u||^2, R^-1 ||Du||^2, R^-2 ||u_xy||^2
    std::array<double, 3> summands{};
};

struct H6mNorm {
    double value = 0.0;
    /// ||u||_H2^2, R^-2||D3u||^2, R^-2||D4u||^2,
    /// R^-4||u2_xxyyy||^2, R^-4||u2_yyyyy||^2, R^-4||u2_yyyyyy||^2
    std::array<double, 6> summands{};
};

HtildeNorm htilde_norm_sq(const VelocityField& u, double R);
H6mNorm h6m_norm_sq(const VelocityField& u, double R);
/// The three trailing sixth-order summands dropped.
double h6m_truncated_sq(const VelocityField& u, double R);

/// Largest pointwise Euclidean magnitude over the collocation points.
double max_norm(const VelocityField& u);
/// Same, with the maximum over x taken on the continuous trigonometric
/// interpolant at every y node (dense sampling then golden refinement).
double max_norm_x_refined(const VelocityField& u);

/// |u|_inf^2 / (R ||u||_Htilde^2)
double embedding_ratio(const VelocityField& u, double R);

struct ScaleDecomposition {
    double R = 0.0;
    double h6m = 0.0; // norm, not squared
    /// ||f||_H2, ||D3f||, ||D4f||, ||f2_xxyyy||, ||f2_yyyyy||, ||f2_yyyyyy||
    std::array<double, 6> component{};
    /// component / h6m
    std::array<double, 6> ratio{};
};

ScaleDecomposition scale_decomposition(const VelocityField& f, double R);

struct NormReport {
    double R = 0.0;
    double l2 = 0.0;
    std::array<double, 2> h_n{}; // H1, H2 (squared)
    HtildeNorm htilde;
    H6mNorm h6m;
    double max_norm = 0.0;
};

NormReport norm_report(const VelocityField& u, double R);

} // namespace couette
