#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>

namespace couette {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Axis { x, y };
enum class Rep { physical, spectral };
enum class Direction { to_spectral, to_physical };

/// Fourier (x, period 1) by Chebyshev-Gauss-Lobatto (y in [0,1]) grid.
///
/// Mode rows are stored with j ascending: row r carries j = r - nx/2 + 1,
/// wavenumber k = 2*pi*j. Physical rows are the points x_i = i/nx.
class SpectralGrid {
public:
    SpectralGrid(int nx, int ny);
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int nx;
    int ny;
    VectorXd y_nodes;
    MatrixXd dy1;
    MatrixXd dy2;
    VectorXd quad_w;
    /// Exact L2 Gram matrix of the nodal Lagrange basis on [0,1].
    MatrixXd mass;
    /// Forward DFT (physical rows -> mode rows) and its inverse.
    MatrixXcd dft;
    MatrixXcd idft;

    int mode_index(int row) const { return row - nx / 2 + 1; }
    int row_of_mode(int j) const { return j + nx / 2 - 1; }
    double wavenumber(int row) const;
    bool is_nyquist(int row) const { return mode_index(row) == nx / 2; }
    double x_point(int i) const { return static_cast<double>(i) / nx; }

    /// Chebyshev coefficients of nodal samples (variable 1-2y) and back.
    VectorXd to_cheb(const VectorXd& samples) const;
    VectorXd from_cheb(const VectorXd& coeffs) const;

    /// d^order/dy^order of one nodal profile through chopped Chebyshev
    /// coefficients; used for orders >= 3. scale is the coefficient
    /// magnitude the chop tolerance is relative to (0: the profile's own).
    VectorXcd dy_high(const VectorXcd& samples, int order, double scale = 0.0) const;
    /// Largest Chebyshev coefficient magnitude over the given nodal profiles
    /// (one per row).
    double cheb_scale(const MatrixXcd& rows) const;

    /// Barycentric interpolation matrix from the nodes to arbitrary points.
    MatrixXd interp_matrix(const VectorXd& points) const;

    /// Smallest spacing between adjacent y nodes.
    double min_dy() const;

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int nx, int ny);

/// Length of the significant part of a coefficient sequence (plateau
/// detection on the monotone envelope, tolerance tol relative to
/// max(scale, largest coefficient)).
int chop_length(const VectorXd& abs_coeffs, double tol, double scale = 0.0);

/// Scalar quantity on a grid. data is nx by ny; rows are x points or
/// Fourier modes according to rep, columns are y nodes.
struct ScalarField {
    GridPtr grid;
    Rep rep = Rep::spectral;
    MatrixXcd data;

    static ScalarField zeros(const GridPtr& g, Rep rep = Rep::spectral);
    ScalarField spectral() const;
    ScalarField physical() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(cplx c);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx c, ScalarField a);

ScalarField transform(const ScalarField& f, Direction dir);
ScalarField differentiate(const ScalarField& f, Axis axis, int order);

/// Integral over the unit cell of conj(f) g.
cplx inner_product(const ScalarField& f, const ScalarField& g);

/// Largest deviation from Hermitian mode symmetry c_{-j} = conj(c_j).
double hermitian_defect(const ScalarField& f);

/// Evaluate a field at an arbitrary point (Fourier sum times barycentric
/// interpolation in y).
cplx evaluate(const ScalarField& f, double x, double y);

} // namespace couette
