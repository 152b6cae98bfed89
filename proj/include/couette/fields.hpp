#pragma once

#include "couette/spectral.hpp"

#include <cstdint>
#include <string>

namespace couette {

struct VelocityField {
    ScalarField u1;
    ScalarField u2;

    const GridPtr& grid() const { return u1.grid; }
    static VelocityField zeros(const GridPtr& g, Rep rep = Rep::spectral);
    VelocityField spectral() const { return {u1.spectral(), u2.spectral()}; }
    VelocityField physical() const { return {u1.physical(), u2.physical()}; }

    VelocityField& operator+=(const VelocityField& o);
    VelocityField& operator-=(const VelocityField& o);
    VelocityField& operator*=(cplx c);
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(cplx c, VelocityField a);

/// Sum of the component inner products.
cplx inner_product(const VelocityField& u, const VelocityField& w);

/// Steady parallel shear (U1(y), 0) with constant pressure.
struct BaseFlow {
    VelocityField U;
    double P = 0.0;
    VectorXd shear;  // U1 at the y nodes
    VectorXd dshear; // U1' at the y nodes

    /// Rejects anything that is not x-independent with U2 = 0.
    static BaseFlow from_field(const VelocityField& U, double P = 0.0);
};

BaseFlow couette_base(const GridPtr& grid);

ScalarField divergence(const VelocityField& u);

/// Pointwise product evaluated on the collocation points. With dealias set,
/// both factors and the result keep only |j| <= nx/3.
ScalarField product(const ScalarField& a, const ScalarField& b, bool dealias = false);

/// (a . grad) b
VelocityField convect(const VelocityField& a, const VelocityField& b, bool dealias = false);

/// Keep only modes |j| <= nx/3.
ScalarField dealias_truncate(const ScalarField& f);

struct RandomFieldOptions {
    /// Degree of the Legendre factor of the streamfunction profile; negative
    /// selects (ny-1)/2 - 4 so quadratic products stay below degree ny-1.
    int y_degree = -1;
    /// Also draw an x-independent streamfunction component.
    bool include_mean = false;
};

/// Real, divergence-free, wall-clamped field u = (psi_y, -psi_x) from a
/// random streamfunction y^2(1-y)^2 * sum a_jn P_n(2y-1) e^{2 pi i j x}.
VelocityField random_divfree_field(const GridPtr& grid, std::uint64_t seed, int max_mode, double smoothness,
                                   const RandomFieldOptions& opts = {});

/// f scaled to unit H6m norm at Reynolds number R.
VelocityField normalize_h6m(const VelocityField& f, double R);

// ---- snapshots -----------------------------------------------------------

struct Snapshot {
    VelocityField u;
    double R = 0.0;
    double t = 0.0;
};

/// Binary little-endian "CFS1" file.
void write_snapshot(const std::string& path, const VelocityField& u, double R, double t);
/// CSV mirror: '#' meta lines carrying nx, ny, R, t, then rows
/// component,j,m,re,im.
void write_snapshot_csv(const std::string& path, const VelocityField& u, double R, double t);
/// Reads either format (detected by the magic bytes). Throws IoError.
Snapshot read_snapshot(const std::string& path);

} // namespace couette
