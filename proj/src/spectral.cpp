#include "couette/spectral.hpp"

#include "couette/error.hpp"

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

namespace couette {

namespace {

constexpr double pi = std::numbers::pi;

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Gauss-Legendre rule on [0,1] via the symmetric Jacobi matrix.
void gauss_legendre(int q, VectorXd& nodes, VectorXd& weights) {
    MatrixXd J = MatrixXd::Zero(q, q);
    for (int n = 1; n < q; ++n) {
        double b = n / std::sqrt(4.0 * n * n - 1.0);
        J(n, n - 1) = b;
        J(n - 1, n) = b;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
    nodes = (es.eigenvalues().array() + 1.0) / 2.0;
    weights = es.eigenvectors().row(0).transpose().array().square(); // sums to 1 on [0,1]
}

} // namespace

struct SpectralGrid::Plans {
    fftw_plan dct = nullptr;
};

SpectralGrid::SpectralGrid(int nx_, int ny_) : nx(nx_), ny(ny_), plans_(std::make_unique<Plans>()) {
    const int N = ny - 1;
    y_nodes.resize(ny);
    VectorXd theta(ny);
    for (int m = 0; m < ny; ++m) {
        y_nodes(m) = (1.0 - std::sin(pi * (N - 2 * m) / (2.0 * N))) / 2.0;
        theta(m) = pi * m / N;
    }

    VectorXd w(ny);
    for (int m = 0; m < ny; ++m) w(m) = (m % 2 == 0) ? 1.0 : -1.0;
    w(0) *= 0.5;
    w(N) *= 0.5;

    dy1 = MatrixXd::Zero(ny, ny);
    for (int i = 0; i < ny; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (i == j) continue;
            double diff = std::sin((theta(i) + theta(j)) / 2.0) * std::sin((theta(i) - theta(j)) / 2.0);
            dy1(i, j) = (w(j) / w(i)) / diff;
        }
        dy1(i, i) = -dy1.row(i).sum();
    }
    dy2 = MatrixXd::Zero(ny, ny);
    for (int i = 0; i < ny; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (i == j) continue;
            double diff = std::sin((theta(i) + theta(j)) / 2.0) * std::sin((theta(i) - theta(j)) / 2.0);
            dy2(i, j) = 2.0 * dy1(i, j) * (dy1(i, i) - 1.0 / diff);
        }
        dy2(i, i) = -dy2.row(i).sum();
    }

    VectorXd gl_x, gl_w;
    gauss_legendre(ny + 1, gl_x, gl_w);
    MatrixXd P = interp_matrix(gl_x);
    mass = P.transpose() * gl_w.asDiagonal() * P;
    mass = 0.5 * (mass + mass.transpose()).eval();
    quad_w = P.transpose() * gl_w;

    dft.resize(nx, nx);
    idft.resize(nx, nx);
    for (int r = 0; r < nx; ++r) {
        int j = mode_index(r);
        for (int i = 0; i < nx; ++i) {
            double ang = 2.0 * pi * j * i / nx;
            dft(r, i) = std::polar(1.0 / nx, -ang);
            idft(i, r) = std::polar(1.0, ang);
        }
    }

    std::lock_guard<std::mutex> lock(planner_mutex());
    VectorXd a(ny), b(ny);
    plans_->dct = fftw_plan_r2r_1d(ny, a.data(), b.data(), FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->dct) throw NumericalError("fftw: could not plan DCT-I of size " + std::to_string(ny));
}

SpectralGrid::~SpectralGrid() {
    if (plans_ && plans_->dct) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plans_->dct);
    }
}

double SpectralGrid::wavenumber(int row) const { return 2.0 * pi * mode_index(row); }

VectorXd SpectralGrid::to_cheb(const VectorXd& samples) const {
    VectorXd in = samples, out(ny);
    fftw_execute_r2r(plans_->dct, in.data(), out.data());
    const int N = ny - 1;
    out /= N;
    out(0) *= 0.5;
    out(N) *= 0.5;
    return out;
}

VectorXd SpectralGrid::from_cheb(const VectorXd& coeffs) const {
    VectorXd in = 0.5 * coeffs, out(ny);
    const int N = ny - 1;
    in(0) *= 2.0;
    in(N) *= 2.0;
    fftw_execute_r2r(plans_->dct, in.data(), out.data());
    return out;
}

int chop_length(const VectorXd& abs_coeffs, double tol, double scale) {
    const int n = static_cast<int>(abs_coeffs.size());
    // profiles far below the reference scale are round-off: drop them
    if (n > 0 && abs_coeffs.maxCoeff() < tol * scale) return 0;
    if (n < 17) return n;
    VectorXd env(n);
    env(n - 1) = abs_coeffs(n - 1);
    for (int j = n - 2; j >= 0; --j) env(j) = std::max(abs_coeffs(j), env(j + 1));
    if (env(0) == 0.0) return 1;
    env /= std::max(env(0), scale);

    // 1-based indices below follow the usual statement of the rule.
    auto E = [&](int j) { return env(j - 1); };
    int plateau = 0, j2 = 0;
    for (int j = 2; j <= n; ++j) {
        j2 = static_cast<int>(std::lround(1.25 * j + 5));
        if (j2 > n) return n;
        double e1 = E(j), e2 = E(j2);
        double r = 3.0 * (1.0 - std::log(e1) / std::log(tol));
        if (e1 == 0.0 || e2 / e1 > r) {
            plateau = j - 1;
            break;
        }
    }
    if (E(plateau) == 0.0) return plateau;

    const double floor76 = std::pow(tol, 7.0 / 6.0);
    int j3 = 0;
    for (int j = 0; j < n; ++j)
        if (env(j) >= floor76) ++j3;
    if (j3 < j2) {
        j2 = j3 + 1;
        env(j2 - 1) = floor76;
    }
    int best = 1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= j2; ++j) {
        double val = std::log10(E(j)) + (j2 > 1 ? (-1.0 / 3.0) * std::log10(tol) * (j - 1) / (j2 - 1) : 0.0);
        if (val < best_val) {
            best_val = val;
            best = j;
        }
    }
    return std::max(best - 1, 1);
}

double SpectralGrid::cheb_scale(const MatrixXcd& rows) const {
    double m = 0.0;
    for (int r = 0; r < rows.rows(); ++r) {
        const VectorXd ar = to_cheb(rows.row(r).real().transpose());
        const VectorXd ai = to_cheb(rows.row(r).imag().transpose());
        m = std::max(m, (ar.array().square() + ai.array().square()).sqrt().maxCoeff());
    }
    return m;
}

VectorXcd SpectralGrid::dy_high(const VectorXcd& samples, int order, double scale) const {
    VectorXd ar = to_cheb(samples.real());
    VectorXd ai = to_cheb(samples.imag());
    const int keep = chop_length((ar.array().square() + ai.array().square()).sqrt().matrix(),
                                 std::numeric_limits<double>::epsilon(), scale);
    for (int n = keep; n < ny; ++n) ar(n) = ai(n) = 0.0;
    const int N = ny - 1;
    auto deriv = [N](VectorXd& a) {
        VectorXd b = VectorXd::Zero(N + 1);
        for (int n = N; n >= 1; --n) b(n - 1) = (n + 1 <= N ? b(n + 1) : 0.0) + 2.0 * n * a(n);
        b(0) *= 0.5;
        a = -2.0 * b; // d/dy = -2 d/dx for x = 1 - 2y
    };
    for (int o = 0; o < order; ++o) {
        deriv(ar);
        deriv(ai);
    }
    VectorXcd out(ny);
    out.real() = from_cheb(ar);
    out.imag() = from_cheb(ai);
    return out;
}

MatrixXd SpectralGrid::interp_matrix(const VectorXd& points) const {
    const int N = ny - 1;
    VectorXd w(ny);
    for (int m = 0; m < ny; ++m) w(m) = (m % 2 == 0) ? 1.0 : -1.0;
    w(0) *= 0.5;
    w(N) *= 0.5;
    MatrixXd P = MatrixXd::Zero(points.size(), ny);
    for (Eigen::Index q = 0; q < points.size(); ++q) {
        double t = points(q);
        int hit = -1;
        for (int m = 0; m < ny; ++m)
            if (t == y_nodes(m)) hit = m;
        if (hit >= 0) {
            P(q, hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int m = 0; m < ny; ++m) {
            double c = w(m) / (t - y_nodes(m));
            P(q, m) = c;
            denom += c;
        }
        P.row(q) /= denom;
    }
    return P;
}

double SpectralGrid::min_dy() const {
    double h = 1.0;
    for (int m = 0; m + 1 < ny; ++m) h = std::min(h, y_nodes(m + 1) - y_nodes(m));
    return h;
}

GridPtr make_grid(int nx, int ny) {
    if (nx <= 0 || nx % 2 != 0) throw ArgumentError("make_grid: nx must be a positive even integer, got " + std::to_string(nx));
    if (ny < 8) throw ArgumentError("make_grid: ny must be at least 8, got " + std::to_string(ny));
    return std::make_shared<const SpectralGrid>(nx, ny);
}

// ---- ScalarField ---------------------------------------------------------

ScalarField ScalarField::zeros(const GridPtr& g, Rep rep) {
    return ScalarField{g, rep, MatrixXcd::Zero(g->nx, g->ny)};
}

ScalarField ScalarField::spectral() const { return rep == Rep::spectral ? *this : transform(*this, Direction::to_spectral); }
ScalarField ScalarField::physical() const { return rep == Rep::physical ? *this : transform(*this, Direction::to_physical); }

static void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
    if (a.grid != b.grid && (a.grid->nx != b.grid->nx || a.grid->ny != b.grid->ny))
        throw ArgumentError(std::string(what) + ": fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(*this, o, "add");
    data += (o.rep == rep ? o : (rep == Rep::spectral ? o.spectral() : o.physical())).data;
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(*this, o, "subtract");
    data -= (o.rep == rep ? o : (rep == Rep::spectral ? o.spectral() : o.physical())).data;
    return *this;
}

ScalarField& ScalarField::operator*=(cplx c) {
    data *= c;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(cplx c, ScalarField a) { return a *= c; }

ScalarField transform(const ScalarField& f, Direction dir) {
    ScalarField out = f;
    if (dir == Direction::to_spectral && f.rep == Rep::physical) {
        out.data = f.grid->dft * f.data;
        out.rep = Rep::spectral;
    } else if (dir == Direction::to_physical && f.rep == Rep::spectral) {
        out.data = f.grid->idft * f.data;
        out.rep = Rep::physical;
    }
    return out;
}

ScalarField differentiate(const ScalarField& f, Axis axis, int order) {
    if (order < 1 || order > 6)
        throw ArgumentError("differentiate: order must be in 1..6, got " + std::to_string(order));
    const SpectralGrid& g = *f.grid;
    ScalarField s = f.spectral();
    if (axis == Axis::x) {
        for (int r = 0; r < g.nx; ++r) {
            if (g.is_nyquist(r) && order % 2 == 1) {
                s.data.row(r).setZero();
                continue;
            }
            s.data.row(r) *= std::pow(cplx(0.0, g.wavenumber(r)), order);
        }
    } else if (order == 1) {
        s.data = s.data * g.dy1.transpose();
    } else if (order == 2) {
        s.data = s.data * g.dy2.transpose();
    } else {
        const double scale = g.cheb_scale(s.data);
        for (int r = 0; r < g.nx; ++r) s.data.row(r) = g.dy_high(s.data.row(r).transpose(), order, scale).transpose();
    }
    return f.rep == Rep::spectral ? s : s.physical();
}

cplx inner_product(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f, g, "inner_product");
    const ScalarField a = f.spectral(), b = g.spectral();
    return (a.data.conjugate() * f.grid->mass).cwiseProduct(b.data).sum();
}

double hermitian_defect(const ScalarField& f) {
    const ScalarField s = f.spectral();
    const SpectralGrid& g = *f.grid;
    double d = 0.0;
    for (int r = 0; r < g.nx; ++r) {
        int j = g.mode_index(r);
        if (j == 0 || j == g.nx / 2) {
            d = std::max(d, s.data.row(r).imag().cwiseAbs().maxCoeff());
        } else if (j > 0) {
            int rm = g.row_of_mode(-j);
            d = std::max(d, (s.data.row(rm) - s.data.row(r).conjugate()).cwiseAbs().maxCoeff());
        }
    }
    return d;
}

cplx evaluate(const ScalarField& f, double x, double y) {
    const SpectralGrid& g = *f.grid;
    const ScalarField s = f.spectral();
    VectorXd pt(1);
    pt(0) = y;
    const VectorXd P = g.interp_matrix(pt).row(0).transpose();
    cplx acc = 0.0;
    for (int r = 0; r < g.nx; ++r) {
        cplx c = s.data.row(r) * P;
        if (g.is_nyquist(r))
            acc += c * std::cos(g.wavenumber(r) * x);
        else
            acc += c * std::polar(1.0, g.wavenumber(r) * x);
    }
    return acc;
}

} // namespace couette
