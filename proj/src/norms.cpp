#include "couette/norms.hpp"

#include "couette/error.hpp"

#include <cmath>
#include <string>

namespace couette {

namespace {

void require_positive_R(double R, const char* who) {
    if (!(R > 0.0)) throw ArgumentError(std::string(who) + ": R must be positive");
}

double row_mass_norm(const SpectralGrid& g, const VectorXcd& v) {
    return (v.adjoint() * g.mass * v)(0, 0).real();
}

} // namespace

DerivativeTable::DerivativeTable(const VelocityField& u, int max_y_order)
    : grid_(u.grid()), max_y_order_(max_y_order), q_(2 * (max_y_order + 1), u.grid()->nx) {
    const SpectralGrid& g = *grid_;
    const VelocityField s = u.spectral();
    const double scale = std::max(g.cheb_scale(s.u1.data), g.cheb_scale(s.u2.data));
    int c = 0;
    for (const ScalarField* comp : {&s.u1, &s.u2}) {
        for (int r = 0; r < g.nx; ++r) {
            const VectorXcd v = comp->data.row(r).transpose();
            for (int b = 0; b <= max_y_order; ++b) {
                VectorXcd d;
                if (b == 0) d = v;
                else if (b == 1) d = g.dy1 * v;
                else if (b == 2) d = g.dy2 * v;
                else d = g.dy_high(v, b, scale);
                q_(c * (max_y_order + 1) + b, r) = row_mass_norm(g, d);
            }
        }
        ++c;
    }
}

double DerivativeTable::sq(int c, int a, int b) const {
    if (b > max_y_order_) throw ArgumentError("DerivativeTable: y order beyond table");
    const SpectralGrid& g = *grid_;
    double acc = 0.0;
    for (int r = 0; r < g.nx; ++r) {
        if (a % 2 == 1 && g.is_nyquist(r)) continue;
        acc += std::pow(g.wavenumber(r), 2 * a) * q_((c - 1) * (max_y_order_ + 1) + b, r);
    }
    return acc;
}

double DerivativeTable::total_order_sq(int n) const {
    double acc = 0.0;
    for (int c = 1; c <= 2; ++c)
        for (int a = 0; a <= n; ++a) acc += sq(c, a, n - a);
    return acc;
}

double l2_norm_sq(const VelocityField& u) { return inner_product(u, u).real(); }

double hn_norm_sq(const VelocityField& u, int order) {
    if (order < 0 || order > 4) throw ArgumentError("hn_norm_sq: order must be in 0..4");
    DerivativeTable t(u, order);
    double acc = 0.0;
    for (int n = 0; n <= order; ++n) acc += t.total_order_sq(n);
    return acc;
}

HtildeNorm htilde_norm_sq(const VelocityField& u, double R) {
    require_positive_R(R, "htilde_norm_sq");
    DerivativeTable t(u, 1);
    HtildeNorm h;
    h.summands[0] = t.total_order_sq(0);
    h.summands[1] = t.total_order_sq(1) / R;
    h.summands[2] = (t.sq(1, 1, 1) + t.sq(2, 1, 1)) / (R * R);
    h.value = h.summands[0] + h.summands[1] + h.summands[2];
    return h;
}

H6mNorm h6m_norm_sq(const VelocityField& u, double R) {
    require_positive_R(R, "h6m_norm_sq");
    DerivativeTable t(u, 6);
    const double R2 = R * R, R4 = R2 * R2;
    H6mNorm h;
    h.summands[0] = t.total_order_sq(0) + t.total_order_sq(1) + t.total_order_sq(2);
    h.summands[1] = t.total_order_sq(3) / R2;
    h.summands[2] = t.total_order_sq(4) / R2;
    h.summands[3] = t.sq(2, 2, 3) / R4;
    h.summands[4] = t.sq(2, 0, 5) / R4;
    h.summands[5] = t.sq(2, 0, 6) / R4;
    h.value = 0.0;
    for (double s : h.summands) h.value += s;
    return h;
}

double h6m_truncated_sq(const VelocityField& u, double R) {
    const H6mNorm h = h6m_norm_sq(u, R);
    return h.summands[0] + h.summands[1] + h.summands[2];
}

double max_norm(const VelocityField& u) {
    const VelocityField p = u.physical();
    return (p.u1.data.cwiseAbs2() + p.u2.data.cwiseAbs2()).cwiseSqrt().maxCoeff();
}

double max_norm_x_refined(const VelocityField& u) {
    const VelocityField s = u.spectral();
    const SpectralGrid& g = *u.grid();
    const int fine = 16 * g.nx;
    double best = 0.0;
    for (int m = 0; m < g.ny; ++m) {
        const VectorXcd c1 = s.u1.data.col(m), c2 = s.u2.data.col(m);
        auto mag2 = [&](double x) {
            cplx a = 0.0, b = 0.0;
            for (int r = 0; r < g.nx; ++r) {
                cplx e = g.is_nyquist(r) ? cplx(std::cos(g.wavenumber(r) * x), 0.0) : std::polar(1.0, g.wavenumber(r) * x);
                a += c1(r) * e;
                b += c2(r) * e;
            }
            return std::norm(a) + std::norm(b);
        };
        int arg = 0;
        double top = -1.0;
        for (int i = 0; i < fine; ++i) {
            double v = mag2(static_cast<double>(i) / fine);
            if (v > top) {
                top = v;
                arg = i;
            }
        }
        double lo = (arg - 1.0) / fine, hi = (arg + 1.0) / fine;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = mag2(a), fb = mag2(b);
        for (int it = 0; it < 60; ++it) {
            if (fa > fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - gr * (hi - lo);
                fa = mag2(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + gr * (hi - lo);
                fb = mag2(b);
            }
        }
        best = std::max({best, top, fa, fb});
    }
    return std::sqrt(best);
}

double embedding_ratio(const VelocityField& u, double R) {
    require_positive_R(R, "embedding_ratio");
    const double h = htilde_norm_sq(u, R).value;
    if (!(h > 0.0)) throw ArgumentError("embedding_ratio: zero field");
    const double m = max_norm(u);
    return m * m / (R * h);
}

ScaleDecomposition scale_decomposition(const VelocityField& f, double R) {
    require_positive_R(R, "scale_decomposition");
    DerivativeTable t(f, 6);
    ScaleDecomposition d;
    d.R = R;
    d.component[0] = std::sqrt(t.total_order_sq(0) + t.total_order_sq(1) + t.total_order_sq(2));
    d.component[1] = std::sqrt(t.total_order_sq(3));
    d.component[2] = std::sqrt(t.total_order_sq(4));
    d.component[3] = std::sqrt(t.sq(2, 2, 3));
    d.component[4] = std::sqrt(t.sq(2, 0, 5));
    d.component[5] = std::sqrt(t.sq(2, 0, 6));
    const double R2 = R * R, R4 = R2 * R2;
    const double h2 = d.component[0] * d.component[0] + (d.component[1] * d.component[1] + d.component[2] * d.component[2]) / R2 +
                      (d.component[3] * d.component[3] + d.component[4] * d.component[4] + d.component[5] * d.component[5]) / R4;
    if (!(h2 > 0.0)) throw ArgumentError("scale_decomposition: zero field");
    d.h6m = std::sqrt(h2);
    for (int i = 0; i < 6; ++i) d.ratio[i] = d.component[i] / d.h6m;
    return d;
}

NormReport norm_report(const VelocityField& u, double R) {
    require_positive_R(R, "norm_report");
    NormReport rep;
    rep.R = R;
    DerivativeTable t(u, 2);
    rep.l2 = std::sqrt(t.total_order_sq(0));
    rep.h_n[0] = t.total_order_sq(0) + t.total_order_sq(1);
    rep.h_n[1] = rep.h_n[0] + t.total_order_sq(2);
    rep.htilde = htilde_norm_sq(u, R);
    rep.h6m = h6m_norm_sq(u, R);
    rep.max_norm = max_norm(u);
    return rep;
}

} // namespace couette
