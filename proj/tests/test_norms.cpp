#include "helpers.hpp"

#include "couette/error.hpp"
#include "couette/norms.hpp"

#include <doctest.h>

#include <vector>

using namespace testing_support;

namespace {

/// Polynomial in y by ascending coefficients; used as an independent
/// closed-form oracle for the norm integrals.
struct Poly {
    std::vector<double> c;

    Poly deriv() const {
        Poly d;
        for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * static_cast<double>(i));
        if (d.c.empty()) d.c.push_back(0.0);
        return d;
    }
    double operator()(double y) const {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * y + c[i];
        return v;
    }
    /// int_0^1 p^2 dy
    double sq_integral() const {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) s += c[i] * c[j] / static_cast<double>(i + j + 1);
        return s;
    }
};

} // namespace

TEST_CASE("htilde closed form") {
    const GridPtr g = make_grid(8, 33);
    const VelocityField u = vfield(g, [](double x, double y) { return std::sin(2 * pi * x) * std::sin(pi * y); },
                                   [](double, double) { return 0.0; });
    const HtildeNorm h = htilde_norm_sq(u, 1.0);
    const double expect = 0.25 + 5 * pi * pi / 4 + std::pow(pi, 4);
    CHECK(rel_diff(h.value, expect) < 1e-6);
    CHECK(rel_diff(h.summands[0], 0.25) < 1e-12);
    CHECK(rel_diff(h.summands[1], 5 * pi * pi / 4) < 1e-10);
    CHECK(rel_diff(h.summands[2], std::pow(pi, 4)) < 1e-10);
    CHECK(std::abs(htilde_norm_sq(u, 1e14).value - 0.25) < 1e-12);
    CHECK(htilde_norm_sq(VelocityField::zeros(g), 3.0).value == 0.0);
    CHECK_THROWS_AS(htilde_norm_sq(u, 0.0), ArgumentError);
    CHECK_THROWS_AS(h6m_norm_sq(u, -1.0), ArgumentError);
}

TEST_CASE("h6m against closed-form polynomial integrals") {
    const double c = 3.0, k = 2 * pi, R = 7.0;
    Poly p{{0, 0, 0, 1, -3, 3, -1}}; // y^3 (1-y)^3
    std::vector<Poly> d{p};
    for (int n = 1; n <= 6; ++n) d.push_back(d.back().deriv());
    std::vector<double> I;
    for (const auto& q : d) I.push_back(0.5 * c * c * q.sq_integral());
    auto total = [&](int n) {
        double s = 0.0;
        for (int a = 0; a <= n; ++a) s += std::pow(k, 2 * a) * I[static_cast<std::size_t>(n - a)];
        return s;
    };
    const double e0 = total(0) + total(1) + total(2);
    const double e1 = total(3) / (R * R), e2 = total(4) / (R * R);
    const double e3 = std::pow(k, 4) * I[3] / std::pow(R, 4), e4 = I[5] / std::pow(R, 4), e5 = I[6] / std::pow(R, 4);
    CHECK(rel_diff(I[6], 0.5 * c * c * 720.0 * 720.0) < 1e-14);

    for (int ny : {33, 65}) {
        const GridPtr g = make_grid(8, ny);
        const VelocityField u = vfield(g, [](double, double) { return 0.0; },
                                       [&](double x, double y) { return c * std::sin(k * x) * p(y); });
        const H6mNorm h = h6m_norm_sq(u, R);
        CHECK(rel_diff(h.summands[0], e0) < 1e-8);
        CHECK(rel_diff(h.summands[1], e1) < 1e-8);
        CHECK(rel_diff(h.summands[2], e2) < 1e-8);
        CHECK(rel_diff(h.summands[3], e3) < 1e-8);
        CHECK(rel_diff(h.summands[4], e4) < 1e-8);
        CHECK(rel_diff(h.summands[5], e5) < 1e-8);
    }
}

TEST_CASE("h6m basic cases") {
    const GridPtr g = make_grid(8, 33);
    CHECK(h6m_norm_sq(VelocityField::zeros(g), 100.0).value == 0.0);
    const VelocityField u = vfield(g, [](double x, double y) { return std::cos(2 * pi * x) * y * y * (1 - y); },
                                   [](double, double) { return 0.0; });
    const H6mNorm h = h6m_norm_sq(u, 10.0);
    CHECK(h.summands[3] == 0.0);
    CHECK(h.summands[4] == 0.0);
    CHECK(h.summands[5] == 0.0);
    CHECK(h.summands[0] > 0.0);
}

TEST_CASE("self-convergence under grid doubling") {
    RandomFieldOptions o;
    o.y_degree = 12;
    const GridPtr g1 = make_grid(8, 33), g2 = make_grid(16, 66);
    for (std::uint64_t seed : {1, 2, 3}) {
        const VelocityField a = random_divfree_field(g1, seed, 2, 4.0, o);
        const VelocityField b = random_divfree_field(g2, seed, 2, 4.0, o);
        CHECK(rel_diff(l2_norm_sq(a), l2_norm_sq(b)) < 1e-6);
        CHECK(rel_diff(htilde_norm_sq(a, 100).value, htilde_norm_sq(b, 100).value) < 1e-6);
        const H6mNorm ha = h6m_norm_sq(a, 100), hb = h6m_norm_sq(b, 100);
        for (int i = 0; i < 6; ++i) CHECK(rel_diff(ha.summands[static_cast<std::size_t>(i)], hb.summands[static_cast<std::size_t>(i)]) < 1e-6);
    }
}

TEST_CASE("norm invariants on random fields") {
    const GridPtr g = make_grid(8, 33);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const VelocityField u = random_divfree_field(g, seed, 3, 2.0);
        for (double R : {1.0, 50.0, 500.0}) {
            const NormReport r = norm_report(u, R);
            CHECK(std::abs(r.htilde.summands[0] - r.l2 * r.l2) <= 1e-14 * r.l2 * r.l2);
            CHECK(std::abs(r.h6m.summands[0] - r.h_n[1]) <= 1e-13 * r.h_n[1]);
            for (double s : r.htilde.summands) CHECK(s >= 0.0);
            for (double s : r.h6m.summands) CHECK(s >= 0.0);
            CHECK(r.l2 * r.l2 <= r.htilde.value);
            CHECK(r.h_n[1] <= r.h6m.value);
            CHECK(r.h_n[0] <= r.h_n[1]);
            double hs = 0.0, ms = 0.0;
            for (double s : r.htilde.summands) hs += s;
            for (double s : r.h6m.summands) ms += s;
            CHECK(std::abs(hs - r.htilde.value) <= 1e-13 * r.htilde.value);
            CHECK(std::abs(ms - r.h6m.value) <= 1e-13 * r.h6m.value);

            const VelocityField v = cplx(-2.5) * u;
            CHECK(rel_diff(htilde_norm_sq(v, R).value, 6.25 * r.htilde.value) < 1e-12);
            CHECK(rel_diff(h6m_norm_sq(v, R).value, 6.25 * r.h6m.value) < 1e-12);
            CHECK(rel_diff(l2_norm_sq(v), 6.25 * r.l2 * r.l2) < 1e-12);
            CHECK(rel_diff(max_norm(v), 2.5 * r.max_norm) < 1e-12);
        }
        double prev = 1e300;
        for (double R : {1.0, 10.0, 100.0, 1000.0}) {
            const double h = htilde_norm_sq(u, R).value;
            CHECK(h <= prev);
            prev = h;
        }
    }
}

TEST_CASE("hn norms") {
    const GridPtr g = make_grid(8, 33);
    const VelocityField u = vfield(g, [](double x, double y) { return std::sin(2 * pi * x) * std::sin(pi * y); },
                                   [](double, double) { return 0.0; });
    CHECK(rel_diff(hn_norm_sq(u, 0), 0.25) < 1e-12);
    CHECK(rel_diff(hn_norm_sq(u, 1), 0.25 + 5 * pi * pi / 4) < 1e-10);
    CHECK_THROWS_AS(hn_norm_sq(u, 5), ArgumentError);
}

TEST_CASE("max norm examples") {
    const GridPtr g = make_grid(8, 17);
    CHECK(std::abs(max_norm(vfield(g, [](double, double) { return 1.0; }, [](double, double) { return 0.0; })) - 1.0) < 1e-14);
    CHECK(std::abs(max_norm(vfield(g, [](double, double) { return 3.0; }, [](double, double) { return 4.0; })) - 5.0) < 1e-14);
    const VelocityField s = vfield(g, [](double x, double) { return std::sin(2 * pi * x); }, [](double, double) { return 0.0; });
    CHECK(std::abs(max_norm(s) - 1.0) < 1e-3);
    // a traveling phase the collocation points miss; the refined maximum finds it
    const VelocityField t = vfield(g, [](double x, double) { return std::sin(2 * pi * x + 0.4); }, [](double, double) { return 0.0; });
    CHECK(max_norm(t) < 0.99);
    CHECK(std::abs(max_norm_x_refined(t) - 1.0) < 1e-10);
}

TEST_CASE("embedding ratio") {
    const GridPtr g = make_grid(8, 17);
    const VelocityField one = vfield(g, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
    CHECK(std::abs(embedding_ratio(one, 4.0) - 0.25) < 1e-13);
    CHECK_THROWS_AS(embedding_ratio(VelocityField::zeros(g), 4.0), ArgumentError);

    const GridPtr h = make_grid(8, 33);
    double mx = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const VelocityField u = random_divfree_field(h, seed, 2, 4.0);
        const double r = embedding_ratio(u, 100.0);
        CHECK(std::isfinite(r));
        CHECK(r > 0.0);
        CHECK(rel_diff(embedding_ratio(cplx(2.0) * u, 100.0), r) < 1e-13);
        mx = std::max(mx, r);
    }
    CHECK(std::isfinite(mx));
}

TEST_CASE("scale decomposition") {
    const GridPtr g = make_grid(8, 33);
    const VelocityField quad = vfield(g, [](double, double y) { return y * y; }, [](double, double) { return 0.0; });
    const ScaleDecomposition q = scale_decomposition(quad, 100.0);
    CHECK(q.ratio[0] > 0.999);
    for (int i = 1; i < 6; ++i) CHECK(q.ratio[static_cast<std::size_t>(i)] < 1e-10);
    CHECK_THROWS_AS(scale_decomposition(VelocityField::zeros(g), 100.0), ArgumentError);

    const VelocityField f = random_divfree_field(g, 4, 2, 4.0);
    const ScaleDecomposition a = scale_decomposition(f, 100.0), b = scale_decomposition(f, 200.0);
    for (int i = 0; i < 6; ++i) CHECK(a.component[static_cast<std::size_t>(i)] == b.component[static_cast<std::size_t>(i)]);
    CHECK(rel_diff(a.h6m * a.h6m, h6m_norm_sq(f, 100.0).value) < 1e-13);
}

TEST_CASE("third and fourth derivative headroom at h6m = R^-3") {
    // ||f||_H6m = R^-3 allows ||D3 f||, ||D4 f|| up to R^-2; a high-frequency
    // wall-normal oscillation of u1 uses nearly all of it for D4.
    const double R = 100.0;
    const GridPtr g = make_grid(4, 97);
    for (double k : {std::sqrt(R), 30.0, 60.0}) {
        const VelocityField u = vfield(g, [&](double, double y) { return std::cos(k * y); }, [](double, double) { return 0.0; });
        const VelocityField f = cplx(std::pow(R, -3)) * normalize_h6m(u, R);
        const ScaleDecomposition d = scale_decomposition(f, R);
        CHECK(rel_diff(d.h6m, std::pow(R, -3)) < 1e-12);
        CHECK(d.component[1] <= std::pow(R, -2) * (1 + 1e-12));
        CHECK(d.component[2] <= std::pow(R, -2) * (1 + 1e-12));
        if (k == 60.0) CHECK(d.component[2] > 0.99 * std::pow(R, -2));
    }
}
