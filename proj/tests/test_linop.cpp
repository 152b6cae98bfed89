#include "helpers.hpp"

#include "couette/error.hpp"
#include "couette/linop.hpp"
#include "couette/norms.hpp"
#include "couette/random.hpp"

#include <doctest.h>

#include <algorithm>

using namespace testing_support;

namespace {

std::vector<cplx> least_stable(const VectorXcd& ev, int n) {
    std::vector<cplx> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    v.resize(static_cast<std::size_t>(n));
    return v;
}

} // namespace

TEST_CASE("apply_L: zero and linearity") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    CHECK(max_abs_diff(apply_L(VelocityField::zeros(g), U, 100.0), VelocityField::zeros(g)) == 0.0);
    const VelocityField u = random_divfree_field(g, 1, 3, 2.0), w = random_divfree_field(g, 2, 3, 2.0);
    const cplx a(0.7, 0.0), b(-1.3, 0.0);
    const VelocityField lhs = apply_L(a * u + b * w, U, 100.0);
    const VelocityField rhs = a * apply_L(u, U, 100.0) + b * apply_L(w, U, 100.0);
    CHECK(max_abs_diff(lhs, rhs) < 1e-10 * std::max(1.0, max_norm(lhs)));
}

TEST_CASE("apply_P composition") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    const VelocityField f = random_divfree_field(g, 4, 2, 3.0);
    CHECK(max_abs_diff(apply_P(VelocityField::zeros(g), U, 100.0, 0.5), VelocityField::zeros(g)) == 0.0);
    CHECK(max_abs_diff(apply_P(f, U, 100.0, 0.0), apply_L(f, U, 100.0) + f) < 1e-14);
    const VelocityField parts = apply_L(f, U, 100.0) + f - cplx(0.25) * convect(f, f);
    CHECK(max_abs_diff(apply_P(f, U, 100.0, 0.25), parts) < 1e-12);
}

TEST_CASE("assembly structure") {
    const GridPtr g = make_grid(4, 17);
    const BaseFlow U = couette_base(g);
    const OperatorAssembly A = assemble_L(g, U, 100.0);
    // rows j = -1, 0, 1 (Nyquist dropped): two streamfunction rows plus the mean-flow row
    CHECK(A.dim() == 2 * (17 - 4) + (17 - 2));
    const MatrixXcd G = A.dense_gram();
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(A.gram_condition() < 1e12);
}

TEST_CASE("assembly consistency with apply_L") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    const OperatorAssembly A = assemble_L(g, U, 100.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const VelocityField u = random_divfree_field(g, seed, 3, 2.0);
        CHECK(max_abs_diff(A.field(A.coords(u)), u) < 1e-12);
        const VectorXcd direct = A.coords(apply_L(u, U, 100.0));
        const VectorXcd mv = A.dense_matrix() * A.coords(u);
        CHECK((direct - mv).norm() / direct.norm() < 1e-8);
        // orthonormal coordinates preserve the L2 norm
        CHECK(rel_diff(A.orth_coords(u).squaredNorm(), l2_norm_sq(u)) < 1e-12);
        CHECK(rel_diff(A.htilde_sq_orth(A.orth_coords(u)), htilde_norm_sq(u, 100.0).value) < 1e-10);
    }
}

TEST_CASE("spectrum lies in the left half-plane") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    for (double R : {100.0, 500.0, 800.0}) {
        const VectorXcd ev = assembled_eigenvalues(assemble_L(g, U, R));
        CHECK(ev.real().maxCoeff() < 0.0);
        // the mean-flow row decays at exactly -pi^2/R
        CHECK(std::abs(ev.real().maxCoeff() + pi * pi / R) < 1e-8 * pi * pi / R);
    }
}

TEST_CASE("least-stable eigenvalues converge under ny doubling") {
    const BaseFlow Ua = couette_base(make_grid(8, 33));
    const BaseFlow Ub = couette_base(make_grid(8, 65));
    const auto a = least_stable(assembled_eigenvalues(assemble_L(Ua.U.grid(), Ua, 100.0)), 5);
    const VectorXcd b = assembled_eigenvalues(assemble_L(Ub.U.grid(), Ub, 100.0));
    // match by distance: conjugate pairs share a real part, so order is not stable
    for (cplx l : a) CHECK((b.array() - l).abs().minCoeff() < 1e-4 * std::abs(l));
}

TEST_CASE("dissipativity bound Re<u, Lu> <= ||u||^2") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    for (double R : {1.0, 100.0, 1000.0})
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const VelocityField u = random_divfree_field(g, seed, 3, 1.0);
            CHECK(inner_product(u, apply_L(u, U, R)).real() <= l2_norm_sq(u));
        }
}

TEST_CASE("resolvent norm: large s asymptotics and conjugate symmetry") {
    const GridPtr g = make_grid(4, 17);
    const BaseFlow U = couette_base(g);
    const OperatorAssembly A = assemble_L(g, U, 100.0);
    const double big = resolvent_norm(A, cplx(1e6, 0.0));
    CHECK(big >= 0.5e-6);
    CHECK(big <= 2e-6);
    // dense oracle: smallest singular value of sI - A in orthonormal coordinates
    const MatrixXcd L = A.dense_matrix(), G = A.dense_gram();
    const cplx s(0.02, 0.9);
    Eigen::LLT<MatrixXcd> llt(G);
    const MatrixXcd Lc = llt.matrixL();
    const MatrixXcd Aorth = Lc.adjoint() * L * Lc.adjoint().inverse();
    const MatrixXcd M = s * MatrixXcd::Identity(A.dim(), A.dim()) - Aorth;
    Eigen::JacobiSVD<MatrixXcd> svd(M);
    const double oracle = 1.0 / svd.singularValues().minCoeff();
    CHECK(rel_diff(resolvent_norm(A, s), oracle) < 1e-8);
    for (cplx z : {cplx(0.0, 0.37), cplx(0.1, 2.5), cplx(0.0, -11.0)})
        CHECK(std::abs(resolvent_norm(A, std::conj(z)) - resolvent_norm(A, z)) < 1e-10 * resolvent_norm(A, z));
    CHECK(resolvent_norm_htilde(A, s) >= resolvent_norm(A, s));
}

TEST_CASE("resolvent scan: edge flag, maximum principle and R proportionality") {
    const GridPtr g = make_grid(4, 25);
    const BaseFlow U = couette_base(g);
    double sup200 = 0.0, sup400 = 0.0;
    for (double R : {200.0, 400.0}) {
        const OperatorAssembly A = assemble_L(g, U, R);
        const ResolventScan s = resolvent_sup_scan(A, 0.0, 64);
        CHECK_FALSE(s.edge_flag);
        CHECK(s.sup > 0.0);
        for (const auto& p : s.points) {
            CHECK(p.s.real() >= 0.0);
            CHECK(p.norm_l2 > 0.0);
        }
        SplitMix64 rng(static_cast<std::uint64_t>(R));
        for (int i = 0; i < 10; ++i) {
            const cplx z(rng.uniform(1e-3, 2.0), rng.uniform(-20.0, 20.0));
            CHECK(resolvent_norm(A, z) <= s.sup + 1e-8);
        }
        (R == 200.0 ? sup200 : sup400) = s.sup;
    }
    const double ratio = sup400 / sup200;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.4);
    CHECK_THROWS_AS(resolvent_sup_scan(assemble_L(g, U, 100.0), 0.0, 32), ArgumentError);
}

TEST_CASE("sharpness ratio: zero field and scale invariance") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    CHECK(l2f_sharpness(VelocityField::zeros(g), U, 100.0) == 0.0);
    const VelocityField f = random_divfree_field(g, 6, 2, 4.0);
    const double r = l2f_sharpness(f, U, 100.0);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    CHECK(rel_diff(l2f_sharpness(cplx(3.0) * f, U, 100.0), r) < 1e-10);
    CHECK(l2f_sharpness_truncated(f, U, 100.0) >= r);
}

TEST_CASE("first-order estimate constant is R-uniform") {
    const GridPtr g = make_grid(8, 33);
    const BaseFlow U = couette_base(g);
    double c100 = 0.0, c800 = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const VelocityField f = random_divfree_field(g, seed, 2, 4.0);
        DerivativeTable t(f, 3);
        for (double R : {100.0, 800.0}) {
            const double rhs = hn_norm_sq(f, 1) + (t.sq(1, 2, 0) + t.sq(2, 2, 0) + t.sq(1, 0, 2) + t.sq(2, 0, 2) + t.sq(2, 0, 3)) / (R * R);
            const double c = l2_norm_sq(apply_L(f, U, R)) / rhs;
            CHECK(std::isfinite(c));
            (R == 100.0 ? c100 : c800) = std::max(R == 100.0 ? c100 : c800, c);
        }
    }
    CHECK(std::max(c100, c800) / std::min(c100, c800) < 2.0);
}
