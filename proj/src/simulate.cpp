#include "couette/simulate.hpp"

#include "couette/error.hpp"
#include "couette/norms.hpp"
#include "couette/pressure.hpp"
#include "couette/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace couette {

void SimConfig::validate() const {
    if (!(R > 0.0)) throw ArgumentError("SimConfig: R must be positive");
    if (!(eps >= 0.0)) throw ArgumentError("SimConfig: eps must be nonnegative");
    if (!(dt > 0.0)) throw ArgumentError("SimConfig: dt must be positive");
    if (!(T_end >= dt)) throw ArgumentError("SimConfig: T_end must be at least dt");
    if (sample_every < 1) throw ArgumentError("SimConfig: sample_every must be positive");
    if (!f.grid()) throw ArgumentError("SimConfig: initial shape f is missing");
    const double n = h6m_norm_sq(f, R).value;
    if (std::abs(std::sqrt(n) - 1.0) > 1e-10)
        throw ArgumentError("SimConfig: f must have unit H6m norm at R (normalize_h6m)");
}

// ---- Propagator ----------------------------------------------------------

Propagator::Propagator(const OperatorAssembly& A, double dt, const std::vector<cplx>& rates)
    : A_(&A), dt_(dt), off_(A.offsets()) {
    for (const auto& b : A.blocks) {
        const int m = static_cast<int>(b.a_orth.rows());
        const MatrixXcd I = MatrixXcd::Identity(m, m);
        Block blk;
        MatrixXcd big = MatrixXcd::Zero(3 * m, 3 * m);
        big.block(0, 0, m, m) = dt * b.a_orth;
        big.block(0, m, m, m) = dt * I;
        big.block(m, 2 * m, m, m) = I; // scaled so the corner gives int e^{(dt-s)A} s/dt ds
        const MatrixXcd ex = big.exp();
        blk.E = ex.block(0, 0, m, m);
        blk.P1 = ex.block(0, m, m, m);
        blk.P2 = ex.block(0, 2 * m, m, m);
        for (cplx lam : rates) {
            MatrixXcd v = MatrixXcd::Zero(2 * m, 2 * m);
            v.block(0, 0, m, m) = dt * b.a_orth;
            v.block(0, m, m, m) = dt * I;
            v.block(m, m, m, m) = (dt * lam) * I;
            blk.Psi.push_back(v.exp().block(0, m, m, m));
        }
        blocks_.push_back(std::move(blk));
    }
}

namespace {

template <class F>
VectorXcd blockwise(const std::vector<int>& off, std::size_t nblocks, const VectorXcd& x, F&& f) {
    VectorXcd y(x.size());
    for (std::size_t i = 0; i < nblocks; ++i) {
        const int start = off[i];
        const int end = (i + 1 < nblocks) ? off[i + 1] : static_cast<int>(x.size());
        y.segment(start, end - start) = f(i, x.segment(start, end - start));
    }
    return y;
}

} // namespace

VectorXcd Propagator::exp_apply(const VectorXcd& a) const {
    return blockwise(off_, blocks_.size(), a, [&](std::size_t i, const VectorXcd& s) -> VectorXcd { return blocks_[i].E * s; });
}

VectorXcd Propagator::phi1_apply(const VectorXcd& n) const {
    return blockwise(off_, blocks_.size(), n, [&](std::size_t i, const VectorXcd& s) -> VectorXcd { return blocks_[i].P1 * s; });
}

VectorXcd Propagator::phi2_apply(const VectorXcd& n) const {
    return blockwise(off_, blocks_.size(), n, [&](std::size_t i, const VectorXcd& s) -> VectorXcd { return blocks_[i].P2 * s; });
}

VectorXcd Propagator::psi_apply(int k, const VectorXcd& g) const {
    return blockwise(off_, blocks_.size(), g,
                     [&](std::size_t i, const VectorXcd& s) -> VectorXcd { return blocks_[i].Psi.at(k) * s; });
}

// ---- pieces --------------------------------------------------------------

VectorXcd nonlinear_term(const OperatorAssembly& A, const VectorXcd& a, double eps, bool dealias) {
    if (eps == 0.0) return VectorXcd::Zero(a.size());
    const VelocityField u = A.field_from_orth(a);
    VelocityField n = convect(u, u, dealias);
    n += gradient(solve_p2(u, CompatPolicy::project, dealias));
    return cplx(-eps) * A.orth_coords(n);
}

VelocityField step(const VelocityField& u, const BaseFlow& U, double R, double eps, double dt) {
    const OperatorAssembly A = assemble_L(u.grid(), U, R);
    const Propagator P(A, dt);
    const VectorXcd a = A.orth_coords(u);
    return A.field_from_orth(P.exp_apply(a) + P.phi1_apply(nonlinear_term(A, a, eps, true)));
}

VelocityField forcing_F(const VelocityField& f, const BaseFlow& U, double R, double eps, double t) {
    const double e = std::exp(-t);
    VelocityField out = apply_L(f, U, R) + f.spectral();
    if (eps != 0.0) out -= cplx(eps * e) * convect(f, f);
    return cplx(e) * out;
}

bool decay_verdict(const std::vector<double>& times, const std::vector<double>& m, double T_end) {
    if (m.empty()) return false;
    if (!(m.back() < 0.01 * m.front())) return false;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        if (times[i] < 0.75 * T_end) continue;
        if (m[i + 1] > m[i]) return false;
    }
    return true;
}

namespace {

constexpr int max_dt_halvings = 16;
constexpr double courant = 0.5;

// Courant limit of the explicit advection: |u1| against the largest x
// wavenumber plus |u2| against the local Chebyshev spacing.
double advective_dt(const VelocityField& w, double eps) {
    const SpectralGrid& g = *w.grid();
    const MatrixXcd& a = w.u1.physical().data;
    const MatrixXcd& b = w.u2.physical().data;
    const double kx = std::numbers::pi * g.nx;
    double rate = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        double h = std::numeric_limits<double>::infinity();
        if (j > 0) h = std::min(h, std::abs(g.y_nodes(j) - g.y_nodes(j - 1)));
        if (j + 1 < g.ny) h = std::min(h, std::abs(g.y_nodes(j + 1) - g.y_nodes(j)));
        for (int i = 0; i < g.nx; ++i) rate = std::max(rate, std::abs(a(i, j)) * kx + std::abs(b(i, j)) * std::numbers::pi / h);
    }
    rate *= std::abs(eps);
    if (!std::isfinite(rate)) throw NumericalError("non-finite velocity during time stepping");
    return rate > 0.0 ? courant / rate : std::numeric_limits<double>::infinity();
}

double max_divergence(const VelocityField& u) { return divergence(u).physical().data.cwiseAbs().maxCoeff(); }

double top_third_fraction(const VelocityField& u) {
    const SpectralGrid& g = *u.grid();
    const VelocityField s = u.spectral();
    double total = 0.0, top = 0.0;
    const int ncut = (2 * (g.ny - 1)) / 3;
    for (const ScalarField* c : {&s.u1, &s.u2}) {
        for (int r = 0; r < g.nx; ++r) {
            VectorXd ar = g.to_cheb(c->data.row(r).real().transpose());
            VectorXd ai = g.to_cheb(c->data.row(r).imag().transpose());
            VectorXd e = ar.array().square() + ai.array().square();
            total += e.sum();
            if (std::abs(g.mode_index(r)) > g.nx / 3) top += e.sum();
            else top += e.tail(g.ny - 1 - ncut).sum();
        }
    }
    return total > 0.0 ? top / total : 0.0;
}

struct Runner {
    const SimConfig& cfg;
    GridPtr grid;
    BaseFlow U;
    OperatorAssembly A;
    VectorXcd af;

    explicit Runner(const SimConfig& c)
        : cfg(c), grid(c.f.grid()), U(couette_base(grid)), A(assemble_L(grid, U, c.R)), af(A.orth_coords(c.f)) {}

    // integrate; vform selects the shifted unknown. Returns trajectory.
    Trajectory run(bool vform) {
        cfg.validate();
        Trajectory tr;
        double dt = cfg.dt;
        int sample_every = cfg.sample_every;
        const bool nl = cfg.eps != 0.0;
        std::vector<cplx> rates = vform ? std::vector<cplx>{-1.0, -2.0} : std::vector<cplx>{};
        auto P = std::make_unique<Propagator>(A, dt, rates);

        VectorXcd g_lin, g_nl;
        if (vform) {
            g_lin = A.apply_orth(af) + af; // projected (L + I) f
            g_nl = nl ? VectorXcd(cplx(-cfg.eps) * A.orth_coords(convect(cfg.f, cfg.f, cfg.dealias)))
                      : VectorXcd::Zero(af.size());
        }
        VectorXcd x = vform ? VectorXcd::Zero(af.size()) : af;
        VectorXcd n_prev;
        std::vector<double> ts, mx;
        std::vector<VectorXcd> vstates; // v coordinates at samples for the accumulator

        auto u_of = [&](const VectorXcd& s, double t) -> VectorXcd { return vform ? VectorXcd(s + std::exp(-t) * af) : s; };
        auto v_of = [&](const VectorXcd& s, double t) -> VectorXcd { return vform ? s : VectorXcd(s - std::exp(-t) * af); };
        auto record = [&](const VectorXcd& s, double t, double div) {
            const VelocityField w = A.field_from_orth(s);
            const VelocityField uu = vform ? A.field_from_orth(u_of(s, t)) : w;
            TrajectorySample smp;
            smp.t = t;
            smp.l2 = std::sqrt(l2_norm_sq(w));
            smp.htilde = htilde_norm_sq(w, cfg.R).value;
            smp.h6m = h6m_norm_sq(w, cfg.R).value;
            smp.maxnorm = max_norm(w);
            smp.maxnorm_x = max_norm_x_refined(uu);
            smp.div_resid = div;
            tr.samples.push_back(smp);
            tr.states.push_back(s);
            vstates.push_back(v_of(s, t));
            ts.push_back(t);
            mx.push_back(smp.maxnorm_x);
        };

        const double T = cfg.T_end;
        double t = 0.0;
        long step_no = 0;
        double div0 = max_divergence(A.field_from_orth(u_of(x, 0.0)));
        tr.max_div_resid = div0;
        record(x, 0.0, div0);
        int since_sample = 0;
        auto rebuild = [&] {
            P = std::make_unique<Propagator>(A, dt, rates);
            n_prev.resize(0);
        };
        while (t < T - 1e-9 * dt) {
            if (nl) {
                const double dt_adv = advective_dt(A.field_from_orth(u_of(x, t)), cfg.eps);
                while (dt > dt_adv) {
                    if (tr.dt_halvings >= max_dt_halvings) {
                        std::ostringstream os;
                        os << "step size collapsed at t=" << t << ": advective limit " << dt_adv << " after "
                           << tr.dt_halvings << " halvings";
                        throw NumericalError(os.str());
                    }
                    dt *= 0.5;
                    sample_every *= 2;
                    since_sample *= 2;
                    ++tr.dt_halvings;
                    rebuild();
                }
                // grow back only on a sample boundary so sample times stay on the original lattice
                if (since_sample == 0 && dt < cfg.dt && sample_every % 2 == 0 && 4.0 * dt <= dt_adv) {
                    dt *= 2.0;
                    sample_every /= 2;
                    rebuild();
                }
            }
            VectorXcd n = VectorXcd::Zero(x.size());
            if (nl) {
                n = nonlinear_term(A, u_of(x, t), cfg.eps, cfg.dealias);
                if (vform) n -= std::exp(-2.0 * t) * g_nl;
            }
            VectorXcd next = P->exp_apply(x) + P->phi1_apply(n);
            if (cfg.scheme == Scheme::etd2 && n_prev.size() == n.size()) next += P->phi2_apply(n - n_prev);
            if (vform) {
                next += std::exp(-t) * P->psi_apply(0, g_lin);
                if (nl) next += std::exp(-2.0 * t) * P->psi_apply(1, g_nl);
            }
            const double before = x.norm(), after = next.norm();
            if (before > 0.0 && after > 10.0 * before) {
                std::ostringstream os;
                os << "time step unstable at t=" << t << ": state grew by " << after / before << " in one step (dt=" << dt
                   << ")";
                throw NumericalError(os.str());
            }
            if (!std::isfinite(after)) throw NumericalError("time step produced a non-finite state");
            n_prev = n;
            x = next;
            t += dt;
            ++step_no;
            const double div = max_divergence(A.field_from_orth(u_of(x, t)));
            tr.max_div_resid = std::max(tr.max_div_resid, div);
            if (++since_sample == sample_every || t >= T - 1e-9 * dt) {
                record(x, t, div);
                since_sample = 0;
            }
        }
        tr.dt = dt;
        tr.steps = static_cast<int>(step_no);
        tr.decay = decay_verdict(ts, mx, T);
        tr.top_third_fraction = top_third_fraction(A.field_from_orth(u_of(x, t)));
        tr.under_resolved = tr.top_third_fraction > 1e-6;

        // int (||v||^2 + ||v_t||^2) in Htilde, v_t by centered differences
        const std::size_t ns = vstates.size();
        std::vector<double> integrand(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == ns ? i : i + 1;
            if (lo == hi) {
                integrand[i] = A.htilde_sq_orth(vstates[i]);
                continue;
            }
            const VectorXcd vt = (vstates[hi] - vstates[lo]) / (ts[hi] - ts[lo]);
            integrand[i] = A.htilde_sq_orth(vstates[i]) + A.htilde_sq_orth(vt);
        }
        for (std::size_t i = 0; i + 1 < ns; ++i) tr.integral_v += 0.5 * (integrand[i] + integrand[i + 1]) * (ts[i + 1] - ts[i]);
        return tr;
    }
};

} // namespace

Trajectory simulate(const SimConfig& cfg) {
    cfg.validate();
    Runner r(cfg);
    return r.run(false);
}

Trajectory simulate_v(const SimConfig& cfg) {
    cfg.validate();
    Runner r(cfg);
    return r.run(true);
}

// ---- linear integrated estimate ------------------------------------------

VelocityField ExpForcing::at(double t) const {
    VelocityField out = VelocityField::zeros(g.front().grid());
    for (std::size_t i = 0; i < g.size(); ++i) out += std::exp(lambda[i] * t) * g[i];
    return out;
}

ExpForcing random_forcing(const GridPtr& grid, std::uint64_t seed, double mu_lo, double mu_hi, double omega_ratio) {
    if (!(mu_lo > 0.0 && mu_hi >= mu_lo)) throw ArgumentError("random_forcing: need 0 < mu_lo <= mu_hi");
    SplitMix64 rng(seed);
    const double mu = std::exp(rng.uniform(std::log(mu_lo), std::log(mu_hi)));
    const double omega = omega_ratio * mu * rng.uniform();
    RandomFieldOptions opt;
    opt.include_mean = true;
    const int mm = std::max(1, std::min(2, grid->nx / 2 - 1));
    const VelocityField wc = random_divfree_field(grid, rng.next(), mm, 2.0, opt);
    const VelocityField ws = random_divfree_field(grid, rng.next(), mm, 2.0, opt);
    const cplx lam(-mu, omega);
    ExpForcing F;
    F.lambda = {lam, std::conj(lam)};
    F.g = {cplx(0.5) * (wc - cplx(0.0, 1.0) * ws), cplx(0.5) * (wc + cplx(0.0, 1.0) * ws)};
    return F;
}

LinearEstimate linear_integrated_estimate(const OperatorAssembly& A, const ExpForcing& F, double T, double dt) {
    const long n = std::lround(T / dt);
    if (n < 2 || n % 2 != 0 || std::abs(n * dt - T) > 1e-9 * T)
        throw ArgumentError("linear_integrated_estimate: T/dt must be an even integer");
    const std::size_t nt = F.g.size();
    const Propagator P(A, dt, F.lambda);
    std::vector<VectorXcd> G;
    for (const auto& g : F.g) G.push_back(A.orth_coords(g));
    MatrixXcd gram(nt, nt);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nt; ++j) gram(i, j) = inner_product(F.g[i], F.g[j]);
    auto fnorm = [&](double t, bool deriv) {
        VectorXcd c(nt);
        for (std::size_t i = 0; i < nt; ++i) c(i) = std::exp(F.lambda[i] * t) * (deriv ? F.lambda[i] : cplx(1.0));
        return (c.adjoint() * gram * c)(0, 0).real();
    };

    std::vector<VectorXcd> v(n + 1);
    v[0] = VectorXcd::Zero(A.dim());
    for (long s = 0; s < n; ++s) {
        const double t = s * dt;
        VectorXcd next = P.exp_apply(v[s]);
        for (std::size_t i = 0; i < nt; ++i) next += std::exp(F.lambda[i] * t) * P.psi_apply(static_cast<int>(i), G[i]);
        v[s + 1] = next;
    }
    auto simpson = [&](auto&& f) {
        double acc = f(0) + f(n);
        for (long s = 1; s < n; ++s) acc += (s % 2 == 1 ? 4.0 : 2.0) * f(s);
        return acc * dt / 3.0;
    };
    LinearEstimate e;
    e.int_v = simpson([&](long s) { return A.htilde_sq_orth(v[s]); });
    e.int_vt = simpson([&](long s) {
        const long lo = s == 0 ? 0 : s - 1, hi = s == n ? n : s + 1;
        return A.htilde_sq_orth((v[hi] - v[lo]) / ((hi - lo) * dt));
    });
    e.int_F = simpson([&](long s) { return fnorm(s * dt, false); });
    e.int_Ft = simpson([&](long s) { return fnorm(s * dt, true); });
    const VelocityField F0 = F.at(0.0);
    e.F0_htilde = htilde_norm_sq(F0, A.R).value;
    e.LF0 = l2_norm_sq(apply_P(F0, A.U, A.R, 0.0));
    const double R2 = A.R * A.R;
    e.ratio = e.int_F > 0.0 ? e.int_v / (R2 * e.int_F) : 0.0;
    const double den = R2 * (e.LF0 + e.int_Ft);
    e.ratio_vt = den > 0.0 ? std::max(0.0, e.int_vt - e.F0_htilde) / den : 0.0;
    return e;
}

// ---- threshold experiments -----------------------------------------------

ThresholdResult threshold_search(double R, const VelocityField& f_shape, double eps_hi_init, double tol_rel,
                                 const ThresholdOptions& opt) {
    if (!(eps_hi_init > 0.0)) throw ArgumentError("threshold_search: eps_hi_init must be positive");
    if (!(tol_rel > 0.0)) throw ArgumentError("threshold_search: tol_rel must be positive");
    auto decays = [&](double eps) {
        SimConfig c;
        c.R = R;
        c.eps = eps;
        c.f = f_shape;
        c.dt = opt.dt;
        c.T_end = opt.T_end;
        c.dealias = opt.dealias;
        c.scheme = opt.scheme;
        c.sample_every = std::max(1, static_cast<int>(std::lround(0.25 / opt.dt)));
        try {
            return simulate(c).decay;
        } catch (const NumericalError&) {
            return false; // blow-up counts as non-decay
        }
    };
    ThresholdResult res;
    res.R = R;
    res.verdict_T = opt.T_end;
    double hi = eps_hi_init;
    int d = 0;
    while (decays(hi)) {
        if (++d > opt.max_doublings) {
            res.eps_lo = hi;
            res.eps_hi = std::numeric_limits<double>::infinity();
            res.eps_mid = std::numeric_limits<double>::quiet_NaN();
            res.found = false;
            return res;
        }
        hi *= 2.0;
    }
    double lo = hi / 2.0;
    int h = 0;
    while (!decays(lo)) {
        if (++h > opt.max_halvings) throw NumericalError("threshold_search: no decaying amplitude found");
        hi = lo;
        lo /= 2.0;
    }
    while (hi / lo > 1.0 + tol_rel && res.n_bisections < opt.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        if (decays(mid)) lo = mid;
        else hi = mid;
        ++res.n_bisections;
    }
    res.eps_lo = lo;
    res.eps_hi = hi;
    res.eps_mid = 0.5 * (lo + hi);
    res.found = true;
    return res;
}

Calibration calibrate(const std::vector<ResolventScan>& scans, double Ctilde) {
    Calibration c;
    for (const auto& s : scans) c.C = std::max(c.C, (s.sup_htilde / s.R) * (s.sup_htilde / s.R));
    c.Ctilde = Ctilde;
    c.K = c.C * std::sqrt(12.0 * Ctilde);
    c.c = c.K > 0.0 ? 1.0 / c.K : 0.0;
    return c;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ArgumentError("loglog_fit: need at least two matched points");
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw ArgumentError("loglog_fit: values must be positive");
        X(i, 0) = 1.0;
        X(i, 1) = std::log(x[i]);
        Y(i) = std::log(y[i]);
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
    LogLogFit f;
    f.intercept = beta(0);
    f.slope = beta(1);
    const Eigen::VectorXd r = Y - X * beta;
    f.residuals.assign(r.data(), r.data() + n);
    if (n > 2) {
        const double s2 = r.squaredNorm() / (n - 2.0);
        const double sxx = (X.col(1).array() - X.col(1).mean()).square().sum();
        f.slope_stderr = std::sqrt(s2 / sxx);
    }
    return f;
}

ScalingResult threshold_scaling(const std::vector<double>& R_list, const VelocityField& f_shape, double eps_hi_init,
                                double tol_rel, const ThresholdOptions& opt) {
    if (R_list.size() < 4) throw ArgumentError("threshold_scaling: need at least four Reynolds numbers");
    ScalingResult out;
    std::vector<double> xs, ys;
    for (double R : R_list) {
        ThresholdResult r = threshold_search(R, normalize_h6m(f_shape, R), eps_hi_init, tol_rel, opt);
        out.records.push_back(r);
        if (r.found) {
            xs.push_back(R);
            ys.push_back(r.eps_mid);
        }
    }
    if (xs.size() >= 2) out.fit = loglog_fit(xs, ys);
    return out;
}

} // namespace couette
