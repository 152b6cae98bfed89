#pragma once

#include "couette/linop.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace couette {

enum class Scheme {
    etd1, ///< exponential Euler: linear part exact, nonlinear term frozen per step
    etd2  ///< second-order exponential multistep (Cox-Matthews)
};

struct SimConfig {
    double R = 100.0;
    double eps = 0.0;
    VelocityField f; ///< initial shape, unit H6m norm at R
    double dt = 0.02;
    double T_end = 50.0;
    bool dealias = true;
    int sample_every = 10; ///< steps between stored samples
    Scheme scheme = Scheme::etd1;

    /// Throws ArgumentError on an invalid configuration.
    void validate() const;
};

struct TrajectorySample {
    double t = 0.0;
    double l2 = 0.0;     // norm
    double htilde = 0.0; // squared
    double h6m = 0.0;    // squared
    double maxnorm = 0.0;
    double maxnorm_x = 0.0; // continuous-x maximum used by the decay verdict
    double div_resid = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<VectorXcd> states; ///< orthonormal coordinates at the samples
    double integral_v = 0.0;       ///< int (||v||_Ht^2 + ||v_t||_Ht^2) dt
    double max_div_resid = 0.0;    ///< over every step
    double top_third_fraction = 0.0;
    bool under_resolved = false;
    bool decay = false;
    double dt = 0.0;
    int steps = 0;
    int dt_halvings = 0;
};

/// Exponential integrator for the projected dynamics in L2-orthonormal
/// coordinates of an OperatorAssembly.
class Propagator {
public:
    Propagator(const OperatorAssembly& A, double dt, const std::vector<cplx>& forcing_rates = {});

    double dt() const { return dt_; }
    /// e^{dt A} a
    VectorXcd exp_apply(const VectorXcd& a) const;
    /// int_0^dt e^{(dt-s)A} ds  n
    VectorXcd phi1_apply(const VectorXcd& n) const;
    /// int_0^dt e^{(dt-s)A} (s/dt) ds  n
    VectorXcd phi2_apply(const VectorXcd& n) const;
    /// int_0^dt e^{(dt-s)A} e^{lambda s} ds  g, lambda = forcing_rates[i]
    VectorXcd psi_apply(int i, const VectorXcd& g) const;

private:
    struct Block {
        MatrixXcd E, P1, P2;
        std::vector<MatrixXcd> Psi;
    };
    const OperatorAssembly* A_;
    double dt_;
    std::vector<Block> blocks_;
    std::vector<int> off_;
};

/// -eps P[(u.grad)u + grad p2] in orthonormal coordinates.
VectorXcd nonlinear_term(const OperatorAssembly& A, const VectorXcd& a, double eps, bool dealias);

/// One exponential-Euler step of the perturbation equation.
VelocityField step(const VelocityField& u, const BaseFlow& U, double R, double eps, double dt);

/// Trajectory of u_t = L u - eps (u.grad)u - eps grad p2 from u(0) = f.
Trajectory simulate(const SimConfig& cfg);
/// The same problem written for v = u - e^{-t} f with v(0) = 0.
Trajectory simulate_v(const SimConfig& cfg);

/// e^{-t} ((L + I) f - eps e^{-t} (f.grad) f)
VelocityField forcing_F(const VelocityField& f, const BaseFlow& U, double R, double eps, double t);

/// Decay verdict on a max-norm history: last below 1% of first and the
/// final quarter nonincreasing.
bool decay_verdict(const std::vector<double>& times, const std::vector<double>& maxnorm, double T_end);

/// Forcing sum_i e^{lambda_i t} g_i (real when terms come in conjugate pairs).
struct ExpForcing {
    std::vector<cplx> lambda;
    std::vector<VelocityField> g;

    VelocityField at(double t) const;
};

/// Random real forcing e^{-mu t}(cos(w t) w_c + sin(w t) w_s) with
/// divergence-free, wall-clamped w_c, w_s (mean flow included).
ExpForcing random_forcing(const GridPtr& grid, std::uint64_t seed, double mu_lo, double mu_hi, double omega_ratio);

struct LinearEstimate {
    double int_v = 0.0;  // int ||v||_Ht^2
    double int_vt = 0.0; // int ||v_t||_Ht^2 (centered differences)
    double int_F = 0.0;  // int ||F||^2
    double int_Ft = 0.0; // int ||F_t||^2
    double F0_htilde = 0.0;
    double LF0 = 0.0;    // ||(L + I) F(0)||^2
    double ratio = 0.0;    // int_v / (R^2 int_F)
    double ratio_vt = 0.0; // (int_vt - F0_htilde)_+ / (R^2 (LF0 + int_Ft))
};

/// Linear problem v_t = L v + F, v(0) = 0, integrated exactly in time,
/// integrals by Simpson's rule on the step grid (dt must divide T into an
/// even count).
LinearEstimate linear_integrated_estimate(const OperatorAssembly& A, const ExpForcing& F, double T, double dt);

struct ThresholdOptions {
    double T_end = 50.0;
    double dt = 0.02;
    bool dealias = true;
    Scheme scheme = Scheme::etd1;
    int max_doublings = 20;
    int max_halvings = 60;
    int max_bisections = 200;
};

struct ThresholdResult {
    double R = 0.0;
    double eps_lo = 0.0; ///< largest amplitude seen to decay
    double eps_hi = 0.0; ///< smallest amplitude seen not to decay
    double eps_mid = 0.0;
    double verdict_T = 0.0;
    int n_bisections = 0;
    bool found = false; ///< false: no non-decaying amplitude below the doubling cap
};

/// Bisection for the smallest non-decaying amplitude.
ThresholdResult threshold_search(double R, const VelocityField& f_shape, double eps_hi_init, double tol_rel,
                                 const ThresholdOptions& opt = {});

/// Empirical inputs of K = C sqrt(12 Ctilde) and the guaranteed amplitude
/// c R^-3 with c = 1/K.
struct Calibration {
    double C = 0.0;
    double Ctilde = 0.0;
    double K = 0.0;
    double c = 0.0;
};

/// C from sup ||(sI-L)^-1||_{L2->Ht}^2 / R^2 over the given assemblies' scans,
/// Ctilde from the ensemble maximum of embedding_ratio.
Calibration calibrate(const std::vector<ResolventScan>& scans, double Ctilde);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> residuals;
};

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingResult {
    std::vector<ThresholdResult> records;
    LogLogFit fit;
};

ScalingResult threshold_scaling(const std::vector<double>& R_list, const VelocityField& f_shape, double eps_hi_init,
                                double tol_rel, const ThresholdOptions& opt = {});

} // namespace couette
