#pragma once

#include "couette/fields.hpp"

#include <cmath>
#include <numbers>

namespace testing_support {

using namespace couette;

inline constexpr double pi = std::numbers::pi;

template <class F>
ScalarField from_function(const GridPtr& g, F f) {
    ScalarField s = ScalarField::zeros(g, Rep::physical);
    for (int i = 0; i < g->nx; ++i)
        for (int m = 0; m < g->ny; ++m) s.data(i, m) = f(g->x_point(i), g->y_nodes(m));
    return s.spectral();
}

template <class F1, class F2>
VelocityField vfield(const GridPtr& g, F1 f1, F2 f2) {
    return {from_function(g, f1), from_function(g, f2)};
}

inline double max_abs(const ScalarField& f) { return f.physical().data.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    return (a.physical().data - b.physical().data).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const VelocityField& a, const VelocityField& b) {
    return std::max(max_abs_diff(a.u1, b.u1), max_abs_diff(a.u2, b.u2));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testing_support
