#pragma once

#include "medialkit/nearest.hpp"

namespace medialkit {

struct DerivativeResult {
    Vec base;
    Vec dir;
    double value = 0.0;
    std::vector<Vec> witnesses;  // nearest points achieving the infimum
};

// One-sided directional derivative of the distance function at a point off X:
// the infimum of -<v, (x - a)/|x - a|> over the nearest set.
DerivativeResult directional_derivative(const Scene& s, const Vec& a, const Vec& v,
                                        const Tolerances& tol);

// One-sided forward difference, the independent cross-check.
double directional_derivative_fd(const Scene& s, const Vec& a, const Vec& v, double h);

// Same derivative through the rescaled nearest set on the unit sphere:
// (d(v, m_hat)^2 - |v|^2 - 1) / 2.
double derivative_via_sphere(const Scene& s, const Vec& a, const Vec& v, const Tolerances& tol);

}  // namespace medialkit
