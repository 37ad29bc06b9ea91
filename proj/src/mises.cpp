#include "medialkit/mises.hpp"

namespace medialkit {

DerivativeResult directional_derivative(const Scene& s, const Vec& a, const Vec& v,
                                        const Tolerances& tol) {
    NearestSet ns = nearest_set(s, a, tol);
    if (ns.distance <= tol.eps_dist) throw OnX("directional derivative requested on X");
    if (std::abs(norm(v) - 1.0) > tol.eps_unit)
        throw ValidationError("direction must be a unit vector");

    DerivativeResult res;
    res.base = a;
    res.dir = v;
    res.value = std::numeric_limits<double>::infinity();
    for (const auto& c : ns.clusters) {
        for (const auto& x : c.members) {
            double val = -dot(v, (x - a) / dist(x, a));
            if (val < res.value - 1e-12) {
                res.value = val;
                res.witnesses.clear();
            }
            if (val <= res.value + 1e-12) res.witnesses.push_back(x);
        }
    }
    return res;
}

double directional_derivative_fd(const Scene& s, const Vec& a, const Vec& v, double h) {
    if (!(h > 0)) throw ValidationError("finite-difference step must be positive");
    double da = distance(s, a);
    Tolerances tol = default_tolerances();
    if (da <= tol.eps_dist) throw OnX("finite difference requested on X");
    return (distance(s, a + h * v) - da) / h;
}

double derivative_via_sphere(const Scene& s, const Vec& a, const Vec& v, const Tolerances& tol) {
    NearestSet ns = nearest_set(s, a, tol);
    if (ns.distance <= tol.eps_dist) throw OnX("sphere-formula derivative requested on X");
    double d = ns.distance;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : ns.clusters)
        for (const auto& x : c.members) best = std::min(best, norm((x - a) / d - v));
    return 0.5 * (best * best - norm2(v) - 1.0);
}

}  // namespace medialkit
