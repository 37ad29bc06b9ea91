#pragma once

#include "medialkit/scene.hpp"

namespace medialkit {

struct Cluster {
    Vec representative;
    std::vector<Vec> members;
};

struct NearestSet {
    Vec query;
    double distance = 0.0;
    std::vector<Cluster> clusters;
    int multiplicity = 0;
    double diameter = 0.0;  // max pairwise distance among gathered members
    bool continuum = false;
};

struct NormalFan {
    enum class Kind { ExactAtPoint, LimitingWithRadius };
    Vec base;
    std::vector<Vec> directions;
    Kind kind = Kind::ExactAtPoint;
    double eta = 0.0;
};

struct ConvexityProbeReport {
    int checks = 0;
    std::vector<std::string> violations;
    bool passed() const { return violations.empty(); }
};

double distance(const Scene& s, const Vec& x);

// All nearest points across primitives, gathered within eps_cluster of the
// minimum and merged by single-linkage clustering at eps_cluster.
NearestSet nearest_set(const Scene& s, const Vec& x, const Tolerances& tol, int rep_budget = 0);

// True when x is not medial at resolution: one cluster, or all of them packed
// below the separation threshold.
inline bool singleton_at_resolution(const NearestSet& ns, const Tolerances& tol) {
    return ns.multiplicity == 1 || ns.diameter < tol.sep_tol;
}

// V_a: union of primitive normal fans at a, filtered by the scene-level
// proximality predicate (a must stay the nearest scene point a short step out).
NormalFan normal_directions(const Scene& s, const Vec& a, const Tolerances& tol);

// Finite-radius stand-in for the Kuratowski limsup of V_x as x -> a.
NormalFan limiting_normals(const Scene& s, const Vec& a, double eta, const Tolerances& tol);

// Checks convexity of the normal set N(a): witnesses x with a in m(x) must
// keep a nearest along their connecting segments.
ConvexityProbeReport normal_set_probe(const Scene& s, const Vec& a,
                                      const std::vector<Vec>& witnesses, const Tolerances& tol);

}  // namespace medialkit
