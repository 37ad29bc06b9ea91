#pragma once

#include "medialkit/medial.hpp"

namespace medialkit {

struct SphericalCloud {
    Vec anchor;
    std::vector<Vec> directions;                  // unit vectors
    std::vector<std::vector<double>> scale_tags;  // per direction: scales where observed
};

struct ConeComparison {
    Vec anchor;
    double hausdorff_included = 0.0;  // sphere-medial directions into the cone cloud
    double hausdorff_equal = 0.0;     // symmetric angular Hausdorff
    bool plane_case = false;
    bool diam_condition_holds = false;
    bool isolated_anchor = false;  // both clouds empty (isolated medial point)
};

// Secant-direction tangent cone estimate from a medial cloud: directions that
// persist (within 0.1 rad) across every annulus scale.
SphericalCloud tangent_cone_directions(const MedialCloud& cloud, const Vec& a,
                                       const std::vector<double>& scales, const Tolerances& tol);

// (M_{m(a)} - a) intersected with the unit sphere: classify grid directions u
// by whether a + d(a) u has a split nearest set inside Y = m(a).
SphericalCloud sphere_medial(const Scene& s, const Vec& a, const Tolerances& tol);

// Compare the two clouds at a medial anchor.
ConeComparison compare_cone(const Scene& s, const MedialCloud& cloud, const Vec& a,
                            const std::vector<double>& scales, const Tolerances& tol);

double angular_hausdorff_one_sided(const std::vector<Vec>& from, const std::vector<Vec>& to);

}  // namespace medialkit
