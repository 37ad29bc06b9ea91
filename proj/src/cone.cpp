#include "medialkit/cone.hpp"

#include <algorithm>

namespace medialkit {

namespace {

std::vector<std::vector<Vec>> single_linkage(const std::vector<Vec>& pts, double eps) {
    int n = int(pts.size());
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(pts[i], pts[j]) <= eps) parent[find(i)] = find(j);
    std::vector<std::vector<Vec>> out;
    std::vector<int> root_index(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_index[r] < 0) {
            root_index[r] = int(out.size());
            out.emplace_back();
        }
        out[root_index[r]].push_back(pts[i]);
    }
    return out;
}

}  // namespace

SphericalCloud tangent_cone_directions(const MedialCloud& cloud, const Vec& a,
                                       const std::vector<double>& scales, const Tolerances& tol) {
    if (scales.size() < 1) throw ValidationError("tangent cone needs at least one scale");
    for (size_t i = 0; i + 1 < scales.size(); ++i)
        if (!(scales[i] > scales[i + 1])) throw ValidationError("scales must be strictly decreasing");
    for (double r : scales)
        if (!(r > 2.0 * cloud.region.step))
            throw ValidationError("scales must exceed twice the cloud step");

    std::vector<std::vector<Vec>> annuli(scales.size());
    for (size_t k = 0; k < scales.size(); ++k) {
        double r = scales[k];
        for (const auto& m : cloud.samples) {
            double d = dist(m.point, a);
            if (d >= r / 2.0 && d <= r) annuli[k].push_back((m.point - a) / d);
        }
        if (annuli[k].size() < 3)
            throw TooFewSamples("annulus at scale " + std::to_string(r) + " has " +
                                std::to_string(annuli[k].size()) + " samples");
    }

    SphericalCloud out;
    out.anchor = a;
    const double match = 0.1;
    for (const auto& u : annuli.back()) {
        bool everywhere = true;
        for (size_t k = 0; k + 1 < annuli.size() && everywhere; ++k) {
            bool found = false;
            for (const auto& w : annuli[k])
                if (angle_between(u, w) <= match) {
                    found = true;
                    break;
                }
            everywhere = found;
        }
        if (!everywhere) continue;
        bool dup = false;
        for (const auto& w : out.directions)
            if (angle_between(u, w) <= 0.05) {
                dup = true;
                break;
            }
        if (!dup) {
            out.directions.push_back(u);
            out.scale_tags.push_back(scales);
        }
    }
    return out;
}

SphericalCloud sphere_medial(const Scene& s, const Vec& a, const Tolerances& tol) {
    NearestSet ns = nearest_set(s, a, tol);
    double d = ns.distance;
    if (d <= tol.eps_dist) throw OnX("sphere_medial requested on X");

    std::vector<Vec> reps;
    if (ns.continuum) {
        // resample the continuum densely enough that adjacent samples merge
        // below the separation threshold
        int budget = std::min(40000, int(std::ceil(2.0 * M_PI * d / (tol.sep_tol / 2.0))) + 8);
        NearestSet dense = nearest_set(s, a, tol, budget);
        for (const auto& c : dense.clusters)
            for (const auto& m : c.members) reps.push_back(m);
    } else {
        for (const auto& c : ns.clusters)
            for (const auto& m : c.members) reps.push_back(m);
    }

    SphericalCloud out;
    out.anchor = a;
    if (reps.size() < 2) return out;  // singleton m(a): empty medial cloud

    std::vector<Vec> grid =
        s.ambient_dim == 2 ? circle_directions(360) : fibonacci_sphere(1024);
    for (const auto& u : grid) {
        Vec q = a + d * u;
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& y : reps) dmin = std::min(dmin, dist(q, y));
        std::vector<Vec> achievers;
        for (const auto& y : reps)
            if (dist(q, y) <= dmin + tol.eps_cluster) achievers.push_back(y);
        if (achievers.size() < 2) continue;
        auto clusters = single_linkage(achievers, tol.eps_cluster);
        if (clusters.size() < 2) continue;
        double sep = 0.0;
        for (size_t i = 0; i < clusters.size(); ++i)
            for (size_t j = i + 1; j < clusters.size(); ++j)
                for (const auto& p : clusters[i])
                    for (const auto& q2 : clusters[j]) sep = std::max(sep, dist(p, q2));
        if (sep >= tol.sep_tol) {
            out.directions.push_back(u);
            out.scale_tags.push_back({d});
        }
    }
    return out;
}

double angular_hausdorff_one_sided(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    if (from.empty()) return 0.0;
    if (to.empty()) return M_PI;
    double h = 0.0;
    for (const auto& u : from) {
        double best = M_PI;
        for (const auto& w : to) best = std::min(best, angle_between(u, w));
        h = std::max(h, best);
    }
    return h;
}

ConeComparison compare_cone(const Scene& s, const MedialCloud& cloud, const Vec& a,
                            const std::vector<double>& scales, const Tolerances& tol) {
    ConeComparison cmp;
    cmp.anchor = a;
    cmp.plane_case = s.ambient_dim == 2;

    SphericalCloud sm = sphere_medial(s, a, tol);
    SphericalCloud tc;
    bool have_cone = true;
    try {
        tc = tangent_cone_directions(cloud, a, scales, tol);
    } catch (const TooFewSamples&) {
        have_cone = false;
    }
    if (!have_cone && sm.directions.empty()) {
        cmp.isolated_anchor = true;
        cmp.diam_condition_holds = true;
        return cmp;
    }
    if (!have_cone) throw TooFewSamples("tangent cone annuli underpopulated at the anchor");

    cmp.hausdorff_included = angular_hausdorff_one_sided(sm.directions, tc.directions);
    cmp.hausdorff_equal = std::max(cmp.hausdorff_included,
                                   angular_hausdorff_one_sided(tc.directions, sm.directions));
    cmp.diam_condition_holds = true;
    for (const auto& m : cloud.samples)
        if (dist(m.point, a) <= scales.back() && m.diameter < tol.sep_tol)
            cmp.diam_condition_holds = false;
    return cmp;
}

}  // namespace medialkit
