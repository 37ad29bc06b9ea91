#include "medialkit/nearest.hpp"

#include <algorithm>
#include <numeric>

namespace medialkit {

double distance(const Scene& s, const Vec& x) {
    Tolerances tol = default_tolerances();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : s.primitives)
        best = std::min(best, primitive_nearest(p, x, tol).distance);
    return best;
}

NearestSet nearest_set(const Scene& s, const Vec& x, const Tolerances& tol, int rep_budget) {
    NearestSet ns;
    ns.query = x;

    std::vector<NearestResult> per_prim;
    per_prim.reserve(s.primitives.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : s.primitives) {
        per_prim.push_back(primitive_nearest(p, x, tol, rep_budget));
        best = std::min(best, per_prim.back().distance);
    }
    ns.distance = best;

    std::vector<Vec> members;
    for (const auto& r : per_prim) {
        if (r.distance > best + tol.eps_cluster) continue;
        if (r.continuum) ns.continuum = true;
        for (const auto& y : r.representatives) {
            if (dist(x, y) > best + tol.eps_cluster) continue;
            bool dup = false;
            for (const auto& m : members)
                if (dist(m, y) <= 1e-9) {
                    dup = true;
                    break;
                }
            if (!dup) members.push_back(y);
        }
    }

    // single-linkage clustering at eps_cluster (ties merge)
    int n = int(members.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(members[i], members[j]) <= tol.eps_cluster) parent[find(i)] = find(j);

    std::vector<int> roots;
    for (int i = 0; i < n; ++i)
        if (find(i) == i) roots.push_back(i);
    for (int r : roots) {
        Cluster c;
        for (int i = 0; i < n; ++i)
            if (find(i) == r) c.members.push_back(members[i]);
        Vec centroid{0, 0, 0};
        for (const auto& m : c.members) centroid += m;
        centroid = centroid / double(c.members.size());
        c.representative = c.members.front();
        double bestd = dist(c.representative, centroid);
        for (const auto& m : c.members)
            if (dist(m, centroid) < bestd) {
                bestd = dist(m, centroid);
                c.representative = m;
            }
        ns.clusters.push_back(c);
    }
    ns.multiplicity = int(ns.clusters.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            ns.diameter = std::max(ns.diameter, dist(members[i], members[j]));
    return ns;
}

namespace {

bool cluster_near(const NearestSet& ns, const Vec& a, double radius) {
    for (const auto& c : ns.clusters)
        for (const auto& m : c.members)
            if (dist(m, a) <= radius) return true;
    return false;
}

// keep v iff a short step along v keeps a as the nearest scene point
bool scene_proximal(const Scene& s, const Vec& a, const Vec& v, const Tolerances& tol) {
    const double step = 1e-3;
    Vec q = a + step * v;
    NearestSet ns = nearest_set(s, q, tol);
    if (std::abs(ns.distance - step) > 10.0 * tol.eps_dist) return false;
    return cluster_near(ns, a, tol.eps_cluster);
}

void sort_dirs(std::vector<Vec>& dirs) {
    std::sort(dirs.begin(), dirs.end(), [](const Vec& a, const Vec& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
}

}  // namespace

NormalFan normal_directions(const Scene& s, const Vec& a, const Tolerances& tol) {
    NearestSet on = nearest_set(s, a, tol);
    if (on.distance > tol.eps_dist)
        throw NotOnX("point is not on X (distance " + std::to_string(on.distance) + ")");

    NormalFan fan;
    fan.base = a;
    fan.kind = NormalFan::Kind::ExactAtPoint;
    std::vector<Vec> candidates;
    for (const auto& p : s.primitives) {
        if (primitive_nearest(p, a, tol).distance > tol.eps_dist) continue;
        for (const auto& v : primitive_normals(p, a, tol, s.ambient_dim)) candidates.push_back(v);
    }
    for (const auto& v : candidates) {
        bool dup = false;
        for (const auto& w : fan.directions)
            if (dist(v, w) <= 1e-9) {
                dup = true;
                break;
            }
        if (!dup && scene_proximal(s, a, v, tol)) fan.directions.push_back(v);
    }
    sort_dirs(fan.directions);
    return fan;
}

NormalFan limiting_normals(const Scene& s, const Vec& a, double eta, const Tolerances& tol) {
    if (eta <= 0) throw ValidationError("limiting_normals needs eta > 0");
    NearestSet on = nearest_set(s, a, tol);
    if (on.distance > tol.eps_dist) throw NotOnX("point is not on X");

    NormalFan fan;
    fan.base = a;
    fan.kind = NormalFan::Kind::LimitingWithRadius;
    fan.eta = eta;

    std::vector<Vec> samples;
    int per_prim = std::max<int>(16, 64 / int(s.primitives.size()) + 1);
    for (const auto& p : s.primitives)
        for (const auto& q : primitive_sample_in_ball(p, a, eta, per_prim, tol))
            if (dist(q, a) > tol.eps_dist) samples.push_back(q);

    std::vector<Vec> dirs = normal_directions(s, a, tol).directions;  // V_a itself
    for (const auto& q : samples) {
        NormalFan vq = normal_directions(s, q, tol);
        dirs.insert(dirs.end(), vq.directions.begin(), vq.directions.end());
    }
    for (const auto& v : dirs) {
        bool dup = false;
        for (const auto& w : fan.directions)
            if (dist(v, w) <= 1e-3) {
                dup = true;
                break;
            }
        if (!dup) fan.directions.push_back(v);
    }
    sort_dirs(fan.directions);
    return fan;
}

ConvexityProbeReport normal_set_probe(const Scene& s, const Vec& a,
                                      const std::vector<Vec>& witnesses, const Tolerances& tol) {
    ConvexityProbeReport rep;
    for (const auto& x : witnesses) {
        NearestSet ns = nearest_set(s, x, tol);
        if (!cluster_near(ns, a, tol.eps_cluster))
            throw BadWitness("witness " + to_string(x, s.ambient_dim) +
                             " does not have a in its nearest set");
    }
    for (size_t i = 0; i < witnesses.size(); ++i) {
        for (size_t j = i + 1; j < witnesses.size(); ++j) {
            for (double t : {0.25, 0.5, 0.75}) {
                Vec mid = t * witnesses[i] + (1.0 - t) * witnesses[j];
                ++rep.checks;
                NearestSet ns = nearest_set(s, mid, tol);
                if (!cluster_near(ns, a, tol.eps_cluster))
                    rep.violations.push_back("a lost from m at " + to_string(mid, s.ambient_dim) +
                                             " (t=" + std::to_string(t) + ")");
            }
        }
    }
    return rep;
}

}  // namespace medialkit
