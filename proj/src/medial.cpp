#include "medialkit/medial.hpp"

#include <algorithm>

namespace medialkit {

double OffsetView::field_distance(const Vec& x) const {
    return std::max(distance(*base, x) - eps, 0.0);
}

NearestSet OffsetView::field_nearest(const Vec& x, const Tolerances& tol, int rep_budget) const {
    NearestSet ns = nearest_set(*base, x, tol, rep_budget);
    double d = ns.distance;
    if (d <= eps) {
        NearestSet inside;
        inside.query = x;
        inside.distance = 0.0;
        inside.clusters.push_back({x, {x}});
        inside.multiplicity = 1;
        return inside;
    }
    double ratio = (d - eps) / d;
    NearestSet out;
    out.query = x;
    out.distance = d - eps;
    out.continuum = ns.continuum;
    for (const auto& c : ns.clusters) {
        Cluster oc;
        oc.representative = x + ratio * (c.representative - x);
        for (const auto& m : c.members) oc.members.push_back(x + ratio * (m - x));
        out.clusters.push_back(oc);
    }
    out.multiplicity = ns.multiplicity;
    out.diameter = ns.diameter * ratio;
    return out;
}

OffsetView offset_view(const Scene& s, double eps) {
    if (!(eps > 0)) throw ValidationError("offset eps must be positive");
    return OffsetView{&s, eps};
}

namespace {

struct GridIter {
    Vec lo;
    double step;
    int nx = 1, ny = 1, nz = 1;

    GridIter(const Region& r, int dim) {
        if (!(r.step > 0)) throw EmptyRegion("region step must be positive");
        lo = r.lo;
        step = r.step;
        auto count = [&](double a, double b) {
            if (!(b > a)) throw EmptyRegion("region is empty (lo >= hi)");
            return int(std::floor((b - a) / step + 1e-9)) + 1;
        };
        nx = count(r.lo.x, r.hi.x);
        ny = count(r.lo.y, r.hi.y);
        nz = dim == 3 ? count(r.lo.z, r.hi.z) : 1;
    }

    template <class F>
    void for_each(F&& f) const {
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k)
                    f(Vec{lo.x + i * step, lo.y + j * step, lo.z + k * step});
    }
};

template <class Field>
MedialCloud scan_impl(const Field& field, const std::string& name, int dim, const Region& r,
                      const Tolerances& tol) {
    MedialCloud cloud;
    cloud.scene_name = name;
    cloud.region = r;
    GridIter grid(r, dim);
    grid.for_each([&](const Vec& x) {
        NearestSet ns = field.field_nearest(x, tol);
        if (ns.multiplicity >= 2 && ns.diameter >= tol.sep_tol)
            cloud.samples.push_back({x, ns.distance, ns.multiplicity, ns.diameter, false});
    });
    return cloud;
}

struct SceneFieldRef {
    const Scene* s;
    double field_distance(const Vec& x) const { return distance(*s, x); }
    NearestSet field_nearest(const Vec& x, const Tolerances& tol) const {
        return nearest_set(*s, x, tol);
    }
};

}  // namespace

MedialCloud scan_medial(const Scene& s, const Region& r, const Tolerances& tol) {
    return scan_impl(SceneFieldRef{&s}, s.name, s.ambient_dim, r, tol);
}

MedialCloud scan_medial(const OffsetView& v, const Region& r, const Tolerances& tol) {
    return scan_impl(v, v.base->name + "^eps", v.dim(), r, tol);
}

Vec refine_crossing(const Scene& s, const Vec& x0, const Vec& x1, const Tolerances& tol) {
    NearestSet ns0 = nearest_set(s, x0, tol);
    NearestSet ns1 = nearest_set(s, x1, tol);
    Vec a_cur = ns0.clusters.front().representative;
    Vec b_cur = ns1.clusters.front().representative;
    if (dist(a_cur, b_cur) <= tol.sep_tol)
        throw NoCrossing("nearest clusters agree at both segment ends");

    double lo = 0.0, hi = 1.0;
    auto at = [&](double t) { return x0 + t * (x1 - x0); };
    for (int it = 0; it < 80 && (hi - lo) * dist(x0, x1) > tol.eps_dist; ++it) {
        double mid = 0.5 * (lo + hi);
        NearestSet ns = nearest_set(s, at(mid), tol);
        // classify the midpoint by which endpoint territory its nearest
        // cluster belongs to
        const Cluster* best = &ns.clusters.front();
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& c : ns.clusters) {
            double d = std::min(dist(c.representative, a_cur), dist(c.representative, b_cur));
            if (d < bd) {
                bd = d;
                best = &c;
            }
        }
        if (dist(best->representative, a_cur) <= dist(best->representative, b_cur)) {
            lo = mid;
            a_cur = best->representative;
        } else {
            hi = mid;
            b_cur = best->representative;
        }
    }
    return at(0.5 * (lo + hi));
}

namespace {

double one_sided_hausdorff(const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double h = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to) best = std::min(best, dist(p, q));
        h = std::max(h, best);
    }
    return h;
}

}  // namespace

OffsetMedialReport offset_medial_check(const Scene& s, double eps, const Region& r,
                                       const Tolerances& tol) {
    OffsetView view = offset_view(s, eps);
    MedialCloud base = scan_medial(s, r, tol);
    MedialCloud off = scan_medial(view, r, tol);

    std::vector<Vec> base_pts, off_pts;
    for (const auto& m : base.samples)
        if (m.distance > eps + tol.sep_tol) base_pts.push_back(m.point);
    for (const auto& m : off.samples)
        if (m.distance > tol.sep_tol) off_pts.push_back(m.point);

    OffsetMedialReport rep;
    rep.base_count = int(base_pts.size());
    rep.offset_count = int(off_pts.size());
    rep.hausdorff_base_to_offset = one_sided_hausdorff(base_pts, off_pts);
    rep.hausdorff_offset_to_base = one_sided_hausdorff(off_pts, base_pts);
    double bound = 2.0 * r.step;
    for (const auto& p : base_pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : off_pts) best = std::min(best, dist(p, q));
        if (best > bound)
            rep.discrepancies.push_back("base sample " + to_string(p, s.ambient_dim) +
                                        " unmatched in offset cloud");
    }
    for (const auto& p : off_pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : base_pts) best = std::min(best, dist(p, q));
        if (best > bound)
            rep.discrepancies.push_back("offset sample " + to_string(p, s.ambient_dim) +
                                        " unmatched in base cloud");
    }
    return rep;
}

GammaReport gamma_checks(const Scene& s, const std::vector<Vec>& probes, const Tolerances& tol) {
    GammaReport report;
    int probe_index = 0;
    for (const auto& a : probes) {
        GammaProbeResult res;
        res.probe = a;
        NearestSet ns = nearest_set(s, a, tol);
        double da = ns.distance;
        if (da <= tol.eps_dist) throw ProbeOnX("gamma probe lies on X");

        // (1) Lipschitz cone around (a, d(a))
        Rng rng(tol.seed ^ (0x9e37ULL * (probe_index + 1)));
        double scale = 2.0 * std::max(1.0, da);
        for (int i = 0; i < 32; ++i) {
            Vec x = rng.in_box(a - Vec{scale, scale, scale}, a + Vec{scale, scale, scale},
                               s.ambient_dim);
            double dx = distance(s, x);
            if (std::abs(dx - da) > dist(x, a) + tol.eps_dist) {
                res.lipschitz_ok = false;
                res.notes.push_back("lipschitz violated at " + to_string(x, s.ambient_dim));
            }
        }

        // (2) linear decay toward each nearest point, with a singleton nearest
        // set along the open segment
        for (const auto& c : ns.clusters) {
            const Vec& v = c.representative;
            for (double t : {0.25, 0.5, 0.75}) {
                Vec q = t * v + (1.0 - t) * a;
                double dq = distance(s, q);
                if (std::abs(dq - (1.0 - t) * da) > tol.eps_dist) {
                    res.segment_ok = false;
                    res.notes.push_back("segment decay off at t=" + std::to_string(t));
                    continue;
                }
                NearestSet nq = nearest_set(s, q, tol);
                bool near_v = false;
                for (const auto& cc : nq.clusters)
                    for (const auto& m : cc.members) near_v = near_v || dist(m, v) <= 10.0 * tol.eps_cluster;
                if (!singleton_at_resolution(nq, tol) || !near_v) {
                    res.segment_ok = false;
                    res.notes.push_back("m not the singleton {v} at t=" + std::to_string(t));
                }
            }
        }

        // (3) epigraph nearest-set case formula on the cone axis below (a, d(a))
        for (double y : {-2.0 * da, 0.0, 0.5 * da}) {
            if (y <= -da) {
                // m_Gamma(a, y) = m(a) x {0}: equidistant feet, one per cluster
                double ref = -1.0;
                for (const auto& c : ns.clusters) {
                    double dd = std::hypot(dist(a, c.representative), y);
                    if (ref < 0) ref = dd;
                    if (std::abs(dd - ref) > 1e-7) {
                        res.epigraph_ok = false;
                        res.notes.push_back("epigraph feet not equidistant at y<=-d");
                    }
                }
            } else {
                double t = (da - y) / (2.0 * da);
                double ystar = (da + y) / 2.0;
                double ref = -1.0;
                for (const auto& c : ns.clusters) {
                    Vec xs = a + t * (c.representative - a);
                    double dxs = distance(s, xs);
                    if (std::abs(dxs - ystar) > 10.0 * tol.eps_dist) {
                        res.epigraph_ok = false;
                        res.notes.push_back("predicted epigraph foot off the graph");
                    }
                    double dd = std::hypot(dist(a, xs), y - ystar);
                    if (ref < 0) ref = dd;
                    if (std::abs(dd - ref) > 1e-7) {
                        res.epigraph_ok = false;
                        res.notes.push_back("epigraph feet not equidistant");
                    }
                }
                // multiplicity preserved: scaled cluster representatives stay separated
                for (size_t i = 0; i < ns.clusters.size(); ++i)
                    for (size_t j = i + 1; j < ns.clusters.size(); ++j) {
                        double sep = t * dist(ns.clusters[i].representative,
                                              ns.clusters[j].representative);
                        if (ns.diameter >= tol.sep_tol && sep <= tol.eps_cluster) {
                            res.epigraph_ok = false;
                            res.notes.push_back("epigraph multiplicity collapsed");
                        }
                    }
            }
        }
        report.probes.push_back(res);
        ++probe_index;
    }
    return report;
}

}  // namespace medialkit
