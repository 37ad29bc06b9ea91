#include <algorithm>

#include "medialkit/scene.hpp"

namespace medialkit {

namespace {

// interior margin below which a point counts as sitting on an edge/corner
constexpr double kEdgeMargin = 1e-6;

Vec perp2(const Vec& t) { return {-t.y, t.x, 0.0}; }

// {w : <w, t_in> <= 0} on the unit circle, boundary included
std::vector<Vec> cone_dirs_2d(const Vec& t_in) {
    Vec out_dir = -t_in;
    Vec n = perp2(t_in);
    std::vector<Vec> dirs;
    const int k = 16;
    for (int i = 0; i <= k; ++i) {
        double a = -M_PI_2 + M_PI * i / k;
        dirs.push_back(std::cos(a) * out_dir + std::sin(a) * n);
    }
    return dirs;
}

// hemisphere {w : <w, t_in> <= 0}, boundary circle included
std::vector<Vec> cone_dirs_3d(const Vec& t_in) {
    std::vector<Vec> dirs;
    for (const auto& u : fibonacci_sphere(96))
        if (dot(u, t_in) <= 1e-12) dirs.push_back(u);
    Vec e1 = any_orthogonal(t_in), e2 = cross(t_in, e1);
    for (int i = 0; i < 16; ++i) {
        double a = 2.0 * M_PI * i / 16;
        dirs.push_back(std::cos(a) * e1 + std::sin(a) * e2);
    }
    dirs.push_back(-t_in);
    return dirs;
}

std::vector<Vec> normal_circle_3d(const Vec& tangent, int n) {
    Vec e1 = any_orthogonal(tangent), e2 = cross(normalized(tangent), e1);
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * M_PI * i / n;
        dirs.push_back(std::cos(a) * e1 + std::sin(a) * e2);
    }
    return dirs;
}

std::vector<Vec> curve_point_normals(const Vec& tangent, int dim) {
    if (dim == 2) {
        Vec n = normalized(perp2(tangent));
        return {n, -n};
    }
    return normal_circle_3d(tangent, 16);
}

std::vector<Vec> full_fan(int dim) {
    return dim == 2 ? circle_directions(16) : fibonacci_sphere(64);
}

// Sampled proximal cone for patch edges/corners: keep directions u for which
// a remains the nearest patch point a short step away.
std::vector<Vec> proximal_cone_sample(const Primitive& p, const Vec& a, const Tolerances& tol,
                                      int dim) {
    const double s = 1e-4;
    std::vector<Vec> dirs = dim == 2 ? circle_directions(256) : fibonacci_sphere(1024);
    std::vector<Vec> out;
    for (const auto& u : dirs) {
        NearestResult nr = primitive_nearest(p, a + s * u, tol);
        if (std::abs(nr.distance - s) > 1e-8) continue;
        double foot = std::numeric_limits<double>::infinity();
        for (const auto& r : nr.representatives) foot = std::min(foot, dist(r, a));
        if (foot <= s) out.push_back(u);
    }
    return out;
}

void dedupe_dirs(std::vector<Vec>& dirs) {
    std::vector<Vec> out;
    for (const auto& d : dirs) {
        bool dup = false;
        for (const auto& e : out)
            if (dist(d, e) <= 1e-9) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(d);
    }
    dirs.swap(out);
}

double wrap_near(double theta, double lo) {
    while (theta < lo) theta += 2.0 * M_PI;
    while (theta >= lo + 2.0 * M_PI) theta -= 2.0 * M_PI;
    return theta;
}

}  // namespace

std::vector<Vec> primitive_normals(const Primitive& p, const Vec& a, const Tolerances& tol,
                                   int ambient_dim) {
    NearestResult on = primitive_nearest(p, a, tol);
    if (on.distance > tol.eps_dist)
        throw OffPrimitive("point is not on the primitive (distance " +
                           std::to_string(on.distance) + ")");

    std::vector<Vec> dirs;
    if (const auto* ps = std::get_if<PointSetPrim>(&p.shape)) {
        (void)ps;
        dirs = full_fan(ambient_dim);
    } else if (const auto* sg = std::get_if<SegmentPrim>(&p.shape)) {
        Vec d = sg->b - sg->a;
        double len = norm(d);
        Vec u = d / len;
        double t = dot(a - sg->a, u);
        if (t <= kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(u) : cone_dirs_3d(u);
        else if (t >= len - kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(-u) : cone_dirs_3d(-u);
        else
            dirs = curve_point_normals(u, ambient_dim);
    } else if (const auto* ln = std::get_if<LinePrim>(&p.shape)) {
        double t = dot(a - ln->point, ln->dir);
        if (std::isfinite(ln->t_min) && t <= ln->t_min + kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(ln->dir) : cone_dirs_3d(ln->dir);
        else if (std::isfinite(ln->t_max) && t >= ln->t_max - kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(-ln->dir) : cone_dirs_3d(-ln->dir);
        else
            dirs = curve_point_normals(ln->dir, ambient_dim);
    } else if (const auto* arc = std::get_if<ArcPrim>(&p.shape)) {
        Vec w = a - arc->center;
        double theta = std::atan2(dot(w, arc->v), dot(w, arc->u));
        Vec radial = normalized(w);
        Vec tangent = -std::sin(theta) * arc->u + std::cos(theta) * arc->v;
        double margin_ang = kEdgeMargin / arc->radius;
        if (!arc->full_circle()) {
            double th = wrap_near(theta, arc->ang0);
            if (th <= arc->ang0 + margin_ang) {
                dirs = ambient_dim == 2 ? cone_dirs_2d(tangent) : cone_dirs_3d(tangent);
            } else if (th >= arc->ang1 - margin_ang) {
                dirs = ambient_dim == 2 ? cone_dirs_2d(-tangent) : cone_dirs_3d(-tangent);
            }
        }
        if (dirs.empty()) {
            if (ambient_dim == 2) {
                dirs = {radial, -radial};
            } else {
                Vec pn = cross(arc->u, arc->v);
                for (int i = 0; i < 16; ++i) {
                    double ang = 2.0 * M_PI * i / 16;
                    dirs.push_back(std::cos(ang) * radial + std::sin(ang) * pn);
                }
            }
        }
    } else if (const auto* sph = std::get_if<SpherePatchPrim>(&p.shape)) {
        if (trims_margin(sph->trims, a) > kEdgeMargin) {
            Vec radial = normalized(a - sph->center);
            dirs = {radial, -radial};
        } else {
            dirs = proximal_cone_sample(p, a, tol, 3);
        }
    } else if (const auto* cyl = std::get_if<CylinderPatchPrim>(&p.shape)) {
        Vec w = a - cyl->axis_point;
        double t = dot(w, cyl->axis_dir);
        Vec radial_v = w - t * cyl->axis_dir;
        double axial_margin = std::min(t - cyl->t_min, cyl->t_max - t);
        double ang_margin = std::numeric_limits<double>::infinity();
        if (!cyl->full_angle()) {
            double th = wrap_near(std::atan2(dot(radial_v, cyl->v), dot(radial_v, cyl->u)), cyl->ang0);
            ang_margin = std::min(th - cyl->ang0, cyl->ang1 - th) * cyl->radius;
        }
        if (axial_margin > kEdgeMargin && ang_margin > kEdgeMargin &&
            trims_margin(cyl->trims, a) > kEdgeMargin) {
            Vec radial = normalized(radial_v);
            dirs = {radial, -radial};
        } else {
            dirs = proximal_cone_sample(p, a, tol, 3);
        }
    } else if (const auto* pl = std::get_if<PlanePatchPrim>(&p.shape)) {
        // interior test: the in-plane foot must clear the polygon boundary
        double pu = dot(a - pl->point, pl->u), pv = dot(a - pl->point, pl->v);
        double edge_dist = std::numeric_limits<double>::infinity();
        size_t n = pl->polygon.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            double ax = pl->polygon[j][0], ay = pl->polygon[j][1];
            double bx = pl->polygon[i][0], by = pl->polygon[i][1];
            double dx = bx - ax, dy = by - ay;
            double tt = std::clamp(((pu - ax) * dx + (pv - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
            edge_dist = std::min(edge_dist, std::hypot(pu - (ax + tt * dx), pv - (ay + tt * dy)));
        }
        if (edge_dist > kEdgeMargin)
            dirs = {pl->normal, -pl->normal};
        else
            dirs = proximal_cone_sample(p, a, tol, 3);
    } else if (const auto* sc = std::get_if<SampledCurvePrim>(&p.shape)) {
        const CubicSpline& spl = *sc->spline;
        // locate the parameter of a
        double best_t = spl.t_begin();
        double best_d = std::numeric_limits<double>::infinity();
        const auto& kn = spl.knots();
        for (size_t i = 0; i < kn.size(); ++i) {
            double d = dist(spl.at(kn[i]), a);
            if (d < best_d) {
                best_d = d;
                best_t = kn[i];
            }
        }
        for (int it = 0; it < 64; ++it) {
            Vec g = spl.at(best_t) - a, d1 = spl.deriv(best_t), d2 = spl.deriv2(best_t);
            double gpp = norm2(d1) + dot(g, d2);
            if (gpp <= 1e-300) break;
            double tn = std::clamp(best_t - dot(g, d1) / gpp, spl.t_begin(), spl.t_end());
            if (std::abs(tn - best_t) < 1e-14) break;
            best_t = tn;
        }
        Vec tangent = normalized(spl.deriv(best_t));
        if (best_t <= spl.t_begin() + kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(tangent) : cone_dirs_3d(tangent);
        else if (best_t >= spl.t_end() - kEdgeMargin)
            dirs = ambient_dim == 2 ? cone_dirs_2d(-tangent) : cone_dirs_3d(-tangent);
        else
            dirs = curve_point_normals(tangent, ambient_dim);
    }

    for (auto& d : dirs) d = normalized(d);
    dedupe_dirs(dirs);
    return dirs;
}

// ---------------------------------------------------------------------------
// Deterministic samples of the primitive inside B(a, eta)

namespace {

std::vector<Vec> sample_param_interval(const std::function<Vec(double)>& pos, double lo, double hi,
                                       const Vec& a, double eta, int budget) {
    std::vector<Vec> out;
    if (!(hi > lo)) {
        Vec q = pos(lo);
        if (dist(q, a) <= eta + 1e-12) out.push_back(q);
        return out;
    }
    int n = std::max(budget, 2);
    for (int i = 0; i < n; ++i) {
        Vec q = pos(lo + (hi - lo) * i / (n - 1));
        if (dist(q, a) <= eta + 1e-12) out.push_back(q);
    }
    return out;
}

}  // namespace

std::vector<Vec> primitive_sample_in_ball(const Primitive& p, const Vec& a, double eta, int budget,
                                          const Tolerances& tol) {
    std::vector<Vec> out;
    if (const auto* ps = std::get_if<PointSetPrim>(&p.shape)) {
        for (const auto& q : ps->points)
            if (dist(q, a) <= eta) out.push_back(q);
    } else if (const auto* sg = std::get_if<SegmentPrim>(&p.shape)) {
        Vec d = sg->b - sg->a;
        double A = norm2(d), B = 2.0 * dot(sg->a - a, d), C = norm2(sg->a - a) - eta * eta;
        double disc = B * B - 4.0 * A * C;
        if (disc >= 0) {
            double r = std::sqrt(disc);
            double lo = std::max(0.0, (-B - r) / (2.0 * A));
            double hi = std::min(1.0, (-B + r) / (2.0 * A));
            if (hi >= lo) {
                auto pos = [&](double t) { return sg->a + t * d; };
                out = sample_param_interval(pos, lo, hi, a, eta, budget);
            }
        }
    } else if (const auto* ln = std::get_if<LinePrim>(&p.shape)) {
        double tm = dot(a - ln->point, ln->dir);
        double h2 = norm2(a - ln->point) - tm * tm;
        if (h2 <= eta * eta) {
            double half = std::sqrt(std::max(0.0, eta * eta - h2));
            double lo = std::max(ln->t_min, tm - half);
            double hi = std::min(ln->t_max, tm + half);
            if (hi >= lo) {
                auto pos = [&](double t) { return ln->point + t * ln->dir; };
                out = sample_param_interval(pos, lo, hi, a, eta, budget);
            }
        }
    } else if (const auto* arc = std::get_if<ArcPrim>(&p.shape)) {
        Vec w = a - arc->center;
        double theta_a = std::atan2(dot(w, arc->v), dot(w, arc->u));
        double cosd = 1.0 - eta * eta / (2.0 * arc->radius * arc->radius);
        double half = cosd <= -1.0 ? M_PI : std::acos(std::clamp(cosd, -1.0, 1.0));
        double lo = theta_a - half, hi = theta_a + half;
        if (!arc->full_circle()) {
            double th = wrap_near(theta_a, arc->ang0);
            lo = std::max(arc->ang0, th - half);
            hi = std::min(arc->ang1, th + half);
        } else if (hi - lo > 2.0 * M_PI) {
            lo = theta_a - M_PI;
            hi = theta_a + M_PI;
        }
        if (hi >= lo) {
            auto pos = [&](double t) { return arc->at(t); };
            out = sample_param_interval(pos, lo, hi, a, eta, budget);
        }
    } else if (const auto* sph = std::get_if<SpherePatchPrim>(&p.shape)) {
        Vec dir_a = normalized(a - sph->center);
        double alpha = 2.0 * std::asin(std::clamp(eta / (2.0 * sph->radius), 0.0, 1.0));
        Vec e1 = any_orthogonal(dir_a), e2 = cross(dir_a, e1);
        int n = std::max(4 * budget, 64);
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        double zmin = std::cos(alpha);
        for (int k = 0; k < n && int(out.size()) < budget; ++k) {
            double zc = 1.0 - (1.0 - zmin) * (2.0 * k + 1.0) / (2.0 * n);
            double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            double t = ga * k;
            Vec u = zc * dir_a + r * (std::cos(t) * e1 + std::sin(t) * e2);
            Vec q = sph->center + sph->radius * u;
            if (dist(q, a) <= eta && trims_contain(sph->trims, q)) out.push_back(q);
        }
    } else if (const auto* cyl = std::get_if<CylinderPatchPrim>(&p.shape)) {
        Vec w = a - cyl->axis_point;
        double ta = dot(w, cyl->axis_dir);
        Vec rv = w - ta * cyl->axis_dir;
        double theta_a = std::atan2(dot(rv, cyl->v), dot(rv, cyl->u));
        double dth = std::min(M_PI, 1.5 * eta / cyl->radius);
        int side = std::max(3, int(std::sqrt(double(budget * 4))));
        for (int i = 0; i < side && int(out.size()) < budget; ++i) {
            double th = theta_a - dth + 2.0 * dth * i / (side - 1);
            if (!cyl->full_angle()) {
                double thw = wrap_near(th, cyl->ang0);
                if (thw > cyl->ang1) continue;
                th = thw;
            }
            for (int j = 0; j < side && int(out.size()) < budget; ++j) {
                double t = std::clamp(ta - eta + 2.0 * eta * j / (side - 1), cyl->t_min, cyl->t_max);
                Vec q = cyl->at(th, t);
                if (dist(q, a) <= eta && trims_contain(cyl->trims, q)) out.push_back(q);
            }
        }
    } else if (const auto* pl = std::get_if<PlanePatchPrim>(&p.shape)) {
        double pu = dot(a - pl->point, pl->u), pv = dot(a - pl->point, pl->v);
        int rings = 6, per = std::max(4, budget / rings);
        for (int i = 1; i <= rings && int(out.size()) < budget; ++i) {
            double r = eta * i / rings;
            for (int j = 0; j < per && int(out.size()) < budget; ++j) {
                double angj = 2.0 * M_PI * j / per;
                double qu = pu + r * std::cos(angj), qv = pv + r * std::sin(angj);
                Vec q = pl->point + qu * pl->u + qv * pl->v;
                NearestResult nr = primitive_nearest(p, q, tol);
                if (nr.distance <= 1e-9 && dist(q, a) <= eta) out.push_back(q);
            }
        }
    } else if (const auto* sc = std::get_if<SampledCurvePrim>(&p.shape)) {
        const CubicSpline& spl = *sc->spline;
        double best_t = spl.t_begin(), best_d = std::numeric_limits<double>::infinity();
        for (double kn : spl.knots()) {
            double d = dist(spl.at(kn), a);
            if (d < best_d) {
                best_d = d;
                best_t = kn;
            }
        }
        double lo = std::max(spl.t_begin(), best_t - 1.5 * eta);
        double hi = std::min(spl.t_end(), best_t + 1.5 * eta);
        auto pos = [&](double t) { return spl.at(t); };
        out = sample_param_interval(pos, lo, hi, a, eta, 4 * budget);
        if (int(out.size()) > budget) {
            std::vector<Vec> thin;
            for (size_t i = 0; i < out.size(); i += out.size() / budget + 1) thin.push_back(out[i]);
            out.swap(thin);
        }
    }
    return out;
}

}  // namespace medialkit
