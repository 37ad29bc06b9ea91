#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "medialkit/core.hpp"

namespace medialkit {

// ---------------------------------------------------------------------------
// Trims carve closed subsets out of a carrier surface. Every trim condition
// is a closed predicate, so a trimmed patch stays closed.

struct Trim {
    enum class Type { Halfspace, OutsideBall, OutsideCylinder, AnyOf };

    Type type = Type::Halfspace;
    Vec normal;                 // Halfspace: dot(x, normal) >= offset
    double offset = 0.0;
    Vec center;                 // OutsideBall: |x - center| >= radius
    Vec axis_point, axis_dir;   // OutsideCylinder: dist(x, axis) >= radius
    double radius = 0.0;
    std::vector<Trim> members;  // AnyOf: union of members

    bool contains(const Vec& p, double slack = 1e-9) const;
    // Signed margin: how far inside the admissible region p sits (negative
    // outside). For AnyOf this is the max over members.
    double margin(const Vec& p) const;
};

bool trims_contain(const std::vector<Trim>& trims, const Vec& p, double slack = 1e-9);
double trims_margin(const std::vector<Trim>& trims, const Vec& p);

// ---------------------------------------------------------------------------
// Primitive shapes

struct PointSetPrim {
    std::vector<Vec> points;
};

struct SegmentPrim {
    Vec a, b;
};

struct LinePrim {
    Vec point;
    Vec dir;  // unit
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
};

// p(theta) = center + radius * (cos(theta) u + sin(theta) v).
// 2D arcs use u = e_x, v = e_y.
struct ArcPrim {
    Vec center;
    double radius = 1.0;
    double ang0 = 0.0, ang1 = 2.0 * M_PI;
    Vec u{1, 0, 0}, v{0, 1, 0};

    bool full_circle() const { return ang1 - ang0 >= 2.0 * M_PI - 1e-12; }
    Vec at(double theta) const {
        return center + radius * (std::cos(theta) * u + std::sin(theta) * v);
    }
};

struct SpherePatchPrim {
    Vec center;
    double radius = 1.0;
    std::vector<Trim> trims;
};

// Wall point w(theta, t) = axis_point + t axis_dir + radius (cos u + sin v).
struct CylinderPatchPrim {
    Vec axis_point;
    Vec axis_dir;  // unit
    double radius = 1.0;
    double ang0 = 0.0, ang1 = 2.0 * M_PI;
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    Vec u, v;  // frame orthogonal to axis_dir
    std::vector<Trim> trims;

    bool full_angle() const { return ang1 - ang0 >= 2.0 * M_PI - 1e-12; }
    Vec at(double theta, double t) const {
        return axis_point + t * axis_dir + radius * (std::cos(theta) * u + std::sin(theta) * v);
    }
};

struct PlanePatchPrim {
    Vec point;
    Vec normal;  // unit
    Vec u, v;    // in-plane frame
    std::vector<std::array<double, 2>> polygon;  // closed polygon in (u,v) coordinates
};

// Natural cubic spline through ordered sample points, chord-length
// parameterised. The interpolant itself is the primitive; projections are
// refined to machine accuracy against it.
class CubicSpline {
  public:
    void build(const std::vector<Vec>& pts);
    Vec at(double t) const;
    Vec deriv(double t) const;
    Vec deriv2(double t) const;
    double t_begin() const { return knots_.front(); }
    double t_end() const { return knots_.back(); }
    int segment_count() const { return int(knots_.size()) - 1; }
    const std::vector<double>& knots() const { return knots_; }

  private:
    std::vector<double> knots_;
    // per segment, per coordinate: cubic coefficients c0 + c1 s + c2 s^2 + c3 s^3
    std::vector<std::array<std::array<double, 4>, 3>> coef_;
    int locate(double t) const;
};

struct SampledCurvePrim {
    std::vector<Vec> points;
    int refine_budget = 64;
    std::shared_ptr<CubicSpline> spline;  // built at parse
};

using PrimitiveShape = std::variant<PointSetPrim, SegmentPrim, LinePrim, ArcPrim,
                                    SpherePatchPrim, CylinderPatchPrim, PlanePatchPrim,
                                    SampledCurvePrim>;

struct NearestResult {
    double distance = 0.0;
    std::vector<Vec> representatives;
    bool continuum = false;  // a full circle/sphere of minimizers was hit
};

struct Primitive {
    PrimitiveShape shape;
    std::string kind_name() const;
};

// ---------------------------------------------------------------------------
// Scene

struct Scene {
    std::string name;
    int ambient_dim = 2;
    std::vector<Primitive> primitives;
};

// Parse a scene description document (JSON text). Unknown keys are rejected.
Scene parse_scene(const std::string& text);

// Resolve "name.scene" against MEDIALKIT_SCENES (or ./scenes) unless the
// argument is already a path to an existing file, then parse it.
Scene load_scene(const std::string& name_or_path);
std::string resolve_scene_path(const std::string& name_or_path);

// ---------------------------------------------------------------------------
// Primitive queries

// Distance from x to the primitive plus a finite sample of the nearest set.
// rep_budget > 0 asks for a denser sample of degenerate (continuum) nearest
// sets; 0 keeps the default spread of ~2pi/0.4 per circle of minimizers.
NearestResult primitive_nearest(const Primitive& p, const Vec& x, const Tolerances& tol,
                                int rep_budget = 0);

// Sampled unit normal directions of the primitive at a point a on it.
// Smooth hypersurface interior: the two antipodal normals. Curves in R3: a
// sampled normal-plane circle. Edges and corners: a sampled normal cone.
std::vector<Vec> primitive_normals(const Primitive& p, const Vec& a, const Tolerances& tol,
                                   int ambient_dim);

// Deterministic sample of the primitive inside the closed ball B(a, eta).
std::vector<Vec> primitive_sample_in_ball(const Primitive& p, const Vec& a, double eta,
                                          int budget, const Tolerances& tol);

inline bool primitive_contains(const Primitive& p, const Vec& a, const Tolerances& tol) {
    return primitive_nearest(p, a, tol).distance <= tol.eps_dist;
}

}  // namespace medialkit
