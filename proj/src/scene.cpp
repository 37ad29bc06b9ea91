#include "medialkit/scene.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace medialkit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Trims

static double axis_distance(const Vec& p, const Vec& axis_point, const Vec& axis_dir) {
    Vec w = p - axis_point;
    Vec radial = w - dot(w, axis_dir) * axis_dir;
    return norm(radial);
}

bool Trim::contains(const Vec& p, double slack) const {
    return margin(p) >= -slack;
}

double Trim::margin(const Vec& p) const {
    switch (type) {
        case Type::Halfspace:
            return dot(p, normal) - offset;
        case Type::OutsideBall:
            return dist(p, center) - radius;
        case Type::OutsideCylinder:
            return axis_distance(p, axis_point, axis_dir) - radius;
        case Type::AnyOf: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& m : members) best = std::max(best, m.margin(p));
            return best;
        }
    }
    return 0.0;
}

bool trims_contain(const std::vector<Trim>& trims, const Vec& p, double slack) {
    for (const auto& t : trims)
        if (!t.contains(p, slack)) return false;
    return true;
}

double trims_margin(const std::vector<Trim>& trims, const Vec& p) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : trims) m = std::min(m, t.margin(p));
    return m;
}

// ---------------------------------------------------------------------------
// CubicSpline (natural, chord-length parameterised)

void CubicSpline::build(const std::vector<Vec>& pts) {
    const int n = int(pts.size());
    knots_.assign(n, 0.0);
    for (int i = 1; i < n; ++i) knots_[i] = knots_[i - 1] + dist(pts[i], pts[i - 1]);

    // second derivatives per coordinate, natural boundary conditions
    std::vector<std::array<double, 3>> m(n, {0, 0, 0});
    if (n > 2) {
        std::vector<double> aa(n), bb(n), cc(n);
        std::vector<std::array<double, 3>> dd(n, {0, 0, 0});
        for (int i = 1; i + 1 < n; ++i) {
            double h0 = knots_[i] - knots_[i - 1];
            double h1 = knots_[i + 1] - knots_[i];
            aa[i] = h0 / 6.0;
            bb[i] = (h0 + h1) / 3.0;
            cc[i] = h1 / 6.0;
            for (int c = 0; c < 3; ++c)
                dd[i][c] = (pts[i + 1][c] - pts[i][c]) / h1 - (pts[i][c] - pts[i - 1][c]) / h0;
        }
        // Thomas sweep over rows 1..n-2
        for (int i = 2; i + 1 < n; ++i) {
            double w = aa[i] / bb[i - 1];
            bb[i] -= w * cc[i - 1];
            for (int c = 0; c < 3; ++c) dd[i][c] -= w * dd[i - 1][c];
        }
        for (int i = n - 2; i >= 1; --i) {
            for (int c = 0; c < 3; ++c) {
                double v = dd[i][c] - (i + 1 < n - 1 ? cc[i] * m[i + 1][c] : 0.0);
                m[i][c] = v / bb[i];
            }
        }
    }

    coef_.assign(std::max(1, n - 1), {});
    for (int i = 0; i + 1 < n; ++i) {
        double h = knots_[i + 1] - knots_[i];
        for (int c = 0; c < 3; ++c) {
            double y0 = pts[i][c], y1 = pts[i + 1][c];
            double m0 = m[i][c], m1 = m[i + 1][c];
            // y(s) over s in [0, h]
            coef_[i][c][0] = y0;
            coef_[i][c][1] = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
            coef_[i][c][2] = m0 / 2.0;
            coef_[i][c][3] = (m1 - m0) / (6.0 * h);
        }
    }
}

int CubicSpline::locate(double t) const {
    int n = int(knots_.size());
    if (t <= knots_.front()) return 0;
    if (t >= knots_.back()) return n - 2;
    int i = int(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin()) - 1;
    return std::clamp(i, 0, n - 2);
}

Vec CubicSpline::at(double t) const {
    int i = locate(t);
    double s = t - knots_[i];
    Vec out;
    for (int c = 0; c < 3; ++c) {
        const auto& k = coef_[i][c];
        out[c] = k[0] + s * (k[1] + s * (k[2] + s * k[3]));
    }
    return out;
}

Vec CubicSpline::deriv(double t) const {
    int i = locate(t);
    double s = t - knots_[i];
    Vec out;
    for (int c = 0; c < 3; ++c) {
        const auto& k = coef_[i][c];
        out[c] = k[1] + s * (2.0 * k[2] + 3.0 * s * k[3]);
    }
    return out;
}

Vec CubicSpline::deriv2(double t) const {
    int i = locate(t);
    double s = t - knots_[i];
    Vec out;
    for (int c = 0; c < 3; ++c) {
        const auto& k = coef_[i][c];
        out[c] = 2.0 * k[2] + 6.0 * s * k[3];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

std::string Primitive::kind_name() const {
    struct V {
        std::string operator()(const PointSetPrim&) const { return "point_set"; }
        std::string operator()(const SegmentPrim&) const { return "segment"; }
        std::string operator()(const LinePrim&) const { return "line"; }
        std::string operator()(const ArcPrim&) const { return "arc"; }
        std::string operator()(const SpherePatchPrim&) const { return "sphere_patch"; }
        std::string operator()(const CylinderPatchPrim&) const { return "cylinder_patch"; }
        std::string operator()(const PlanePatchPrim&) const { return "plane_patch"; }
        std::string operator()(const SampledCurvePrim&) const { return "sampled_curve"; }
    };
    return std::visit(V{}, shape);
}

namespace {

void require_keys(const json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* k : required)
        if (!j.contains(k)) throw ParseError(where + ": missing key '" + k + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        bool known = false;
        for (const char* r : required) known = known || k == r;
        for (const char* o : optional) known = known || k == o;
        if (!known) throw ParseError(where + ": unknown key '" + k + "'");
    }
}

Vec parse_vec(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || int(j.size()) != dim)
        throw ParseError(where + ": expected an array of " + std::to_string(dim) + " numbers");
    Vec v;
    for (int i = 0; i < dim; ++i) {
        if (!j[i].is_number()) throw ParseError(where + ": coordinate is not a number");
        v[i] = j[i].get<double>();
    }
    if (!is_finite(v)) throw ValidationError(where + ": coordinates must be finite");
    return v;
}

double parse_positive(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    double v = j.get<double>();
    if (!(v > 0.0)) throw ValidationError(where + ": must be positive");
    return v;
}

Trim parse_trim(const json& j, int dim, const std::string& where);

std::vector<Trim> parse_trims(const json& j, int dim, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": trims must be an array");
    std::vector<Trim> out;
    for (const auto& t : j) out.push_back(parse_trim(t, dim, where));
    return out;
}

Trim parse_trim(const json& j, int dim, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) throw ParseError(where + ": malformed trim");
    std::string ty = j.at("type").get<std::string>();
    Trim t;
    if (ty == "halfspace") {
        require_keys(j, {"type", "normal", "offset"}, {}, where + "/halfspace");
        t.type = Trim::Type::Halfspace;
        Vec n = parse_vec(j.at("normal"), dim, where);
        double len = norm(n);
        if (len <= 0) throw ValidationError(where + ": zero halfspace normal");
        t.normal = n / len;
        t.offset = j.at("offset").get<double>() / len;
    } else if (ty == "outside_ball") {
        require_keys(j, {"type", "center", "radius"}, {}, where + "/outside_ball");
        t.type = Trim::Type::OutsideBall;
        t.center = parse_vec(j.at("center"), dim, where);
        t.radius = parse_positive(j.at("radius"), where + "/outside_ball radius");
    } else if (ty == "outside_cylinder") {
        require_keys(j, {"type", "axis_point", "axis_dir", "radius"}, {}, where + "/outside_cylinder");
        t.type = Trim::Type::OutsideCylinder;
        t.axis_point = parse_vec(j.at("axis_point"), dim, where);
        t.axis_dir = normalized(parse_vec(j.at("axis_dir"), dim, where));
        t.radius = parse_positive(j.at("radius"), where + "/outside_cylinder radius");
    } else if (ty == "any_of") {
        require_keys(j, {"type", "of"}, {}, where + "/any_of");
        t.type = Trim::Type::AnyOf;
        t.members = parse_trims(j.at("of"), dim, where);
        if (t.members.empty()) throw ValidationError(where + ": any_of needs members");
    } else {
        throw ParseError(where + ": unknown trim type '" + ty + "'");
    }
    return t;
}

std::pair<double, double> parse_range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ParseError(where + ": range must be [lo, hi]");
    double lo = j[0].is_null() ? -std::numeric_limits<double>::infinity() : j[0].get<double>();
    double hi = j[1].is_null() ? std::numeric_limits<double>::infinity() : j[1].get<double>();
    if (!(lo < hi)) throw ValidationError(where + ": range lo must be < hi");
    return {lo, hi};
}

Primitive parse_primitive(const json& j, int dim, int index) {
    std::string where = "primitive[" + std::to_string(index) + "]";
    if (!j.is_object() || !j.contains("kind")) throw ParseError(where + ": missing kind");
    std::string kind = j.at("kind").get<std::string>();
    Primitive prim;

    if (kind == "point_set") {
        require_keys(j, {"kind", "points"}, {}, where);
        PointSetPrim p;
        for (const auto& q : j.at("points")) p.points.push_back(parse_vec(q, dim, where));
        if (p.points.empty()) throw ValidationError(where + ": point_set needs points");
        prim.shape = p;
    } else if (kind == "segment") {
        require_keys(j, {"kind", "a", "b"}, {}, where);
        SegmentPrim p{parse_vec(j.at("a"), dim, where), parse_vec(j.at("b"), dim, where)};
        if (dist(p.a, p.b) <= 0) throw ValidationError(where + ": degenerate segment");
        prim.shape = p;
    } else if (kind == "line") {
        require_keys(j, {"kind", "point", "dir"}, {"range"}, where);
        LinePrim p;
        p.point = parse_vec(j.at("point"), dim, where);
        p.dir = normalized(parse_vec(j.at("dir"), dim, where));
        if (j.contains("range")) std::tie(p.t_min, p.t_max) = parse_range(j.at("range"), where);
        prim.shape = p;
    } else if (kind == "arc") {
        require_keys(j, {"kind", "center", "radius"}, {"angle_range", "axis_u", "axis_v"}, where);
        ArcPrim p;
        p.center = parse_vec(j.at("center"), dim, where);
        p.radius = parse_positive(j.at("radius"), where + " radius");
        if (j.contains("angle_range")) {
            auto r = parse_range(j.at("angle_range"), where);
            p.ang0 = r.first;
            p.ang1 = r.second;
            if (p.ang1 - p.ang0 > 2.0 * M_PI + 1e-9)
                throw ValidationError(where + ": angle range exceeds a full turn");
        }
        if (dim == 3) {
            if (!j.contains("axis_u") || !j.contains("axis_v"))
                throw ParseError(where + ": 3D arcs need axis_u and axis_v");
            p.u = normalized(parse_vec(j.at("axis_u"), 3, where));
            p.v = normalized(parse_vec(j.at("axis_v"), 3, where));
            if (std::abs(dot(p.u, p.v)) > 1e-9)
                throw ValidationError(where + ": arc frame must be orthogonal");
        } else {
            if (j.contains("axis_u") || j.contains("axis_v"))
                throw ParseError(where + ": axis frame is only for 3D arcs");
        }
        prim.shape = p;
    } else if (kind == "sphere_patch") {
        if (dim != 3) throw ValidationError(where + ": sphere_patch needs a 3D scene");
        require_keys(j, {"kind", "center", "radius"}, {"trims"}, where);
        SpherePatchPrim p;
        p.center = parse_vec(j.at("center"), 3, where);
        p.radius = parse_positive(j.at("radius"), where + " radius");
        if (j.contains("trims")) p.trims = parse_trims(j.at("trims"), 3, where);
        prim.shape = p;
    } else if (kind == "cylinder_patch") {
        if (dim != 3) throw ValidationError(where + ": cylinder_patch needs a 3D scene");
        require_keys(j, {"kind", "axis_point", "axis_dir", "radius"},
                     {"angle_range", "axial_range", "trims"}, where);
        CylinderPatchPrim p;
        p.axis_point = parse_vec(j.at("axis_point"), 3, where);
        p.axis_dir = normalized(parse_vec(j.at("axis_dir"), 3, where));
        p.radius = parse_positive(j.at("radius"), where + " radius");
        if (j.contains("angle_range")) {
            auto r = parse_range(j.at("angle_range"), where);
            p.ang0 = r.first;
            p.ang1 = r.second;
            if (p.ang1 - p.ang0 > 2.0 * M_PI + 1e-9)
                throw ValidationError(where + ": angle range exceeds a full turn");
        }
        if (j.contains("axial_range")) std::tie(p.t_min, p.t_max) = parse_range(j.at("axial_range"), where);
        p.u = any_orthogonal(p.axis_dir);
        p.v = cross(p.axis_dir, p.u);
        if (j.contains("trims")) p.trims = parse_trims(j.at("trims"), 3, where);
        prim.shape = p;
    } else if (kind == "plane_patch") {
        if (dim != 3) throw ValidationError(where + ": plane_patch needs a 3D scene");
        require_keys(j, {"kind", "point", "normal", "polygon"}, {}, where);
        PlanePatchPrim p;
        p.point = parse_vec(j.at("point"), 3, where);
        p.normal = normalized(parse_vec(j.at("normal"), 3, where));
        p.u = any_orthogonal(p.normal);
        p.v = cross(p.normal, p.u);
        for (const auto& q : j.at("polygon")) {
            Vec w = parse_vec(q, 3, where);
            if (std::abs(dot(w - p.point, p.normal)) > 1e-9)
                throw ValidationError(where + ": polygon vertex off the plane");
            p.polygon.push_back({dot(w - p.point, p.u), dot(w - p.point, p.v)});
        }
        if (p.polygon.size() < 3) throw ValidationError(where + ": polygon needs >= 3 vertices");
        prim.shape = p;
    } else if (kind == "sampled_curve") {
        require_keys(j, {"kind", "points"}, {"refine_budget"}, where);
        SampledCurvePrim p;
        for (const auto& q : j.at("points")) p.points.push_back(parse_vec(q, dim, where));
        int distinct = 0;
        for (size_t i = 0; i < p.points.size(); ++i)
            if (i == 0 || dist(p.points[i], p.points[i - 1]) > 0) ++distinct;
        if (distinct < 2) throw ValidationError(where + ": sampled_curve needs >= 2 distinct points");
        if (j.contains("refine_budget")) {
            p.refine_budget = j.at("refine_budget").get<int>();
            if (p.refine_budget <= 0) throw ValidationError(where + ": refine_budget must be positive");
        }
        p.spline = std::make_shared<CubicSpline>();
        p.spline->build(p.points);
        prim.shape = p;
    } else {
        throw ParseError(where + ": unknown kind '" + kind + "'");
    }
    return prim;
}

}  // namespace

Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scene document must be a JSON object");
    require_keys(j, {"name", "dim", "primitives"}, {}, "scene");
    Scene s;
    s.name = j.at("name").get<std::string>();
    if (!j.at("dim").is_number_integer()) throw ParseError("scene dim must be an integer");
    s.ambient_dim = j.at("dim").get<int>();
    if (s.ambient_dim != 2 && s.ambient_dim != 3)
        throw ValidationError("ambient dimension must be 2 or 3");
    const auto& prims = j.at("primitives");
    if (!prims.is_array() || prims.empty())
        throw ValidationError("scene needs a nonempty primitive list");
    int idx = 0;
    for (const auto& p : prims) s.primitives.push_back(parse_primitive(p, s.ambient_dim, idx++));
    return s;
}

std::string resolve_scene_path(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::exists(name_or_path)) return name_or_path;
    std::string dir = "scenes";
    if (const char* env = std::getenv("MEDIALKIT_SCENES")) dir = env;
    std::string base = name_or_path;
    if (base.find(".scene") == std::string::npos) base += ".scene";
    fs::path candidate = fs::path(dir) / base;
    if (fs::exists(candidate)) return candidate.string();
    throw ParseError("scene not found: " + name_or_path + " (looked in '" + dir + "')");
}

Scene load_scene(const std::string& name_or_path) {
    std::ifstream in(resolve_scene_path(name_or_path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

}  // namespace medialkit
