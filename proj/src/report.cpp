#include "medialkit/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace medialkit {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(const Vec& v, int dim) { return to_string(v, dim); }

std::string fmt_radius(double r, const Tolerances& tol) {
    return is_unbounded(r, tol) ? "unbounded" : fmt(r);
}

void Report::check(const std::string& name, double expected, double actual, double tolerance) {
    Assertion a;
    a.name = name;
    a.expected = fmt(expected);
    a.actual = fmt(actual);
    a.tolerance = tolerance;
    a.pass = std::abs(expected - actual) <= tolerance;
    assertions.push_back(a);
}

void Report::check_true(const std::string& name, bool ok, const std::string& detail) {
    Assertion a;
    a.name = name;
    a.expected = "true";
    a.actual = ok ? "true" : (detail.empty() ? "false" : "false (" + detail + ")");
    a.tolerance = 0.0;
    a.pass = ok;
    assertions.push_back(a);
}

bool Report::all_pass() const {
    for (const auto& a : assertions)
        if (!a.pass) return false;
    return true;
}

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["scene"] = scene;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    j["parameters"] = params;
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [k, v] : results) res[k] = v;
    j["results"] = res;
    j["assertions"] = nlohmann::ordered_json::array();
    for (const auto& a : assertions) {
        nlohmann::ordered_json ja;
        ja["name"] = a.name;
        ja["expected"] = a.expected;
        ja["actual"] = a.actual;
        ja["tolerance"] = fmt(a.tolerance);
        ja["pass"] = a.pass;
        j["assertions"].push_back(ja);
    }
    j["pass"] = all_pass();
    return j.dump(2) + "\n";
}

std::string medial_cloud_csv(const MedialCloud& cloud, int dim) {
    std::ostringstream out;
    out << (dim == 2 ? "x,y" : "x,y,z") << ",distance,multiplicity,diameter,refined\n";
    for (const auto& m : cloud.samples) {
        out << fmt(m.point.x) << ',' << fmt(m.point.y);
        if (dim == 3) out << ',' << fmt(m.point.z);
        out << ',' << fmt(m.distance) << ',' << m.multiplicity << ',' << fmt(m.diameter) << ','
            << (m.refined ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string spherical_cloud_csv(const SphericalCloud& cloud, int dim) {
    std::ostringstream out;
    out << (dim == 2 ? "ux,uy" : "ux,uy,uz") << ",scales\n";
    for (size_t i = 0; i < cloud.directions.size(); ++i) {
        const Vec& u = cloud.directions[i];
        out << fmt(u.x) << ',' << fmt(u.y);
        if (dim == 3) out << ',' << fmt(u.z);
        out << ',';
        for (size_t k = 0; k < cloud.scale_tags[i].size(); ++k) {
            if (k) out << ';';
            out << fmt(cloud.scale_tags[i][k]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace medialkit
