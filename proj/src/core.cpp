#include "medialkit/core.hpp"

#include <cstdio>

namespace medialkit {

std::string to_string(const Vec& v, int dim) {
    char buf[96];
    if (dim == 2)
        std::snprintf(buf, sizeof buf, "(%.10g, %.10g)", v.x, v.y);
    else
        std::snprintf(buf, sizeof buf, "(%.10g, %.10g, %.10g)", v.x, v.y, v.z);
    return buf;
}

void Tolerances::validate() const {
    if (!(eps_dist > 0 && eps_cluster > 0 && eps_unit > 0 && sep_tol > 0 && t_max > 0))
        throw ValidationError("tolerances must be strictly positive");
    if (!(eps_dist < eps_cluster && eps_cluster < sep_tol && sep_tol < t_max))
        throw ValidationError("tolerance chain eps_dist < eps_cluster < sep_tol < t_max violated");
}

Tolerances default_tolerances() {
    Tolerances t;
    t.validate();
    return t;
}

std::vector<Vec> circle_directions(int n) {
    std::vector<Vec> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        double a = 2.0 * M_PI * k / n;
        out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
}

std::vector<Vec> fibonacci_sphere(int n) {
    std::vector<Vec> out;
    out.reserve(n);
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        double zc = 1.0 - (2.0 * k + 1.0) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        double t = ga * k;
        out.push_back({r * std::cos(t), r * std::sin(t), zc});
    }
    return out;
}

}  // namespace medialkit
