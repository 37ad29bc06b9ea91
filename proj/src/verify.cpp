#include "medialkit/verify.hpp"

namespace medialkit {

std::vector<std::string> suite_names() {
    return {"mises", "gamma", "stozek", "plane-case", "dimension", "offset", "miurat", "denkowski"};
}

std::vector<Report> run_suite(const std::string& name, const Tolerances& tol) {
    (void)name;
    (void)tol;
    return {};
}

}  // namespace medialkit
