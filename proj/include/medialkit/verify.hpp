#pragma once

#include "medialkit/report.hpp"

namespace medialkit {

// Named verification suites exposed through the CLI. Each runs the golden
// scene assertions of its owning module and reports per-assertion outcomes.
std::vector<Report> run_suite(const std::string& name, const Tolerances& tol);
std::vector<std::string> suite_names();

}  // namespace medialkit
