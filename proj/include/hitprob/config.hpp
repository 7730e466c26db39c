#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "hitprob/functional.hpp"
#include "hitprob/pmp.hpp"
#include "hitprob/problem.hpp"

namespace hitprob {

struct OptimizeConfig {
    int iters = 30;
    McSchedule schedule;
    double residual_tol = 0.0;
};

/// Everything a run needs, parsed from one config document.
struct FullConfig {
    ProblemConfig problem;
    McConfig mc;
    OptimizeConfig opt;
};

/// Parses and validates a config document (spec_version 1). Errors name the
/// offending field path.
FullConfig parse_config_json(const nlohmann::json& j);

/// Reads a config file; raw_bytes (optional) receives the file content for
/// digesting.
FullConfig load_config_file(const std::string& path, std::string* raw_bytes = nullptr);

/// Control files: {"grid": [...], "values": [[...], ...], "constraint": {...}}.
/// A missing constraint falls back to the problem's control set.
Control parse_control_json(const nlohmann::json& j, const ControlSet& fallback);
Control load_control_file(const std::string& path, const ControlSet& fallback);
nlohmann::ordered_json control_to_json(const Control& control);

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v);
nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a_digest(std::string_view bytes);

}  // namespace hitprob
