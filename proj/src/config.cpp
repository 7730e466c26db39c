#include "hitprob/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hitprob/errors.hpp"

namespace hitprob {

namespace {

using nlohmann::json;

const json& expect(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(path + "." + key + ": missing");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ValidationError(path + ": expected an integer");
    return j.get<int>();
}

std::vector<double> as_double_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
    const auto v = as_double_list(j, path);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a row-major matrix");
    const std::size_t rows = j.size();
    const auto first = as_double_list(j[0], path + "[0]");
    Eigen::MatrixXd m(rows, first.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = as_double_list(j[r], path + "[" + std::to_string(r) + "]");
        if (row.size() != first.size()) throw ValidationError(path + ": ragged rows");
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
}

MatrixFunction as_matrix_function(const json& j, const std::string& path, Eigen::Index rows,
                                  Eigen::Index cols) {
    MatrixFunction f = [&] {
        if (j.is_object() && j.contains("constant"))
            return MatrixFunction::constant(as_matrix(j["constant"], path + ".constant"));
        if (j.is_object() && j.contains("times")) {
            const auto times = as_double_list(j["times"], path + ".times");
            const auto& vals = expect(j, "values", path);
            if (!vals.is_array() || vals.size() != times.size())
                throw ValidationError(path + ".values: need one matrix per time");
            std::vector<Eigen::MatrixXd> ms;
            ms.reserve(times.size());
            for (std::size_t i = 0; i < times.size(); ++i)
                ms.push_back(as_matrix(vals[i], path + ".values[" + std::to_string(i) + "]"));
            return MatrixFunction::sampled(times, std::move(ms));
        }
        if (j.is_array()) return MatrixFunction::constant(as_matrix(j, path));
        throw ValidationError(path + ": expected a matrix, {constant: ...} or {times, values}");
    }();
    if (f.rows() != rows || f.cols() != cols)
        throw ValidationError(path + ": expected shape " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    return f;
}

NoiseModel parse_noise(const json& j, const std::string& path) {
    const std::string kind = expect(j, "kind", path).get<std::string>();
    if (kind == "gaussian") {
        return NoiseModel::gaussian(as_vector(expect(j, "mean", path), path + ".mean"),
                                    as_matrix(expect(j, "covariance", path), path + ".covariance"));
    }
    if (kind == "product_1d") {
        const auto& comps = expect(j, "components", path);
        if (!comps.is_array() || comps.empty())
            throw ValidationError(path + ".components: expected a nonempty array");
        std::vector<Univariate> out;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::string cpath = path + ".components[" + std::to_string(i) + "]";
            const std::string ckind = expect(comps[i], "kind", cpath).get<std::string>();
            Univariate u;
            if (ckind == "gaussian") {
                u.kind = Univariate::Kind::Gaussian;
                u.a = as_number(expect(comps[i], "mu", cpath), cpath + ".mu");
                u.b = as_number(expect(comps[i], "sigma", cpath), cpath + ".sigma");
            } else if (ckind == "uniform") {
                u.kind = Univariate::Kind::Uniform;
                u.a = as_number(expect(comps[i], "a", cpath), cpath + ".a");
                u.b = as_number(expect(comps[i], "b", cpath), cpath + ".b");
            } else {
                throw ValidationError(cpath + ".kind: unknown kind '" + ckind + "'");
            }
            out.push_back(u);
        }
        return NoiseModel::product_1d(std::move(out));
    }
    throw ValidationError(path + ".kind: unknown kind '" + kind + "'");
}

GoalSet parse_goal(const json& j, const std::string& path) {
    const std::string kind = expect(j, "kind", path).get<std::string>();
    if (kind == "halfspace")
        return GoalSet::halfspace(as_vector(expect(j, "a", path), path + ".a"),
                                  as_number(expect(j, "b", path), path + ".b"));
    if (kind == "ball")
        return GoalSet::ball(as_vector(expect(j, "center", path), path + ".center"),
                             as_number(expect(j, "radius", path), path + ".radius"));
    if (kind == "box")
        return GoalSet::box(as_vector(expect(j, "lo", path), path + ".lo"),
                            as_vector(expect(j, "hi", path), path + ".hi"));
    if (kind == "disc_in_hyperplane") {
        const int coord = as_int(expect(j, "fixed_coord", path), path + ".fixed_coord");
        return GoalSet::disc_in_hyperplane(
            coord - 1, as_number(expect(j, "fixed_value", path), path + ".fixed_value"),
            as_vector(expect(j, "center", path), path + ".center"),
            as_number(expect(j, "radius", path), path + ".radius"));
    }
    if (kind == "annulus_sector")
        return GoalSet::annulus_sector(as_number(expect(j, "r_lo", path), path + ".r_lo"),
                                       as_number(expect(j, "r_hi", path), path + ".r_hi"));
    if (kind == "lens")
        return GoalSet::lens(as_vector(expect(j, "c1", path), path + ".c1"),
                             as_vector(expect(j, "c2", path), path + ".c2"),
                             as_number(expect(j, "radius", path), path + ".radius"));
    throw ValidationError(path + ".kind: unknown kind '" + kind + "'");
}

ControlSet parse_control_set(const json& j, const std::string& path) {
    const std::string kind = expect(j, "kind", path).get<std::string>();
    if (kind == "box")
        return ControlSet::box(as_vector(expect(j, "lo", path), path + ".lo"),
                               as_vector(expect(j, "hi", path), path + ".hi"));
    if (kind == "ball")
        return ControlSet::ball(as_int(expect(j, "dim", path), path + ".dim"),
                                as_number(expect(j, "radius", path), path + ".radius"));
    if (kind == "finite") {
        const auto& pts = expect(j, "points", path);
        if (!pts.is_array() || pts.empty())
            throw ValidationError(path + ".points: expected a nonempty array");
        std::vector<Eigen::VectorXd> out;
        for (std::size_t i = 0; i < pts.size(); ++i)
            out.push_back(as_vector(pts[i], path + ".points[" + std::to_string(i) + "]"));
        return ControlSet::finite(std::move(out));
    }
    throw ValidationError(path + ".kind: unknown kind '" + kind + "'");
}

}  // namespace

FullConfig parse_config_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    const int version = as_int(expect(j, "spec_version", "config"), "config.spec_version");
    if (version != 1) throw ValidationError("config.spec_version: unsupported version " +
                                            std::to_string(version));

    const auto& sys = expect(j, "system", "config");
    LinearSystem system;
    system.n = as_int(expect(sys, "n", "config.system"), "config.system.n");
    system.m = as_int(expect(sys, "m", "config.system"), "config.system.m");
    if (system.n < 1 || system.m < 1)
        throw ValidationError("config.system: n and m must be positive");
    system.A = as_matrix_function(expect(sys, "A", "config.system"), "config.system.A", system.n, system.n);
    system.B = as_matrix_function(expect(sys, "B", "config.system"), "config.system.B", system.n, system.m);
    system.f = sys.contains("f")
                   ? as_matrix_function(sys["f"], "config.system.f", system.n, 1)
                   : MatrixFunction::constant(Eigen::MatrixXd::Zero(system.n, 1));
    system.x0 = as_vector(expect(sys, "x0", "config.system"), "config.system.x0");
    system.switch_times = as_double_list(expect(sys, "switch_times", "config.system"),
                                         "config.system.switch_times");

    FullConfig cfg{ProblemConfig{std::move(system), parse_noise(expect(j, "noise", "config"), "config.noise"),
                                 parse_goal(expect(j, "goal", "config"), "config.goal"),
                                 parse_control_set(expect(j, "control_set", "config"), "config.control_set"),
                                 64,
                                 {}},
                   McConfig{},
                   OptimizeConfig{}};

    if (j.contains("grid"))
        cfg.problem.steps_per_interval =
            as_int(expect(j["grid"], "steps_per_interval", "config.grid"), "config.grid.steps_per_interval");
    if (j.contains("control_grid"))
        cfg.problem.control_grid = as_double_list(j["control_grid"], "config.control_grid");

    if (j.contains("mc")) {
        const auto& mc = j["mc"];
        if (mc.contains("samples")) cfg.mc.samples = as_int(mc["samples"], "config.mc.samples");
        if (mc.contains("seed")) cfg.mc.seed = static_cast<std::uint64_t>(as_int(mc["seed"], "config.mc.seed"));
        if (mc.contains("antithetic")) {
            if (!mc["antithetic"].is_boolean())
                throw ValidationError("config.mc.antithetic: expected a boolean");
            cfg.mc.antithetic = mc["antithetic"].get<bool>();
        }
    }
    if (j.contains("optimize")) {
        const auto& opt = j["optimize"];
        if (opt.contains("iters")) cfg.opt.iters = as_int(opt["iters"], "config.optimize.iters");
        if (opt.contains("initial_samples"))
            cfg.opt.schedule.initial_samples = as_int(opt["initial_samples"], "config.optimize.initial_samples");
        if (opt.contains("growth"))
            cfg.opt.schedule.growth = as_number(opt["growth"], "config.optimize.growth");
        if (opt.contains("max_samples"))
            cfg.opt.schedule.max_samples = as_int(opt["max_samples"], "config.optimize.max_samples");
        if (opt.contains("residual_tol"))
            cfg.opt.residual_tol = as_number(opt["residual_tol"], "config.optimize.residual_tol");
    }
    return cfg;
}

FullConfig load_config_file(const std::string& path, std::string* raw_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config file '" + path + "': cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    if (raw_bytes) *raw_bytes = bytes;
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "': " + e.what());
    }
    return parse_config_json(j);
}

Control parse_control_json(const json& j, const ControlSet& fallback) {
    const auto grid = as_double_list(expect(j, "grid", "control"), "control.grid");
    const auto& vals = expect(j, "values", "control");
    if (!vals.is_array()) throw ValidationError("control.values: expected an array");
    std::vector<Eigen::VectorXd> values;
    values.reserve(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
        values.push_back(as_vector(vals[i], "control.values[" + std::to_string(i) + "]"));
    const ControlSet cs =
        j.contains("constraint") ? parse_control_set(j["constraint"], "control.constraint") : fallback;
    return Control(grid, std::move(values), cs);
}

Control load_control_file(const std::string& path, const ControlSet& fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("control file '" + path + "': cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("control file '" + path + "': " + e.what());
    }
    return parse_control_json(j, fallback);
}

nlohmann::ordered_json control_to_json(const Control& control) {
    nlohmann::ordered_json j;
    j["grid"] = control.grid();
    auto vals = nlohmann::ordered_json::array();
    for (const auto& v : control.values()) vals.push_back(vector_to_json(v));
    j["values"] = std::move(vals);
    switch (control.constraint().kind()) {
        case ControlSet::Kind::Box:
            j["constraint"] = {{"kind", "box"},
                               {"lo", vector_to_json(control.constraint().lo())},
                               {"hi", vector_to_json(control.constraint().hi())}};
            break;
        case ControlSet::Kind::Ball:
            j["constraint"] = {{"kind", "ball"},
                               {"dim", control.constraint().dimension()},
                               {"radius", control.constraint().radius()}};
            break;
        case ControlSet::Kind::Finite: {
            auto pts = nlohmann::ordered_json::array();
            for (const auto& p : control.constraint().points()) pts.push_back(vector_to_json(p));
            j["constraint"] = {{"kind", "finite"}, {"points", std::move(pts)}};
            break;
        }
    }
    return j;
}

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fnv1a_digest(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return std::string(out);
}

}  // namespace hitprob
