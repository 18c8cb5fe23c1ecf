#include "cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "sensireach/errors.hpp"

namespace sensireach::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: key '" + key + "' " + why);
}

const json& require_key(const json& obj, const std::string& key,
                        const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw std::invalid_argument("config: missing required key '" + where +
                                    "'");
    }
    return obj.at(key);
}

double as_double(const json& value, const std::string& where) {
    if (!value.is_number()) {
        fail_key(where, "must be a number");
    }
    return value.get<double>();
}

int as_int(const json& value, const std::string& where) {
    if (!value.is_number_integer()) {
        fail_key(where, "must be an integer");
    }
    return value.get<int>();
}

std::uint64_t as_seed(const json& value, const std::string& where) {
    if (!value.is_number_integer() || value.is_number_float()) {
        fail_key(where, "must be an integer");
    }
    if (value.is_number_unsigned()) {
        return value.get<std::uint64_t>();
    }
    const auto signed_value = value.get<std::int64_t>();
    if (signed_value < 0) {
        fail_key(where, "must be >= 0");
    }
    return static_cast<std::uint64_t>(signed_value);
}

std::string as_string(const json& value, const std::string& where) {
    if (!value.is_string()) {
        fail_key(where, "must be a string");
    }
    return value.get<std::string>();
}

IntervalMatrix parse_x0(const json& value) {
    if (!value.is_array() || value.empty()) {
        fail_key("x0", "must be a non-empty array of [lo, hi] pairs");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(value.size());
    Eigen::VectorXd lo(n), hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& pair = value.at(i);
        const std::string where = "x0[" + std::to_string(i) + "]";
        if (!pair.is_array() || pair.size() != 2) {
            fail_key(where, "must be a [lo, hi] pair");
        }
        lo(i) = as_double(pair.at(0), where + "[0]");
        hi(i) = as_double(pair.at(1), where + "[1]");
        if (!(lo(i) <= hi(i))) {
            fail_key(where, "must satisfy lo <= hi");
        }
    }
    return IntervalMatrix(lo, hi);
}

void parse_integrator(const json& value, IntegratorConfig* out) {
    if (!value.is_object()) {
        fail_key("integrator", "must be an object");
    }
    if (value.contains("method")) {
        const std::string method = as_string(value.at("method"), "integrator.method");
        if (method == "rk4") {
            out->method = IntegratorMethod::rk4;
        } else if (method == "rk45") {
            out->method = IntegratorMethod::rk45;
        } else {
            fail_key("integrator.method", "must be \"rk4\" or \"rk45\"");
        }
    }
    if (value.contains("steps")) {
        out->steps = as_int(value.at("steps"), "integrator.steps");
        if (out->steps < 1) {
            fail_key("integrator.steps", "must be >= 1");
        }
    }
    if (value.contains("rel_tol")) {
        out->rel_tol = as_double(value.at("rel_tol"), "integrator.rel_tol");
        if (!(out->rel_tol > 0)) {
            fail_key("integrator.rel_tol", "must be > 0");
        }
    }
    if (value.contains("abs_tol")) {
        out->abs_tol = as_double(value.at("abs_tol"), "integrator.abs_tol");
        if (!(out->abs_tol > 0)) {
            fail_key("integrator.abs_tol", "must be > 0");
        }
    }
}

bool known_method(const std::string& method) {
    return method == "algorithm1" || method == "ia_only" ||
           method == "sampling_falsification" || method == "all";
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + path + "'");
    }
    const json root = json::parse(in);
    if (!root.is_object()) {
        throw std::invalid_argument("config: top level must be an object");
    }

    RunConfig cfg;
    cfg.config_dir = fs::path(path).parent_path().string();

    if (root.contains("schema_version")) {
        const int version = as_int(root.at("schema_version"), "schema_version");
        if (version != 1) {
            fail_key("schema_version",
                     "has unsupported value " + std::to_string(version));
        }
    }

    const json& model = require_key(root, "model", "model");
    cfg.model_name = as_string(require_key(model, "name", "model.name"),
                               "model.name");
    if (model.contains("params")) {
        const json& params = model.at("params");
        if (!params.is_object()) {
            fail_key("model.params", "must be an object");
        }
        for (const auto& [key, value] : params.items()) {
            cfg.params[key] = as_double(value, "model.params." + key);
        }
    }

    cfg.t0 = as_double(require_key(root, "t0", "t0"), "t0");
    cfg.tf = as_double(require_key(root, "tf", "tf"), "tf");
    if (!(cfg.tf >= cfg.t0)) {
        fail_key("tf", "must be >= t0");
    }
    cfg.x0 = parse_x0(require_key(root, "x0", "x0"));

    cfg.method = as_string(require_key(root, "method", "method"), "method");
    if (!known_method(cfg.method)) {
        fail_key("method",
                 "must be one of algorithm1, ia_only, sampling_falsification, all");
    }

    if (root.contains("grid")) {
        cfg.per_dim = as_int(require_key(root.at("grid"), "per_dim", "grid.per_dim"),
                             "grid.per_dim");
        if (cfg.per_dim < 1) {
            fail_key("grid.per_dim", "must be >= 1");
        }
    }
    if (root.contains("grid_levels")) {
        const json& levels = root.at("grid_levels");
        if (!levels.is_array() || levels.empty()) {
            fail_key("grid_levels", "must be a non-empty array of integers");
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const int level = as_int(levels.at(i),
                                     "grid_levels[" + std::to_string(i) + "]");
            if (level < 1) {
                fail_key("grid_levels[" + std::to_string(i) + "]", "must be >= 1");
            }
            cfg.grid_levels.push_back(level);
        }
    }
    if (root.contains("taylor_order")) {
        cfg.taylor_order = as_int(root.at("taylor_order"), "taylor_order");
        if (cfg.taylor_order < 0) {
            fail_key("taylor_order", "must be >= 0 (0 = automatic)");
        }
    }
    if (root.contains("integrator")) {
        parse_integrator(root.at("integrator"), &cfg.integrator);
    }
    if (root.contains("falsification")) {
        cfg.sf_max_iters =
            as_int(require_key(root.at("falsification"), "max_iters",
                               "falsification.max_iters"),
                   "falsification.max_iters");
        if (cfg.sf_max_iters < 0) {
            fail_key("falsification.max_iters", "must be >= 0");
        }
    }
    if (root.contains("monte_carlo")) {
        const json& mc = root.at("monte_carlo");
        cfg.mc_count = as_int(require_key(mc, "count", "monte_carlo.count"),
                              "monte_carlo.count");
        if (cfg.mc_count < 0) {
            fail_key("monte_carlo.count", "must be >= 0");
        }
        if (mc.contains("seed")) {
            cfg.mc_seed = as_seed(mc.at("seed"), "monte_carlo.seed");
        }
    }
    if (root.contains("output_dir")) {
        cfg.output_dir = as_string(root.at("output_dir"), "output_dir");
    }
    if (root.contains("result_file")) {
        cfg.result_file = as_string(root.at("result_file"), "result_file");
    }
    return cfg;
}

namespace {

ReachProblem make_problem(const RunConfig& cfg, const CliOptions& options) {
    ReachProblem problem;
    problem.model = make_model(cfg.model_name, cfg.params);
    if (problem.model.n != cfg.x0.rows()) {
        throw std::invalid_argument(
            "config: 'x0' has " + std::to_string(cfg.x0.rows()) +
            " entries but model '" + cfg.model_name + "' has dimension " +
            std::to_string(problem.model.n));
    }
    problem.t0 = cfg.t0;
    problem.tf = cfg.tf;
    problem.x0 = cfg.x0;
    problem.per_dim = cfg.per_dim;
    problem.taylor_order = cfg.taylor_order;
    problem.integrator = cfg.integrator;
    problem.threads = options.threads;
    return problem;
}

fs::path resolve_out_dir(const RunConfig& cfg, const CliOptions& options) {
    const fs::path out =
        options.out_dir_set ? fs::path(options.out_dir) : fs::path(cfg.output_dir);
    fs::create_directories(out);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

// Shortest round-trip decimal form, identical across runs.
std::string num(double value) { return json(value).dump(); }

json interval_vector_json(const IntervalMatrix& v) {
    json lo = json::array();
    json hi = json::array();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        lo.push_back(v.lo()(i, 0));
        hi.push_back(v.hi()(i, 0));
    }
    return json{{"lo", lo}, {"hi", hi}};
}

json matrix_json(const IntervalMatrix& m) {
    json lo = json::array();
    json hi = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json lo_row = json::array();
        json hi_row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            lo_row.push_back(m.lo()(i, j));
            hi_row.push_back(m.hi()(i, j));
        }
        lo.push_back(lo_row);
        hi.push_back(hi_row);
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"lo", lo}, {"hi", hi}};
}

json mc_json(const McReport& report, std::uint64_t seed) {
    json per_dim = json::array();
    for (Eigen::Index i = 0; i < report.worst_violation_per_dim.size(); ++i) {
        per_dim.push_back(report.worst_violation_per_dim(i));
    }
    return json{{"samples", report.samples},
                {"seed", seed},
                {"violations", report.violations},
                {"fraction_contained", report.fraction_contained},
                {"worst_violation", report.worst_violation},
                {"worst_violation_per_dim", per_dim}};
}

json result_json(const RunConfig& cfg, const ReachResult& result) {
    json j;
    j["schema_version"] = 1;
    j["model"] = cfg.model_name;
    j["method"] = method_name(result.method);
    j["guaranteed"] = result.guaranteed;
    j["t0"] = cfg.t0;
    j["tf"] = cfg.tf;
    if (result.taylor_order > 0) {
        j["taylor_order"] = result.taylor_order;
    }
    if (result.per_dim > 0) {
        j["grid_per_dim"] = result.per_dim;
        j["dispersion"] = result.dispersion;
    }
    j["x0"] = interval_vector_json(cfg.x0);
    j["over_approx"] = interval_vector_json(result.reach_box);
    json widths = json::array();
    for (Eigen::Index i = 0; i < result.reach_box.rows(); ++i) {
        widths.push_back(result.reach_box.width()(i, 0));
    }
    j["widths"] = widths;
    json bundle;
    if (!result.bundle.sx_tube.empty()) {
        bundle["sx_tube"] = matrix_json(result.bundle.sx_tube);
    }
    if (!result.bundle.sxx_set.empty()) {
        bundle["sxx_set"] = matrix_json(result.bundle.sxx_set);
    }
    if (!result.bundle.sx_set.empty()) {
        bundle["sx_set"] = matrix_json(result.bundle.sx_set);
    }
    if (!bundle.empty()) {
        j["bundle"] = bundle;
    }
    return j;
}

// Rectangle in the first two dimensions (closed polyline), or the bare
// interval for scalar models; one point per line for direct plotting.
void write_box_csv(const fs::path& path, const IntervalMatrix& box) {
    std::string text;
    if (box.rows() >= 2) {
        const double lo0 = box.lo()(0, 0), hi0 = box.hi()(0, 0);
        const double lo1 = box.lo()(1, 0), hi1 = box.hi()(1, 0);
        text = "x1,x2\n";
        text += num(lo0) + "," + num(lo1) + "\n";
        text += num(hi0) + "," + num(lo1) + "\n";
        text += num(hi0) + "," + num(hi1) + "\n";
        text += num(lo0) + "," + num(hi1) + "\n";
        text += num(lo0) + "," + num(lo1) + "\n";
    } else {
        text = "x1\n" + num(box.lo()(0, 0)) + "\n" + num(box.hi()(0, 0)) + "\n";
    }
    write_text(path, text);
}

void print_result(const ReachResult& result, const RunConfig& cfg) {
    std::printf("[%s]", method_name(result.method).c_str());
    if (result.per_dim > 0) {
        std::printf(" a=%d", result.per_dim);
    }
    if (result.taylor_order > 0) {
        std::printf(" r=%d", result.taylor_order);
    }
    if (!result.guaranteed) {
        std::printf(" (not guaranteed)");
    }
    std::printf("\n");
    for (Eigen::Index i = 0; i < result.reach_box.rows(); ++i) {
        std::printf("  x%d: [% .6g, % .6g]  width %.6g\n",
                    static_cast<int>(i + 1), result.reach_box.lo()(i, 0),
                    result.reach_box.hi()(i, 0), result.reach_box.width()(i, 0));
    }
    std::printf(
        "  timings: step1 %.3fs  step2 %.3fs  step3 %.3fs  step4 %.3fs  "
        "total %.3fs\n",
        result.timings.sx_tube_s, result.timings.sxx_set_s,
        result.timings.sampling_s, result.timings.reach_s,
        result.timings.total_s);
    (void)cfg;
}

ReachResult run_method(const std::string& method, const ReachProblem& problem,
                       const RunConfig& cfg) {
    if (method == "algorithm1") {
        return run_algorithm1(problem);
    }
    if (method == "ia_only") {
        return run_ia_only(problem);
    }
    return run_sampling_falsification(problem, cfg.sf_max_iters);
}

IntervalMatrix box_from_result_file(const fs::path& path, int n) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: result_file '" + path.string() +
                                    "' cannot be opened");
    }
    const json root = json::parse(in);
    const json& oa = require_key(root, "over_approx", "result_file:over_approx");
    const json& lo = require_key(oa, "lo", "result_file:over_approx.lo");
    const json& hi = require_key(oa, "hi", "result_file:over_approx.hi");
    if (!lo.is_array() || !hi.is_array() ||
        lo.size() != static_cast<std::size_t>(n) || hi.size() != lo.size()) {
        throw std::invalid_argument(
            "config: result_file over_approx must hold lo/hi arrays of length " +
            std::to_string(n));
    }
    Eigen::VectorXd blo(n), bhi(n);
    for (int i = 0; i < n; ++i) {
        blo(i) = as_double(lo.at(i), "result_file:over_approx.lo");
        bhi(i) = as_double(hi.at(i), "result_file:over_approx.hi");
    }
    return IntervalMatrix(blo, bhi);
}

}  // namespace

int cmd_run(const CliOptions& options) {
    const RunConfig cfg = load_config(options.config_path);
    const ReachProblem problem = make_problem(cfg, options);
    const fs::path out = resolve_out_dir(cfg, options);
    const std::uint64_t seed = options.seed.value_or(cfg.mc_seed);

    std::vector<std::string> methods;
    if (cfg.method == "all") {
        methods = {"algorithm1", "ia_only", "sampling_falsification"};
    } else {
        methods = {cfg.method};
    }

    for (const std::string& method : methods) {
        const ReachResult result = run_method(method, problem, cfg);
        json j = result_json(cfg, result);
        bool have_mc = false;
        McReport report;
        if (cfg.mc_count >= 1) {
            report = monte_carlo_check(
                problem, result.reach_box, cfg.mc_count, seed);
            j["mc"] = mc_json(report, seed);
            have_mc = true;
        }
        write_text(out / ("result_" + method + ".json"), j.dump(2) + "\n");
        write_box_csv(out / ("box_" + method + ".csv"), result.reach_box);
        print_result(result, cfg);
        if (have_mc) {
            std::printf("  mc: %d/%d endpoints contained (worst violation %g)\n",
                        report.samples - report.violations, report.samples,
                        report.worst_violation);
        }
    }
    return 0;
}

int cmd_compare(const CliOptions& options) {
    const RunConfig cfg = load_config(options.config_path);
    if (cfg.method != "all") {
        throw std::invalid_argument(
            "config: key 'method' must be \"all\" for compare");
    }
    if (cfg.grid_levels.empty()) {
        throw std::invalid_argument(
            "config: missing required key 'grid_levels'");
    }
    ReachProblem problem = make_problem(cfg, options);
    const fs::path out = resolve_out_dir(cfg, options);

    struct Row {
        std::string label;
        int per_dim;
        ReachResult result;
    };
    std::vector<Row> rows;
    for (const int level : cfg.grid_levels) {
        problem.per_dim = level;
        rows.push_back({"algorithm1_a" + std::to_string(level), level,
                        run_algorithm1(problem)});
    }
    problem.per_dim = cfg.per_dim;
    rows.push_back({"ia_only", 0, run_ia_only(problem)});
    const int sf_level =
        *std::max_element(cfg.grid_levels.begin(), cfg.grid_levels.end());
    problem.per_dim = sf_level;
    rows.push_back({"sampling_falsification", sf_level,
                    run_sampling_falsification(problem, cfg.sf_max_iters)});

    const Eigen::Index n = problem.model.n;
    std::printf("%-26s %5s", "method", "grid");
    for (Eigen::Index i = 0; i < n; ++i) {
        std::printf(" %12s", ("w" + std::to_string(i + 1)).c_str());
    }
    std::printf(" %9s %9s %9s %9s %9s\n", "step1_s", "step2_s", "step3_s",
                "step4_s", "total_s");
    for (const Row& row : rows) {
        const json j = result_json(cfg, row.result);
        write_text(out / ("result_" + row.label + ".json"), j.dump(2) + "\n");
        write_box_csv(out / ("box_" + row.label + ".csv"), row.result.reach_box);
        std::printf("%-26s %5d", row.label.c_str(), row.per_dim);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::printf(" %12.6g", row.result.reach_box.width()(i, 0));
        }
        std::printf(" %9.3f %9.3f %9.3f %9.3f %9.3f\n",
                    row.result.timings.sx_tube_s, row.result.timings.sxx_set_s,
                    row.result.timings.sampling_s, row.result.timings.reach_s,
                    row.result.timings.total_s);
    }
    return 0;
}

int cmd_mc(const CliOptions& options) {
    const RunConfig cfg = load_config(options.config_path);
    if (cfg.mc_count < 1) {
        throw std::invalid_argument(
            "config: key 'monte_carlo.count' must be >= 1 for mc");
    }
    const ReachProblem problem = make_problem(cfg, options);
    const fs::path out = resolve_out_dir(cfg, options);
    const std::uint64_t seed = options.seed.value_or(cfg.mc_seed);

    IntervalMatrix box;
    std::string source;
    if (!cfg.result_file.empty()) {
        fs::path path(cfg.result_file);
        if (path.is_relative() && !cfg.config_dir.empty()) {
            path = fs::path(cfg.config_dir) / path;
        }
        box = box_from_result_file(path, problem.model.n);
        source = cfg.result_file;
    } else {
        if (cfg.method == "all") {
            throw std::invalid_argument(
                "config: key 'method' must name a single method for mc "
                "(or set 'result_file')");
        }
        box = run_method(cfg.method, problem, cfg).reach_box;
        source = cfg.method;
    }

    const McReport report =
        monte_carlo_check(problem, box, cfg.mc_count, seed);

    json j = mc_json(report, seed);
    j["schema_version"] = 1;
    j["model"] = cfg.model_name;
    j["source"] = source;
    j["box"] = interval_vector_json(box);
    write_text(out / "mc_report.json", j.dump(2) + "\n");

    std::string csv;
    for (Eigen::Index i = 0; i < problem.model.n; ++i) {
        csv += (i == 0 ? "x" : ",x") + std::to_string(i + 1);
    }
    csv += "\n";
    for (const Eigen::VectorXd& end : report.endpoints) {
        for (Eigen::Index i = 0; i < end.size(); ++i) {
            if (i > 0) {
                csv += ",";
            }
            csv += num(end(i));
        }
        csv += "\n";
    }
    write_text(out / "mc_cloud.csv", csv);

    std::printf(
        "mc: %d samples, %d violations, fraction contained %.6g, worst "
        "violation %.3g\n",
        report.samples, report.violations, report.fraction_contained,
        report.worst_violation);
    return 0;
}

int dispatch(const std::string& verb, const CliOptions& options) {
    try {
        if (verb == "run") {
            return cmd_run(options);
        }
        if (verb == "compare") {
            return cmd_compare(options);
        }
        if (verb == "mc") {
            return cmd_mc(options);
        }
        throw std::invalid_argument("unknown verb '" + verb + "'");
    } catch (const BlowUpError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const TaylorOrderError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const OrderingError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sensireach::cli
