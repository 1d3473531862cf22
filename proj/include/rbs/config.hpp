#pragma once

/**
 * @file config.hpp
 * @brief JSON experiment configuration. Every violation is collected with its JSON-pointer path
 * before anything is reported, and unknown keys are errors.
 *
 *     {
 *       "epsilon": 1.0, "R": 1.0,
 *       "lambda": {"kind": "constant", "parameters": 10},
 *                 {"kind": "polynomial", "parameters": [10, 0, 10]}       lambda = sum p_k r^k
 *                 {"kind": "table", "parameters": {"r": [...], "values": [...]}}
 *       "grid":    {"N_kernel": 200, "M_sim": 200},
 *       "solver":  {"tol": 1e-10, "max_iter": 200},
 *       "sim":     {"dt": 1e-3, "horizon": 2.0,
 *                   "u0": {"kind": "polynomial", "parameters": [1, 0, -1]}}   or {"kind": "bessel_mode", "parameters": 1.0}
 *       "outputs": {"directory": "out", "snapshot_stride": 0}
 *     }
 *
 * Only epsilon, R and lambda are required.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "rbs/profile.hpp"
#include "rbs/special_functions.hpp"

namespace rbs {

namespace defaults {
inline constexpr std::size_t n_kernel = 200;
inline constexpr std::size_t m_sim = 200;
inline constexpr double tol = 1e-10;
inline constexpr int max_iter = 200;
inline constexpr double dt = 1e-3;
inline constexpr double horizon = 2.0;
inline constexpr const char* out_dir = "out";
inline constexpr std::size_t snapshot_stride = 0;
} // namespace defaults

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors))
    {
    }

    [[nodiscard]] const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errors)
    {
        std::string out = "invalid configuration:";
        for (const auto& e : errors) {
            out += "\n  " + e;
        }
        return out;
    }

    std::vector<std::string> errors_;
};

struct LambdaSpec {
    std::string kind = "constant";
    double constant = 0.0;
    std::vector<double> coefficients;
    std::vector<double> table_r;
    std::vector<double> table_values;
};

struct InitialCondition {
    std::string kind = "polynomial";
    std::vector<double> coefficients{1.0, 0.0, -1.0};
    double amplitude = 1.0;
};

struct ExperimentConfig {
    double epsilon = 0.0;
    double R = 0.0;
    LambdaSpec lambda;
    std::size_t N_kernel = defaults::n_kernel;
    std::size_t M_sim = defaults::m_sim;
    double tol = defaults::tol;
    int max_iter = defaults::max_iter;
    double dt = defaults::dt;
    double horizon = defaults::horizon;
    InitialCondition u0;
    std::string output_directory = defaults::out_dir;
    std::size_t snapshot_stride = defaults::snapshot_stride;

    [[nodiscard]] ReactionProfile profile() const
    {
        if (lambda.kind == "constant") {
            return ReactionProfile::constant(lambda.constant, epsilon, R);
        }
        if (lambda.kind == "polynomial") {
            return ReactionProfile::polynomial(lambda.coefficients, epsilon, R);
        }
        return ReactionProfile::table(lambda.table_r, lambda.table_values, epsilon, R);
    }

    [[nodiscard]] std::function<double(double)> initial_condition() const
    {
        if (u0.kind == "bessel_mode") {
            const double k = j0_first_zero() / R;
            const double amp = u0.amplitude;
            return [k, amp](double r) { return amp * bessel_j0(k * r); };
        }
        const std::vector<double> c = u0.coefficients;
        return [c](double r) {
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) {
                acc = acc * r + *it;
            }
            return acc;
        };
    }
};

namespace detail {

using nlohmann::json;

class ConfigReader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back((path.empty() ? "/" : path) + ": " + msg); }

    void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
    {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& item : obj.items()) {
            if (!ok.count(item.key())) {
                fail(path + "/" + item.key(), "unknown key");
            }
        }
    }

    bool object(const json& parent, const char* key, const std::string& path, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                fail(path + "/" + key, "required");
            }
            return false;
        }
        if (!parent.at(key).is_object()) {
            fail(path + "/" + key, "must be an object");
            return false;
        }
        return true;
    }

    void positive(const json& parent, const char* key, const std::string& path, double& out, bool required)
    {
        const std::string p = path + "/" + key;
        if (!parent.contains(key)) {
            if (required) {
                fail(p, "required");
            }
            return;
        }
        const json& v = parent.at(key);
        if (!v.is_number()) {
            fail(p, "must be a number");
            return;
        }
        const double d = v.get<double>();
        if (!(d > 0.0) || !std::isfinite(d)) {
            fail(p, "must be positive and finite");
            return;
        }
        out = d;
    }

    template <class Int>
    void integer(const json& parent, const char* key, const std::string& path, Int& out, long long min_value)
    {
        const std::string p = path + "/" + key;
        if (!parent.contains(key)) {
            return;
        }
        const json& v = parent.at(key);
        if (!v.is_number_integer()) {
            fail(p, "must be an integer");
            return;
        }
        const long long i = v.get<long long>();
        if (i < min_value) {
            fail(p, "must be >= " + std::to_string(min_value));
            return;
        }
        out = static_cast<Int>(i);
    }

    bool numbers(const json& v, const std::string& p, std::vector<double>& out)
    {
        if (!v.is_array() || v.empty()) {
            fail(p, "must be a non-empty array of numbers");
            return false;
        }
        out.clear();
        bool good = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                fail(p + "/" + std::to_string(i), "must be a finite number");
                good = false;
            } else {
                out.push_back(v[i].get<double>());
            }
        }
        return good;
    }

    void lambda(const json& obj, const std::string& path, LambdaSpec& out, double radius, bool radius_ok)
    {
        reject_unknown(obj, path, {"kind", "parameters"});
        if (!obj.contains("kind") || !obj.at("kind").is_string()) {
            fail(path + "/kind", "required string: constant, polynomial or table");
            return;
        }
        out.kind = obj.at("kind").get<std::string>();
        const std::string pp = path + "/parameters";
        if (!obj.contains("parameters")) {
            fail(pp, "required");
            return;
        }
        const json& par = obj.at("parameters");
        if (out.kind == "constant") {
            if (!par.is_number() || !std::isfinite(par.get<double>())) {
                fail(pp, "must be a finite number");
                return;
            }
            out.constant = par.get<double>();
        } else if (out.kind == "polynomial") {
            numbers(par, pp, out.coefficients);
        } else if (out.kind == "table") {
            if (!par.is_object()) {
                fail(pp, "must be an object with arrays r and values");
                return;
            }
            reject_unknown(par, pp, {"r", "values"});
            if (!par.contains("r") || !par.contains("values")) {
                fail(pp, "needs both r and values");
                return;
            }
            const bool ok_r = numbers(par.at("r"), pp + "/r", out.table_r);
            const bool ok_v = numbers(par.at("values"), pp + "/values", out.table_values);
            if (!ok_r || !ok_v) {
                return;
            }
            if (out.table_r.size() != out.table_values.size() || out.table_r.size() < 2) {
                fail(pp, "r and values need the same length >= 2");
            }
            for (std::size_t i = 0; i < out.table_r.size(); ++i) {
                const double r = out.table_r[i];
                if (r < 0.0 || (radius_ok && r > radius)) {
                    fail(pp + "/r/" + std::to_string(i), "must lie in [0, R]");
                } else if (i > 0 && !(r > out.table_r[i - 1])) {
                    fail(pp + "/r/" + std::to_string(i), "must be strictly increasing");
                }
            }
        } else {
            fail(path + "/kind", "must be constant, polynomial or table");
        }
    }

    void initial(const json& obj, const std::string& path, InitialCondition& out)
    {
        reject_unknown(obj, path, {"kind", "parameters"});
        if (!obj.contains("kind") || !obj.at("kind").is_string()) {
            fail(path + "/kind", "required string: polynomial or bessel_mode");
            return;
        }
        out.kind = obj.at("kind").get<std::string>();
        const std::string pp = path + "/parameters";
        if (out.kind == "polynomial") {
            if (!obj.contains("parameters")) {
                fail(pp, "required");
                return;
            }
            numbers(obj.at("parameters"), pp, out.coefficients);
        } else if (out.kind == "bessel_mode") {
            if (obj.contains("parameters")) {
                const json& par = obj.at("parameters");
                if (!par.is_number() || !std::isfinite(par.get<double>())) {
                    fail(pp, "must be a finite amplitude");
                } else {
                    out.amplitude = par.get<double>();
                }
            }
        } else {
            fail(path + "/kind", "must be polynomial or bessel_mode");
        }
    }
};

} // namespace detail

inline ExperimentConfig parse_config_json(const nlohmann::json& doc)
{
    detail::ConfigReader in;
    ExperimentConfig cfg;
    if (!doc.is_object()) {
        throw ConfigError({"/: top level must be an object"});
    }
    in.reject_unknown(doc, "", {"epsilon", "R", "lambda", "grid", "solver", "sim", "outputs"});
    in.positive(doc, "epsilon", "", cfg.epsilon, true);
    in.positive(doc, "R", "", cfg.R, true);
    const bool radius_ok = cfg.R > 0.0;
    if (in.object(doc, "lambda", "", true)) {
        in.lambda(doc.at("lambda"), "/lambda", cfg.lambda, cfg.R, radius_ok);
    }
    if (in.object(doc, "grid", "", false)) {
        const auto& g = doc.at("grid");
        in.reject_unknown(g, "/grid", {"N_kernel", "M_sim"});
        in.integer(g, "N_kernel", "/grid", cfg.N_kernel, 2);
        in.integer(g, "M_sim", "/grid", cfg.M_sim, 8);
    }
    if (in.object(doc, "solver", "", false)) {
        const auto& s = doc.at("solver");
        in.reject_unknown(s, "/solver", {"tol", "max_iter"});
        in.positive(s, "tol", "/solver", cfg.tol, false);
        in.integer(s, "max_iter", "/solver", cfg.max_iter, 1);
    }
    if (in.object(doc, "sim", "", false)) {
        const auto& s = doc.at("sim");
        in.reject_unknown(s, "/sim", {"dt", "horizon", "u0"});
        in.positive(s, "dt", "/sim", cfg.dt, false);
        in.positive(s, "horizon", "/sim", cfg.horizon, false);
        if (in.object(s, "u0", "/sim", false)) {
            in.initial(s.at("u0"), "/sim/u0", cfg.u0);
        }
        const double steps = cfg.horizon / cfg.dt;
        if (std::fabs(steps - std::round(steps)) > 1e-9 * steps) {
            in.fail("/sim/horizon", "must be an integer multiple of /sim/dt");
        }
    }
    if (in.object(doc, "outputs", "", false)) {
        const auto& o = doc.at("outputs");
        in.reject_unknown(o, "/outputs", {"directory", "snapshot_stride"});
        if (o.contains("directory")) {
            if (!o.at("directory").is_string() || o.at("directory").get<std::string>().empty()) {
                in.fail("/outputs/directory", "must be a non-empty string");
            } else {
                cfg.output_directory = o.at("directory").get<std::string>();
            }
        }
        in.integer(o, "snapshot_stride", "/outputs", cfg.snapshot_stride, 0);
    }
    if (!in.errors.empty()) {
        throw ConfigError(in.errors);
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot open config file " + path.string()});
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({"malformed JSON in " + path.string() + ": " + e.what()});
    }
    return parse_config_json(doc);
}

} // namespace rbs
