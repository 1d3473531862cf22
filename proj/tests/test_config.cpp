#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "rbs/config.hpp"

using nlohmann::json;

namespace {

json minimal()
{
    return json::parse(R"({"epsilon": 1.0, "R": 1.0, "lambda": {"kind": "constant", "parameters": 10}})");
}

std::vector<std::string> errors_of(const json& doc)
{
    try {
        (void)rbs::parse_config_json(doc);
    } catch (const rbs::ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& path)
{
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.rfind(path + ":", 0) == 0; });
}

std::filesystem::path write_temp(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / ("rbs_cfg_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST(Config, MinimalDocumentGetsDefaults)
{
    const auto cfg = rbs::parse_config_json(minimal());
    EXPECT_EQ(cfg.N_kernel, 200u);
    EXPECT_EQ(cfg.M_sim, 200u);
    EXPECT_EQ(cfg.tol, 1e-10);
    EXPECT_EQ(cfg.max_iter, 200);
    EXPECT_EQ(cfg.dt, 1e-3);
    EXPECT_EQ(cfg.horizon, 2.0);
    EXPECT_EQ(cfg.output_directory, "out");
    EXPECT_EQ(cfg.snapshot_stride, 0u);
    const auto p = cfg.profile();
    EXPECT_TRUE(p.is_constant());
    EXPECT_EQ(p(0.3), 10.0);
    const auto u0 = cfg.initial_condition();
    EXPECT_DOUBLE_EQ(u0(0.5), 0.75);
}

TEST(Config, PolynomialAndTableProfiles)
{
    auto doc = minimal();
    doc["lambda"] = json::parse(R"({"kind": "polynomial", "parameters": [10, 0, 10]})");
    const auto poly = rbs::parse_config_json(doc).profile();
    EXPECT_DOUBLE_EQ(poly.lambda_max(), 20.0);
    EXPECT_DOUBLE_EQ(poly(0.5), 12.5);

    doc["lambda"] = json::parse(R"({"kind": "table", "parameters": {"r": [0, 0.5, 1], "values": [2, 4, 3]}})");
    const auto table = rbs::parse_config_json(doc).profile();
    EXPECT_DOUBLE_EQ(table(0.25), 3.0);
    EXPECT_DOUBLE_EQ(table.lambda_max(), 4.0);
}

TEST(Config, BesselModeInitialCondition)
{
    auto doc = minimal();
    doc["R"] = 2.0;
    doc["sim"] = json::parse(R"({"u0": {"kind": "bessel_mode", "parameters": 3.0}})");
    const auto u0 = rbs::parse_config_json(doc).initial_condition();
    EXPECT_DOUBLE_EQ(u0(0.0), 3.0);
    EXPECT_NEAR(u0(2.0), 0.0, 1e-14);
}

TEST(Config, NegativeEpsilonNamesItsPath)
{
    auto doc = minimal();
    doc["epsilon"] = -1.0;
    const auto errors = errors_of(doc);
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_TRUE(mentions(errors, "/epsilon"));
}

TEST(Config, CollectsEveryViolation)
{
    const auto doc = json::parse(R"({
        "R": 0,
        "lambda": {"kind": "cubic", "parameters": 1},
        "grid": {"N_kernel": 1, "M_sim": 4},
        "solver": {"tol": -1, "max_iter": 0},
        "sim": {"dt": 0.3, "horizon": 1.0},
        "outputs": {"directory": ""},
        "colour": "blue"
    })");
    const auto errors = errors_of(doc);
    for (const char* path : {"/epsilon", "/R", "/lambda/kind", "/grid/N_kernel", "/grid/M_sim", "/solver/tol",
                             "/solver/max_iter", "/sim/horizon", "/outputs/directory", "/colour"}) {
        EXPECT_TRUE(mentions(errors, path)) << path;
    }
    EXPECT_EQ(errors.size(), 10u);
}

TEST(Config, RejectsUnknownNestedKeys)
{
    auto doc = minimal();
    doc["grid"] = json::parse(R"({"N_kernel": 50, "N": 3})");
    doc["lambda"]["scale"] = 2;
    const auto errors = errors_of(doc);
    EXPECT_TRUE(mentions(errors, "/grid/N"));
    EXPECT_TRUE(mentions(errors, "/lambda/scale"));
}

TEST(Config, ValidatesTables)
{
    auto doc = minimal();
    doc["lambda"] = json::parse(R"({"kind": "table", "parameters": {"r": [0, 0.6, 0.5, 1.5], "values": [1, 2, 3, 4]}})");
    auto errors = errors_of(doc);
    EXPECT_TRUE(mentions(errors, "/lambda/parameters/r/2"));
    EXPECT_TRUE(mentions(errors, "/lambda/parameters/r/3"));
    doc["lambda"] = json::parse(R"({"kind": "table", "parameters": {"r": [0, 1], "values": [1]}})");
    errors = errors_of(doc);
    EXPECT_TRUE(mentions(errors, "/lambda/parameters"));
    doc["lambda"] = json::parse(R"({"kind": "table", "parameters": {"r": [0, "x"], "values": [1, 2]}})");
    errors = errors_of(doc);
    EXPECT_TRUE(mentions(errors, "/lambda/parameters/r/1"));
}

TEST(Config, RequiredKeysAndTopLevelShape)
{
    const auto errors = errors_of(json::object());
    EXPECT_TRUE(mentions(errors, "/epsilon"));
    EXPECT_TRUE(mentions(errors, "/R"));
    EXPECT_TRUE(mentions(errors, "/lambda"));
    EXPECT_THROW(rbs::parse_config_json(json::array()), rbs::ConfigError);
}

TEST(Config, ReadsFilesAndReportsMissingOrMalformedOnes)
{
    const auto good = write_temp("good.json", minimal().dump());
    EXPECT_EQ(rbs::parse_config(good).epsilon, 1.0);
    const auto bad = write_temp("bad.json", "{\"epsilon\": 1.0,");
    EXPECT_THROW(rbs::parse_config(bad), rbs::ConfigError);
    EXPECT_THROW(rbs::parse_config("/nonexistent/rbs/config.json"), rbs::ConfigError);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
}

TEST(Config, ShippedSamplesParse)
{
    for (const char* name : {"constant_lambda10.json", "constant_lambda30.json", "quadratic_lambda.json",
                             "table_lambda.json"}) {
        EXPECT_NO_THROW((void)rbs::parse_config(std::filesystem::path(RBS_CONFIG_DIR) / name)) << name;
    }
}
