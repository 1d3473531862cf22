#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "rbs/kernel/solver.hpp"

namespace rbs {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << std::setprecision(17);
    return out;
}

inline void check_written(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace detail

/// `r,rho,K` for every physical node, rows ordered by r then rho.
inline void write_kernel_csv(const KernelTable& table, const std::filesystem::path& path)
{
    auto out = detail::open_for_write(path);
    out << "r,rho,K\n";
    const int n = static_cast<int>(table.grid.N());
    const double h = table.grid.delta();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            out << i * h << ',' << j * h << ',' << table.K_at(i, j) << '\n';
        }
    }
    detail::check_written(out, path);
}

inline nlohmann::json kernel_sidecar(const KernelTable& table, const ReactionProfile& profile, double residual_value)
{
    return {
        {"epsilon", profile.epsilon()},
        {"R", table.grid.R()},
        {"N", table.grid.N()},
        {"tol", table.tol},
        {"iterations_used", table.iterations_used},
        {"residual", residual_value},
        {"variant", to_string(table.variant)},
        {"lambda_descriptor", profile.descriptor()},
    };
}

inline void write_json(const nlohmann::json& doc, const std::filesystem::path& path)
{
    auto out = detail::open_for_write(path);
    out << doc.dump(2) << '\n';
    detail::check_written(out, path);
}

} // namespace rbs
