/**
 * @file report.hpp
 * @brief Artifact writers: CSV tables and JSON reports stamped with the
 * tool version and config hash.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wbrmt/mfdfa.hpp"
#include "wbrmt/rmt.hpp"

namespace wbrmt {

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// Delimited table writer. Every file starts with a `# wbrmt <version>
/// config_hash=<hash>` line followed by optional metadata comment lines.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
              std::initializer_list<std::string> metadata = {});

    void header(std::initializer_list<std::string_view> names);
    void comment(std::string_view text);

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    void end_row();

private:
    std::ofstream out_;
    bool first_in_row_ = true;
};

nlohmann::ordered_json report_meta(std::string_view config_hash);

nlohmann::ordered_json spectral_to_json(const SpectralResult& result);

nlohmann::ordered_json sweep_to_json(const SweepReport& report, std::string_view config_hash);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// Eigenvalue histogram against the Marchenko-Pastur density.
void write_eigenvalue_histogram(const std::filesystem::path& path, const SpectralResult& result,
                                std::string_view config_hash);

/// Spacing histogram against the Wigner surmise and the fitted a s exp(-b s^2).
void write_spacing_histogram(const std::filesystem::path& path, const SpectralResult& result,
                             std::string_view config_hash);

}  // namespace wbrmt
