/**
 * @file pipeline.hpp
 * @brief Batch orchestration behind the wbrmt command-line tool.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbrmt/config.hpp"

namespace wbrmt {

enum class Subcommand { ingest, wbfe, mfdfa, rmt, sweep, synth };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand command);

/// key=value progress lines on a stream; silent when quiet.
class Logger {
public:
    Logger(std::ostream& out, bool quiet) : out_(&out), quiet_(quiet) {}

    void info(std::string_view module, std::string_view message) const;
    void error(std::string_view module, std::string_view message) const;

private:
    std::ostream* out_;
    bool quiet_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct PipelineResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs one subcommand and writes its artifacts under config.output_dir.
/// Fatal errors are logged with their module and mapped to kExitFatal.
PipelineResult run_pipeline(const RunConfig& config, Subcommand command, const Logger& log);

/// Reads a one-value-per-line series; when rows have several delimited
/// fields the last one is used. A non-numeric first row is taken as a header.
std::vector<double> read_series_file(const std::filesystem::path& path);

/// Scales 1..floor(log2 length) unless `requested` is non-empty.
std::vector<int> resolve_scales(const std::vector<int>& requested, std::size_t length);

}  // namespace wbrmt
