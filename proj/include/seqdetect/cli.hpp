#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqdetect/config.hpp"
#include "seqdetect/csv.hpp"

namespace seqdetect {

enum class ExitCode : int { ok = 0, parse_error = 2, domain_error = 3, io_error = 4 };

struct CliOptions {
    std::string subcommand;
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<std::int64_t> trials;
    bool quiet = false;
};

const std::vector<std::string>& subcommands();

/// Column schema of the CSV written by `subcommand`.
const CsvSchema& csv_schema(std::string_view subcommand);

/// Every configuration key the tool accepts, as "section.key".
const std::vector<std::string>& known_config_keys();

/// Execute one subcommand against an already-parsed configuration. The
/// command-line overrides in `options` take precedence over the config.
CsvTable execute(const CliOptions& options, const Config& config);

/// Full front end: parse argv, load the config, execute, write the CSV to
/// --out or `out`. Diagnostics go to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqdetect
