#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace matern::cli {

struct RunConfig {
    std::string kernel = "matern32";
    double h = 1.0;
    double lambda = 1e-10;
    double epsilon = 0.005;
    int resolution = 128;
    std::optional<double> taper_h;
    int threads = 0;  // 0: hardware
    std::uint64_t seed = 0;

    std::string describe() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Maps an in-flight exception to an exit code and prints it to err.
int report_failure(std::ostream& err);

int cmd_reconstruct(const std::string& input, const std::string& output, const RunConfig& config,
                    std::ostream& out, std::ostream& err);

/// Prints the metrics CSV header and one row; also writes them to csv_path when given.
int cmd_benchmark(const std::string& pred, const std::string& gt, std::int64_t samples, std::uint64_t seed,
                  const std::string& csv_path, std::ostream& out, std::ostream& err);

/// One reconstruct + benchmark per (h, lambda) pair. Empty lambdas means {config.lambda}.
int cmd_sweep(const std::string& input, const std::string& gt, const std::vector<double>& h_list,
              const std::vector<double>& lambdas, const RunConfig& config, std::int64_t samples,
              const std::string& csv_path, std::ostream& out, std::ostream& err);

/// Full command line (argv[0] included). Parses, echoes the config and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace matern::cli
