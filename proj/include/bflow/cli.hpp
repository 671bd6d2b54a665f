#pragma once

// Batch experiment runner. Each experiment writes <name>.csv (plus any extra
// tables), <name>.json with the summary, and manifest.json with parameters,
// versions and wall time into the output directory.
//
// Exit status: 0 success, 1 numerical failure, 2 usage or validation error.
// On failure a single-line JSON error document is printed to `out`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bflow::cli {

inline constexpr const char* output_dir_env = "BFLOW_OUTPUT_DIR";

/// Every parameter any experiment reads. Each subcommand binds the subset it uses.
struct ExperimentConfig {
    std::string experiment;
    std::string output_dir = "out";
    std::string backend = "openmp";
    std::uint64_t seed = 1;

    // pressure model p = A rho^gamma
    double A = 1.0 / 3.0;
    double gamma = 3.0;
    // rotating disc / shear background
    double omega = 1.0;
    double c = 1.0;
    double rho0 = 1.0;

    // 1-D grids and time stepping
    int n_grid = 0;       ///< 0 picks a per-experiment default
    double dt = 0.0;      ///< 0 picks a per-experiment default
    double t_end = 0.0;   ///< 0 picks a per-experiment default
    int sample_every = 10;
    bool stop_at_shock = false;

    // initial data
    std::string profile = "sine";   ///< sine | random
    std::string v_profile = "random";
    double u_amp = 1.0;
    double rho_amp = 0.0;
    int kmax = 3;
    int frames = 5;

    // conjugate
    int mode = -1;        ///< -1 picks a per-experiment default
    int m_max = 2;
    double tol = 1e-6;

    // curvature scan
    int trials = 200;

    // torus
    std::string kind = "gradient";  ///< gradient | rotational | mixed
    int samples = 201;
    double crosscheck_t = 0.0;

    // disc
    int k_max = 12;
    int n_max = 16;
    int nodes = 400;
    std::string initial = "none";   ///< none | gradient | swirl
    int nr = 48;
    int ntheta = 16;
};

/// Parses and runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key=value lines; '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace bflow::cli
