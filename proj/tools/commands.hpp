#pragma once

#include "config.hpp"

#include "bhpm/errors.hpp"
#include "bhpm/residual.hpp"

#include <string>
#include <vector>

namespace bhpm::cli {

inline constexpr const char* kVersion = BHPM_VERSION;

struct OutputFile {
    std::string path;
    std::string content;
};

// Files are only written by write_outputs, after the command has finished without throwing.
struct CommandResult {
    std::vector<OutputFile> files;
    int exit_code = 0;
    std::string summary; // one or two lines for stdout
};

// 0 ok, 2 usage, 3 assumption / regime, 4 accuracy
int exit_code_for(ErrorKind k);

CommandResult cmd_verify_transport(const Config& c);
CommandResult cmd_pseudomode(const Config& c);
CommandResult cmd_sweep(const Config& c);
CommandResult cmd_fit(const Config& c);
CommandResult cmd_region(const Config& c);
CommandResult cmd_check_assumptions(const Config& c);
CommandResult cmd_semiclassical(const Config& c);

void write_outputs(const CommandResult& r);

// Transport check shared with the acceptance run.
struct TransportCheck {
    std::string potential;
    int points = 0;
    int rejected = 0;           // draws where lambda - V was unusable
    std::vector<double> worst;  // max |phi_j| / scale, j = -1..3
};
std::vector<TransportCheck> verify_transport(const std::vector<std::string>& ids, int N, int points,
                                             unsigned long long seed, double alpha_lo = 10, double alpha_hi = 1e3,
                                             double corrupt_psi0 = 0);

// One row of the sweep CSV.
struct SweepRow {
    double alpha = 0, beta = 0;
    int N = 0;
    ResidualReport report;
};
std::string sweep_csv_header();
std::string sweep_csv_line(const SweepRow& r);

// shortest round-trip text for a double
std::string fmt(double v);

} // namespace bhpm::cli
