// Command-line driver: run a scenario, sweep a parameter grid, or
// re-verify a finished run directory from its persisted CSVs.
//
// Exit codes: 0 pass, 1 check failure, 2 config/usage error.
#include <cstring>
#include <exception>
#include <iostream>

#include "solwave/driver.hpp"

namespace {

void usage() {
    std::cerr << "solwave " << solwave::kVersion << "\n"
              << "usage:\n"
              << "  solwave run <config.cfg>     run one scenario\n"
              << "  solwave sweep <config.cfg>   cartesian sweep over the [sweep] lists\n"
              << "  solwave check <run-dir>      re-verify predicates from persisted CSVs\n"
              << "\n"
              << "SOLWAVE_WORKERS limits sweep parallelism (default: hardware threads).\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        usage();
        return 2;
    }
    const std::string cmd = argv[1];
    const std::string arg = argv[2];
    try {
        if (cmd == "run") {
            const solwave::RunManifest m = solwave::run_scenario(arg);
            return m.all_passed ? 0 : 1;
        }
        if (cmd == "sweep") {
            const auto rows = solwave::sweep(arg);
            for (const auto& r : rows)
                if (!r.pass) return 1;
            return 0;
        }
        if (cmd == "check") {
            return solwave::check_run_dir(arg);
        }
        usage();
        return 2;
    } catch (const solwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
