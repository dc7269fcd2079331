#ifndef RDFRONT_EXPERIMENT_HPP
#define RDFRONT_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "rdfront/config.hpp"

namespace rdfront {

struct RunResult {
    int status = 0;
    std::string out_dir;
    std::vector<std::pair<std::string, bool>> assertions;
    std::string fault; // nonempty when a module fault aborted the run
};

/**
 * Executes one experiment: builds the configured medium/geometry, runs the
 * requested computation, and writes CSV/binary artifacts plus manifest.txt
 * (config echo, versions, timings, checksums) and summary.txt with one
 * pass/fail line per assertion.
 */
RunResult run_experiment(const ExperimentConfig& cfg);

/** FNV-1a 64-bit checksum of a file, hex encoded (manifest entries). */
std::string file_checksum(const std::string& path);

} // namespace rdfront

#endif
