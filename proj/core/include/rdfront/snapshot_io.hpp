#ifndef RDFRONT_SNAPSHOT_IO_HPP
#define RDFRONT_SNAPSHOT_IO_HPP

#include <string>

#include "rdfront/grid.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

// Snapshot file: magic "RDFRONT1", u32 dim, per axis (f64 a, b, h),
// f64 time, then row-major little-endian f64 node values.
void write_snapshot(const Field& u, const std::string& path);
Field read_snapshot(const std::string& path);

// Trajectory directory: snapshot files plus index.csv (index, time, filename).
void write_trajectory(const Trajectory& traj, const std::string& dir);

} // namespace rdfront

#endif
