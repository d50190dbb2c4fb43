#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "spme/harness.hpp"
#include "spme/sde.hpp"

namespace spme {

// Shortest round-trip decimal form.
std::string format_double(double x);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_moments_csv(std::ostream& out, const MomentReport& report);
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
void write_stickiness_csv(std::ostream& out, const StickinessReport& report);

// Writes through `writer` into dir/name, creating dir; throws std::runtime_error on I/O failure.
template <typename Report>
void write_csv_file(const std::filesystem::path& dir, const std::string& name, const Report& report,
                    void (*writer)(std::ostream&, const Report&));

}  // namespace spme
