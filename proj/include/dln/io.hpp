#pragma once

#include <iosfwd>
#include <string>

#include "dln/flow.hpp"
#include "dln/network.hpp"

namespace dln {

/// Matrix exchange format: JSON {"dim": d, "rows": [[...], ...]} or CSV with
/// d rows of d comma-separated values. Readers pick the format from the file
/// extension, falling back to content sniffing.
Matrix load_matrix(const std::string& path);
void save_matrix_json(const Matrix& m, const std::string& path);
std::string matrix_to_json_string(const Matrix& m);

/// Network exchange format:
/// {"depth": N, "width": d, "layers": {"1": <matrix>, ..., "N": <matrix>}}.
Network load_network(const std::string& path);
void save_network_json(const Network& w, const std::string& path);

/// Shortest round-trip decimal form of a double ("%.17g"), '.' separator.
std::string format_double(double v);

/// CSV with header t,loss,free_energy,entropy,balance_residual,sigma_1..d;
/// one newline-terminated row per recorded sample.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace dln
