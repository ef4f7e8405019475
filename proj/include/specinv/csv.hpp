#pragma once

#include "specinv/forward_solver.hpp"
#include "specinv/sign_recovery.hpp"
#include "specinv/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace specinv::csv {

/// Fixed-header numeric table; reals are written with 17 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_real(double value);

void write(const std::filesystem::path& path, const Table& table);
/// Throws MissingInput if the file is absent, ConfigInvalid if malformed.
Table read(const std::filesystem::path& path);

/// Columns: j, lambda_j, trace_node_0 ... trace_node_{B-1}.
Table eigensystem_table(const EigenSystem& eig);
/// Eigenvalues and traces only; `dof` records the size of the discrete problem.
EigenSystem eigensystem_from_table(const Table& table, std::size_t dof);

/// Columns: lambda, theta_node_0 ...
Table theta_table(const SpectralSamples& samples);
SpectralSamples theta_from_table(const Table& table);

/// Columns: j, lambda_hat, sqtrace_node_0 ...
Table extracted_table(const ExtractedData& data);
ExtractedData extracted_from_table(const Table& table);

/// Long format, columns: j, node, arclength, f_value.
Table signed_traces_table(const std::vector<SignedTrace>& traces, const BoundaryMesh& mesh);
/// Rebuilds the j x B matrix of signed values.
Eigen::MatrixXd signed_traces_from_table(const Table& table, std::size_t boundary_size);

/// Columns: j, location, order, confidence.
Table zeros_table(const std::vector<SignedTrace>& traces);

/// Columns: node, nd_0 ... nd_{B-1}.
Table nd_table(const NDOperator& nd);
NDOperator nd_from_table(const Table& table, double lambda, const BoundaryMesh& mesh);

}  // namespace specinv::csv
