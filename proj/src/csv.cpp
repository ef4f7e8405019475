#include "specinv/csv.hpp"

#include "specinv/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace specinv::csv {

namespace {

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void require_columns(const Table& t, std::size_t leading, const char* what) {
  if (t.header.size() < leading) throw Error(ErrorCode::ConfigInvalid, std::string(what) + ": too few columns");
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingInput, "cannot write " + path.string());
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_real(row[c]);
    out << '\n';
  }
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "missing stage input " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ConfigInvalid, path.string() + " is empty");
  t.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line)) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw Error(ErrorCode::ConfigInvalid, path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size())
      throw Error(ErrorCode::ConfigInvalid, path.string() + ":" + std::to_string(line_no) + ": column count mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table eigensystem_table(const EigenSystem& eig) {
  Table t;
  t.header = {"j", "lambda_j"};
  for (auto& h : numbered("trace_node_", static_cast<std::size_t>(eig.traces.rows()))) t.header.push_back(h);
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j) {
    std::vector<double> row{static_cast<double>(j + 1), eig.eigenvalues(j)};
    for (Eigen::Index i = 0; i < eig.traces.rows(); ++i) row.push_back(eig.traces(i, j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

EigenSystem eigensystem_from_table(const Table& t, std::size_t dof) {
  require_columns(t, 2, "eigensystem");
  EigenSystem eig;
  eig.dof = dof;
  const auto count = static_cast<Eigen::Index>(t.rows.size());
  const auto nb = static_cast<Eigen::Index>(t.header.size() - 2);
  eig.eigenvalues.resize(count);
  eig.traces.resize(nb, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& row = t.rows[static_cast<std::size_t>(j)];
    eig.eigenvalues(j) = row[1];
    for (Eigen::Index i = 0; i < nb; ++i) eig.traces(i, j) = row[static_cast<std::size_t>(i) + 2];
  }
  return eig;
}

Table theta_table(const SpectralSamples& s) {
  Table t;
  t.header = {"lambda"};
  for (auto& h : numbered("theta_node_", static_cast<std::size_t>(s.theta.cols()))) t.header.push_back(h);
  for (Eigen::Index k = 0; k < s.lambda_grid.size(); ++k) {
    std::vector<double> row{s.lambda_grid(k)};
    for (Eigen::Index i = 0; i < s.theta.cols(); ++i) row.push_back(s.theta(k, i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

SpectralSamples theta_from_table(const Table& t) {
  require_columns(t, 2, "theta");
  SpectralSamples s;
  const auto rows = static_cast<Eigen::Index>(t.rows.size());
  const auto nb = static_cast<Eigen::Index>(t.header.size() - 1);
  s.lambda_grid.resize(rows);
  s.theta.resize(rows, nb);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& row = t.rows[static_cast<std::size_t>(k)];
    s.lambda_grid(k) = row[0];
    for (Eigen::Index i = 0; i < nb; ++i) s.theta(k, i) = row[static_cast<std::size_t>(i) + 1];
  }
  return s;
}

Table extracted_table(const ExtractedData& d) {
  Table t;
  t.header = {"j", "lambda_hat"};
  for (auto& h : numbered("sqtrace_node_", static_cast<std::size_t>(d.squared_traces.cols()))) t.header.push_back(h);
  for (Eigen::Index j = 0; j < d.eigenvalues.size(); ++j) {
    std::vector<double> row{static_cast<double>(j + 1), d.eigenvalues(j)};
    for (Eigen::Index i = 0; i < d.squared_traces.cols(); ++i) row.push_back(d.squared_traces(j, i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ExtractedData extracted_from_table(const Table& t) {
  require_columns(t, 3, "extracted");
  ExtractedData d;
  const auto count = static_cast<Eigen::Index>(t.rows.size());
  const auto nb = static_cast<Eigen::Index>(t.header.size() - 2);
  d.eigenvalues.resize(count);
  d.squared_traces.resize(count, nb);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& row = t.rows[static_cast<std::size_t>(j)];
    d.eigenvalues(j) = row[1];
    for (Eigen::Index i = 0; i < nb; ++i) d.squared_traces(j, i) = row[static_cast<std::size_t>(i) + 2];
  }
  return d;
}

Table signed_traces_table(const std::vector<SignedTrace>& traces, const BoundaryMesh& mesh) {
  Table t;
  t.header = {"j", "node", "arclength", "f_value"};
  for (std::size_t j = 0; j < traces.size(); ++j)
    for (std::size_t i = 0; i < mesh.size(); ++i)
      t.rows.push_back({static_cast<double>(j + 1), static_cast<double>(i), mesh.arclength[i],
                        traces[j].values(static_cast<Eigen::Index>(i))});
  return t;
}

Eigen::MatrixXd signed_traces_from_table(const Table& t, std::size_t boundary_size) {
  require_columns(t, 4, "signed traces");
  std::size_t count = 0;
  for (const auto& row : t.rows) count = std::max(count, static_cast<std::size_t>(row[0]));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(boundary_size));
  for (const auto& row : t.rows) {
    const auto j = static_cast<std::size_t>(row[0]);
    const auto i = static_cast<std::size_t>(row[1]);
    if (j < 1 || i >= boundary_size) throw Error(ErrorCode::ConfigInvalid, "signed trace index out of range");
    m(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(i)) = row[3];
  }
  return m;
}

Table zeros_table(const std::vector<SignedTrace>& traces) {
  Table t;
  t.header = {"j", "location", "order", "confidence"};
  for (std::size_t j = 0; j < traces.size(); ++j)
    for (const ZeroAnnotation& z : traces[j].zeros)
      t.rows.push_back({static_cast<double>(j + 1), z.location, static_cast<double>(z.order), z.confidence});
  return t;
}

Table nd_table(const NDOperator& nd) {
  Table t;
  t.header = {"node"};
  for (auto& h : numbered("nd_", static_cast<std::size_t>(nd.map.cols()))) t.header.push_back(h);
  for (Eigen::Index r = 0; r < nd.map.rows(); ++r) {
    std::vector<double> row{static_cast<double>(r)};
    for (Eigen::Index c = 0; c < nd.map.cols(); ++c) row.push_back(nd.map(r, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

NDOperator nd_from_table(const Table& t, double lambda, const BoundaryMesh& mesh) {
  const auto nb = static_cast<Eigen::Index>(mesh.size());
  if (static_cast<Eigen::Index>(t.header.size()) != nb + 1 || static_cast<Eigen::Index>(t.rows.size()) != nb)
    throw Error(ErrorCode::ShapeMismatch, "N-D table does not match the boundary");
  NDOperator nd;
  nd.lambda = lambda;
  nd.weights = Eigen::Map<const Eigen::VectorXd>(mesh.weights.data(), nb);
  nd.map.resize(nb, nb);
  for (Eigen::Index r = 0; r < nb; ++r)
    for (Eigen::Index c = 0; c < nb; ++c) nd.map(r, c) = t.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c) + 1];
  return nd;
}

}  // namespace specinv::csv
