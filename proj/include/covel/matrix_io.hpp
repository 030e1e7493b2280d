#pragma once

// CSV interchange for sample and covariance matrices. Rows are
// observations; an optional non-numeric first row is treated as a header.

#include <iosfwd>
#include <string>

#include "covel/covmodel.hpp"

namespace covel {

/// Throws Error(io_error) if the file cannot be opened and
/// Error(parse_error) naming the line for malformed content.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
Eigen::MatrixXd read_matrix_csv(std::istream& in, const std::string& source);

/// A vector stored as one row or one column.
Eigen::VectorXd read_vector_csv(const std::string& path);

/// Writes with 17 significant digits so that re-reading is bit-exact.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace covel
