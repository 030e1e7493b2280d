#include "covel/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace covel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& value) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, s.data() + s.size(), value);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_number(fields[c], values[c])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_content) {
        first_content = false;  // header row
        continue;
      }
      throw Error(ErrorCode::parse_error,
                  source + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    first_content = false;
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(ErrorCode::parse_error,
                  source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " fields, found " +
                      std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::parse_error, source + ": no numeric rows");
  Eigen::MatrixXd m(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_matrix_csv(in, path);
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.rows() == 1) return m.row(0).transpose();
  if (m.cols() == 1) return m.col(0);
  throw Error(ErrorCode::parse_error,
              path + ": expected a single row or column, got " +
                  dims_string(m.rows(), m.cols()));
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  write_matrix_csv(m, out);
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path + "' failed");
}

}  // namespace covel
