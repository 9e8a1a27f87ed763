#pragma once

#include <Eigen/Dense>
#include <string>

namespace mor {

// Binary matrix container: magic "MOR1", u32 little-endian rows, u32 cols,
// then rows*cols little-endian IEEE-754 float64 values in row-major order.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mor
