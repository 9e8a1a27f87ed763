#include "mor/matrix_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "mor/errors.hpp"

namespace mor {

namespace {

constexpr char kMagic[4] = {'M', 'O', 'R', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), ErrorCode::Io, "cannot open for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(m.rows()));
  put_u32(os, static_cast<std::uint32_t>(m.cols()));
  std::vector<double> row(static_cast<size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<size_t>(j)] = m(i, j);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  require(os.good(), ErrorCode::Io, "write failed: " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot open for reading: " + path);
  char magic[4];
  is.read(magic, 4);
  require(is.good() && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::Io,
          "bad magic in matrix file: " + path);
  std::uint32_t rows = get_u32(is);
  std::uint32_t cols = get_u32(is);
  require(is.good(), ErrorCode::Io, "truncated header: " + path);
  Eigen::MatrixXd m(rows, cols);
  std::vector<double> row(cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    require(is.good() || (is.eof() && i + 1 == rows && cols == 0), ErrorCode::Io,
            "truncated payload: " + path);
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = row[j];
  }
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), ErrorCode::Io, "cannot open for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(os.good(), ErrorCode::Io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace mor
