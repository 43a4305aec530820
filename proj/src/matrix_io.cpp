#include "submod/matrix_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace submod {
namespace {

constexpr char kMagic[4] = {'S', 'B', 'M', 'D'};
constexpr std::uint16_t kVersion = 1;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw Error(path.string() + ": " + msg);
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("missing file: " + path.string());
  return in;
}

template <class T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b)
    v |= static_cast<T>(buf[b]) << (8 * b);
  return v;
}

template <class T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t b = 0; b < sizeof(T); ++b)
    buf[b] = static_cast<unsigned char>((v >> (8 * b)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

Matrix read_binary(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    fail(path, "bad magic bytes");
  std::uint16_t version = read_le<std::uint16_t>(in);
  if (version != kVersion)
    fail(path, "unsupported format version " + std::to_string(version));
  std::uint32_t rows = read_le<std::uint32_t>(in);
  std::uint32_t cols = read_le<std::uint32_t>(in);
  if (rows == 0 || cols == 0) fail(path, "empty matrix");
  Matrix m(rows, cols);
  std::vector<unsigned char> buf(static_cast<std::size_t>(cols) * 4);
  for (std::uint32_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) fail(path, "truncated payload");
    for (std::uint32_t j = 0; j < cols; ++j) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b)
        bits |= static_cast<std::uint32_t>(buf[j * 4 + b]) << (8 * b);
      float f;
      std::memcpy(&f, &bits, 4);
      m(i, j) = f;
    }
  }
  return m;
}

Matrix read_csv(const std::filesystem::path& path) {
  auto in = open_input(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p) fail(path, "unparseable value in row " + std::to_string(rows.size()));
      row.push_back(v);
      p = end;
      while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
      if (*p == ',') {
        ++p;
        continue;
      }
      if (*p == '\0') break;
      fail(path, "unexpected character in row " + std::to_string(rows.size()));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, "ragged row " + std::to_string(rows.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(path);
  return read_csv(path);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out.write(kMagic, 4);
  write_le<std::uint16_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      float f = static_cast<float>(m(i, j));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      write_le<std::uint32_t>(out, bits);
    }
}

Vector read_scalar_column(const std::filesystem::path& path) {
  Matrix m = read_matrix(path);
  if (m.cols() != 1)
    fail(path, "expected one value per line, got " + std::to_string(m.cols()) +
                   " columns");
  return m.col(0);
}

void write_scalar_column(const std::filesystem::path& path, const Vector& v) {
  write_matrix_csv(path, v);
}

}  // namespace submod
