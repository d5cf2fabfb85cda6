#pragma once
//
// Matrix files.
//
//   CSV  one matrix row per line, comma-separated decimal literals; an
//        optional header line can be skipped.
//   RAW  "MPID", version byte 0x01, rows and cols as u64 little-endian, then
//        rows*cols binary64 little-endian values in column-major order.
//

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/matrix.hpp"

namespace mpid::harness {

enum class MatrixFormat { csv, raw };

inline constexpr std::array<char, 4> raw_magic{'M', 'P', 'I', 'D'};
inline constexpr std::uint8_t raw_version = 0x01;

inline MatrixFormat format_from_path(std::string_view path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? MatrixFormat::csv
                                                                    : MatrixFormat::raw;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace detail

inline DenseMatrix parse_csv(std::string_view text, bool skip_header = false) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t fpos = 0;
    while (true) {
      std::size_t comma = line.find(',', fpos);
      std::string_view field =
          detail::trim(line.substr(fpos, comma == std::string_view::npos ? line.npos : comma - fpos));
      double v = 0.0;
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("csv: invalid number on line " + std::to_string(line_no), line_no);
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      fpos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("csv: ragged row on line " + std::to_string(line_no) + " (expected " +
                           std::to_string(rows.front().size()) + " fields, got " +
                           std::to_string(row.size()) + ")",
                       line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data rows", line_no);

  DenseMatrix A(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
  return A;
}

inline std::string to_csv(const DenseMatrix& A) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (j) out.push_back(',');
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

inline std::string to_raw(const DenseMatrix& A) {
  std::string out(raw_magic.begin(), raw_magic.end());
  out.push_back(static_cast<char>(raw_version));
  detail::put_u64_le(out, A.rows());
  detail::put_u64_le(out, A.cols());
  out.reserve(out.size() + 8 * A.size());
  for (double v : A.data()) detail::put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline DenseMatrix parse_raw(std::string_view bytes) {
  constexpr std::size_t header = 4 + 1 + 8 + 8;
  if (bytes.size() < header) throw ParseError("raw: truncated header", bytes.size());
  if (!std::equal(raw_magic.begin(), raw_magic.end(), bytes.begin()))
    throw ParseError("raw: bad magic", 0);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (p[4] != raw_version) throw ParseError("raw: unsupported version", 4);
  const std::uint64_t rows = detail::get_u64_le(p + 5);
  const std::uint64_t cols = detail::get_u64_le(p + 13);
  if (rows == 0 || cols == 0) throw ParseError("raw: empty dimension", 5);
  if (cols > (bytes.size() - header) / 8 / rows || rows * cols * 8 != bytes.size() - header)
    throw ParseError("raw: payload length does not match dimensions", header);

  DenseMatrix A(rows, cols);
  auto data = A.data();
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = std::bit_cast<double>(detail::get_u64_le(p + header + 8 * i));
  return A;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IOError("read failed: " + path);
  return std::move(ss).str();
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open " + path + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IOError("write failed: " + path);
}

inline DenseMatrix load_matrix(const std::string& path, MatrixFormat format, bool skip_header = false) {
  const std::string bytes = read_file(path);
  return format == MatrixFormat::csv ? parse_csv(bytes, skip_header) : parse_raw(bytes);
}

inline DenseMatrix load_matrix(const std::string& path) {
  return load_matrix(path, format_from_path(path));
}

inline void save_matrix(const std::string& path, const DenseMatrix& A, MatrixFormat format) {
  write_file(path, format == MatrixFormat::csv ? to_csv(A) : to_raw(A));
}

inline void save_matrix(const std::string& path, const DenseMatrix& A) {
  save_matrix(path, A, format_from_path(path));
}

}  // namespace mpid::harness
