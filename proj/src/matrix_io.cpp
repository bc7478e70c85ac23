#include "xcca/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace xcca {
namespace {

static_assert(std::endian::native == std::endian::little,
              "MXB I/O assumes a little-endian host");

constexpr std::array<char, 4> kMxbMagic = {'M', 'X', 'B', '1'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T read_le(std::istream& in, std::string_view what) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw IngestError(std::string(what) + ": truncated MXB data");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".mxb" ? MatrixFormat::kMxb : MatrixFormat::kCsv;
}

Matrix parse_csv(std::string_view text, std::string_view what) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto cells = split_cells(line);
    double first = 0.0;
    if (first_content_line && !parse_double(cells.front(), first)) {
      first_content_line = false;  // header line
      continue;
    }
    first_content_line = false;
    ++rows;
    if (cols == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      throw IngestError(std::string(what) + ": ragged row " + std::to_string(rows) + " (expected " +
                        std::to_string(cols) + " cells, got " + std::to_string(cells.size()) + ")");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw IngestError(std::string(what) + ": malformed cell at row " + std::to_string(rows) +
                          ", col " + std::to_string(c + 1) + " (line " + std::to_string(line_no) + ")");
      }
      values.push_back(v);
    }
    if (nl == text.size()) break;
  }
  if (rows == 0 || cols == 0) throw IngestError(std::string(what) + ": no numeric rows");

  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
    }
  }
  require_finite(m, std::string(what));
  return m;
}

void write_mxb(std::ostream& out, const Matrix& m) {
  out.write(kMxbMagic.data(), kMxbMagic.size());
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) write_le<double>(out, m(i, j));
  }
}

Matrix read_mxb(std::istream& in, std::string_view what) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMxbMagic) {
    throw IngestError(std::string(what) + ": bad MXB magic");
  }
  const auto rows = read_le<std::uint64_t>(in, what);
  const auto cols = read_le<std::uint64_t>(in, what);
  if (rows == 0 || cols == 0) throw IngestError(std::string(what) + ": empty MXB matrix");
  if (rows > (std::uint64_t{1} << 40) / cols) throw IngestError(std::string(what) + ": MXB shape too large");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = read_le<double>(in, what);
  }
  require_finite(m, std::string(what));
  return m;
}

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string what = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(what + ": cannot open file");
  if (format == MatrixFormat::kMxb) {
    Matrix m = read_mxb(in, what);
    if (in.peek() != std::char_traits<char>::eof()) throw IngestError(what + ": trailing bytes after MXB data");
    return m;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), what);
}

Matrix load_matrix(const std::filesystem::path& path) { return load_matrix(path, format_from_path(path)); }

void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  if (format == MatrixFormat::kMxb) {
    write_mxb(out, m);
  } else {
    std::string line;
    char buf[32];
    for (Index i = 0; i < m.rows(); ++i) {
      line.clear();
      for (Index j = 0; j < m.cols(); ++j) {
        if (j > 0) line += ',';
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), m(i, j));
        line.append(buf, ptr);
      }
      line += '\n';
      out << line;
    }
  }
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  save_matrix(m, path, format_from_path(path));
}

}  // namespace xcca
