#include "aeicp/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace aeicp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct LineReader {
  std::istream& in;
  int line_no = 0;

  // Next non-comment, non-blank line. Returns false at EOF.
  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      std::size_t start = raw.find_first_not_of(" \t\r\n");
      if (start == std::string::npos) continue;
      if (raw[start] == '%') continue;
      out = raw;
      return true;
    }
    return false;
  }
};

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string t;
  while (iss >> t) out.push_back(t);
  return out;
}

long parse_index(const std::string& t, int line_no) {
  long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw MatrixMarketError(line_no, "expected an integer, got '" + t + "'");
  return v;
}

double parse_real(const std::string& t, int line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size())
      throw MatrixMarketError(line_no, "non-numeric token '" + t + "'");
    return v;
  } catch (const MatrixMarketError&) {
    throw;
  } catch (const std::exception&) {
    throw MatrixMarketError(line_no, "non-numeric token '" + t + "'");
  }
}

}  // namespace

DenseMatrix load_matrix_market(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner)) throw MatrixMarketError(1, "empty input");
  auto head = tokens(banner);
  if (head.size() != 5 || head[0] != "%%MatrixMarket")
    throw MatrixMarketError(1, "malformed header banner");
  const std::string object = lower(head[1]);
  const std::string format = lower(head[2]);
  const std::string field = lower(head[3]);
  const std::string symmetry = lower(head[4]);
  if (object != "matrix")
    throw MatrixMarketError(1, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    throw MatrixMarketError(1, "unsupported format '" + format + "'");
  if (field == "complex" || field == "pattern")
    throw MatrixMarketError(1, "unsupported field '" + field + "'");
  if (field != "real" && field != "integer")
    throw MatrixMarketError(1, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw MatrixMarketError(1, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  LineReader reader{in, 1};
  std::string line;
  if (!reader.next(line)) throw MatrixMarketError(reader.line_no, "missing size line");
  auto size_toks = tokens(line);

  if (format == "coordinate") {
    if (size_toks.size() != 3)
      throw MatrixMarketError(reader.line_no, "coordinate size line needs 'rows cols nnz'");
    const long rows = parse_index(size_toks[0], reader.line_no);
    const long cols = parse_index(size_toks[1], reader.line_no);
    const long nnz = parse_index(size_toks[2], reader.line_no);
    if (rows < 0 || cols < 0 || nnz < 0)
      throw MatrixMarketError(reader.line_no, "negative dimension");
    if (symmetric && rows != cols)
      throw MatrixMarketError(reader.line_no, "symmetric matrix must be square");
    DenseMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    std::vector<char> seen(static_cast<std::size_t>(rows) * std::max<long>(cols, 1), 0);
    for (long e = 0; e < nnz; ++e) {
      if (!reader.next(line))
        throw MatrixMarketError(reader.line_no,
                                "expected " + std::to_string(nnz) + " entries, got " +
                                    std::to_string(e));
      auto toks = tokens(line);
      if (toks.size() != 3)
        throw MatrixMarketError(reader.line_no, "coordinate entry needs 'i j value'");
      const long i = parse_index(toks[0], reader.line_no);
      const long j = parse_index(toks[1], reader.line_no);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw MatrixMarketError(reader.line_no, "index out of bounds");
      const double v = parse_real(toks[2], reader.line_no);
      auto flat = static_cast<std::size_t>(i - 1) * cols + (j - 1);
      if (seen[flat])
        throw MatrixMarketError(reader.line_no, "duplicate coordinate entry");
      seen[flat] = 1;
      m(static_cast<int>(i - 1), static_cast<int>(j - 1)) = v;
      if (symmetric && i != j) m(static_cast<int>(j - 1), static_cast<int>(i - 1)) = v;
    }
    if (reader.next(line))
      throw MatrixMarketError(reader.line_no, "trailing data after declared entries");
    return m;
  }

  // array format: dense column-major values; symmetric stores the lower triangle.
  if (size_toks.size() != 2)
    throw MatrixMarketError(reader.line_no, "array size line needs 'rows cols'");
  const long rows = parse_index(size_toks[0], reader.line_no);
  const long cols = parse_index(size_toks[1], reader.line_no);
  if (rows < 0 || cols < 0) throw MatrixMarketError(reader.line_no, "negative dimension");
  if (symmetric && rows != cols)
    throw MatrixMarketError(reader.line_no, "symmetric matrix must be square");
  DenseMatrix m(static_cast<int>(rows), static_cast<int>(cols));

  std::vector<std::pair<int, int>> order;  // (row, col) fill order
  for (long j = 0; j < cols; ++j)
    for (long i = symmetric ? j : 0; i < rows; ++i)
      order.emplace_back(static_cast<int>(i), static_cast<int>(j));

  std::size_t filled = 0;
  while (filled < order.size()) {
    if (!reader.next(line))
      throw MatrixMarketError(reader.line_no,
                              "expected " + std::to_string(order.size()) +
                                  " values, got " + std::to_string(filled));
    for (const auto& tok : tokens(line)) {
      if (filled >= order.size())
        throw MatrixMarketError(reader.line_no, "trailing data after declared entries");
      const double v = parse_real(tok, reader.line_no);
      auto [i, j] = order[filled++];
      m(i, j) = v;
      if (symmetric && i != j) m(j, i) = v;
    }
  }
  if (reader.next(line))
    throw MatrixMarketError(reader.line_no, "trailing data after declared entries");
  return m;
}

DenseMatrix load_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_matrix_market(in);
}

namespace {

std::string shortest_decimal(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

void save_matrix_market(const DenseMatrix& m, std::ostream& out) {
  long nnz = 0;
  for (double v : m.data)
    if (v != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows << ' ' << m.cols << ' ' << nnz << '\n';
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (m(i, j) != 0.0)
        out << (i + 1) << ' ' << (j + 1) << ' ' << shortest_decimal(m(i, j)) << '\n';
}

void save_matrix_market_file(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_matrix_market(m, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace aeicp
