#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "aeicp/linalg.hpp"

namespace aeicp {

// Parse failure with the 1-based line number of the offending input line.
struct MatrixMarketError : std::runtime_error {
  int line;
  MatrixMarketError(int line_no, const std::string& what)
      : std::runtime_error("matrix market, line " + std::to_string(line_no) +
                           ": " + what),
        line(line_no) {}
};

// Reads the Matrix Market exchange format. Accepted headers:
//   %%MatrixMarket matrix {coordinate|array} {real|integer} {general|symmetric}
// Coordinate entries use 1-based indices; unlisted entries are zero; the
// `symmetric` flag mirrors the stored triangle. `complex` and `pattern`
// fields are rejected with a diagnostic naming the line.
DenseMatrix load_matrix_market(std::istream& in);
DenseMatrix load_matrix_market_file(const std::string& path);

// Writes `coordinate real general` with shortest round-trip decimals.
// Exact zeros are not listed, so load(save(load(x))) == load(x) entrywise.
void save_matrix_market(const DenseMatrix& m, std::ostream& out);
void save_matrix_market_file(const DenseMatrix& m, const std::string& path);

}  // namespace aeicp
