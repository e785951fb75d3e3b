#pragma once

#include "ttno/digest.hpp"
#include "ttno/symbolic.hpp"

#include <map>
#include <utility>
#include <vector>

namespace ttno {

/// Sparse matrix of symbolic coefficients between deduplicated root-side
/// fragments (rows) and leaf-side fragments (columns) of one bond.
class GammaMatrix {
public:
  GammaMatrix() = default;
  GammaMatrix(std::size_t rows, std::size_t cols);
  /// Keys are derived from the indices.
  static GammaMatrix from_dense(const std::vector<std::vector<Coefficient>> &m);

  std::size_t rows() const { return row_keys.size(); }
  std::size_t cols() const { return col_keys.size(); }
  Coefficient at(std::size_t i, std::size_t j) const;
  /// Stores c, or erases the entry when c is zero.
  void set(std::size_t i, std::size_t j, const Coefficient &c);
  const std::map<int, Coefficient> &row(std::size_t i) const { return data_[i]; }
  std::size_t nnz() const;
  std::vector<std::vector<Coefficient>> dense() const;

  std::vector<SubtreeDigest> row_keys;
  std::vector<SubtreeDigest> col_keys;

private:
  std::vector<std::map<int, Coefficient>> data_;
};

class RationalMatrix {
public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Rational &q);
  const std::map<std::pair<int, int>, Rational> &entries() const { return data_; }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::map<std::pair<int, int>, Rational> data_;
};

/// Gamma = A * gamma_tilde * B.
struct EliminationRecord {
  RationalMatrix A;
  GammaMatrix gamma_tilde;
  RationalMatrix B;
};

EliminationRecord identity_record(const GammaMatrix &gamma);

/// Zeroes rows (then columns) with at least two nonzeros that are exact
/// rational multiples of an earlier line with the same symbol pattern, and
/// drops the zero lines.
EliminationRecord deparallelize(const GammaMatrix &gamma);

/// De-parallelization followed by restricted row/column elimination.
/// Eliminations that would add different symbols are skipped. An iteration
/// is kept only when it shrinks the matrix or its nonzero count.
EliminationRecord sge(const GammaMatrix &gamma, int max_iter = 10);

/// Symbolic product A * gamma_tilde * B compared entrywise with gamma.
bool factorization_holds(const GammaMatrix &gamma, const EliminationRecord &rec);

using Matching = std::vector<std::pair<int, int>>;

/// Maximum matching on the nonzero pattern; rows and neighbours are scanned
/// in ascending order.
Matching hopcroft_karp(const GammaMatrix &gamma);

struct CoverSolution {
  Matching matching;
  std::vector<int> rows;
  std::vector<int> cols;
  std::size_t size() const { return rows.size() + cols.size(); }
};

/// Minimum vertex cover from alternating reachability out of unmatched
/// rows. Throws MatchingNotMaximum if an augmenting path exists.
CoverSolution konig_cover(const GammaMatrix &gamma, const Matching &matching);

/// Every nonzero entry touches a cover row or column.
bool cover_valid(const GammaMatrix &gamma, const CoverSolution &cover);

/// Rank after substituting numeric symbol values.
std::size_t numeric_rank(const GammaMatrix &gamma, const SymbolTable &table,
                         double tol = 1e-10);

} // namespace ttno
