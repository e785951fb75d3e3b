#include "ttno/gamma.hpp"

#include "ttno/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <limits>
#include <tuple>
#include <unordered_map>

#include <Eigen/SVD>

namespace ttno {

namespace {

SubtreeDigest index_key(char tag, std::size_t i) {
  return DigestBuilder(tag).add(static_cast<std::uint32_t>(i)).finish();
}

} // namespace

GammaMatrix::GammaMatrix(std::size_t rows, std::size_t cols) : data_(rows) {
  for (std::size_t i = 0; i < rows; ++i)
    row_keys.push_back(index_key('r', i));
  for (std::size_t j = 0; j < cols; ++j)
    col_keys.push_back(index_key('c', j));
}

GammaMatrix GammaMatrix::from_dense(const std::vector<std::vector<Coefficient>> &m) {
  std::size_t cols = m.empty() ? 0 : m.front().size();
  GammaMatrix g(m.size(), cols);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      g.set(i, j, m[i][j]);
  return g;
}

Coefficient GammaMatrix::at(std::size_t i, std::size_t j) const {
  auto it = data_[i].find(static_cast<int>(j));
  return it == data_[i].end() ? Coefficient() : it->second;
}

void GammaMatrix::set(std::size_t i, std::size_t j, const Coefficient &c) {
  if (data_.size() < row_keys.size())
    data_.resize(row_keys.size());
  if (c.is_zero())
    data_[i].erase(static_cast<int>(j));
  else
    data_[i][static_cast<int>(j)] = c;
}

std::size_t GammaMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto &r : data_)
    n += r.size();
  return n;
}

std::vector<std::vector<Coefficient>> GammaMatrix::dense() const {
  std::vector<std::vector<Coefficient>> out(rows(), std::vector<Coefficient>(cols()));
  for (std::size_t i = 0; i < rows(); ++i)
    for (const auto &[j, c] : data_[i])
      out[i][j] = c;
  return out;
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m.set(i, i, 1);
  return m;
}

Rational RationalMatrix::at(std::size_t i, std::size_t j) const {
  auto it = data_.find({static_cast<int>(i), static_cast<int>(j)});
  return it == data_.end() ? Rational(0) : it->second;
}

void RationalMatrix::set(std::size_t i, std::size_t j, const Rational &q) {
  std::pair<int, int> k{static_cast<int>(i), static_cast<int>(j)};
  if (q == 0)
    data_.erase(k);
  else
    data_[k] = q;
}

EliminationRecord identity_record(const GammaMatrix &gamma) {
  return {RationalMatrix::identity(gamma.rows()), gamma,
          RationalMatrix::identity(gamma.cols())};
}

namespace {

using Row = std::map<int, Coefficient>;
using RatLine = std::map<int, Rational>;

/// Working state of Gamma = A * G * B with A stored by columns and B by rows,
/// so that row operations on G touch columns of A and column operations on G
/// touch rows of B.
struct Work {
  std::vector<Row> g;
  std::vector<SubtreeDigest> row_keys, col_keys;
  std::vector<RatLine> a_cols;
  std::vector<RatLine> b_rows;
  std::size_t a_rows = 0, b_cols = 0;

  explicit Work(const GammaMatrix &gamma) {
    a_rows = gamma.rows();
    b_cols = gamma.cols();
    row_keys = gamma.row_keys;
    col_keys = gamma.col_keys;
    for (std::size_t i = 0; i < gamma.rows(); ++i) {
      g.push_back(gamma.row(i));
      a_cols.push_back({{static_cast<int>(i), Rational(1)}});
    }
    for (std::size_t j = 0; j < gamma.cols(); ++j)
      b_rows.push_back({{static_cast<int>(j), Rational(1)}});
  }

  std::size_t rows() const { return g.size(); }
  std::size_t cols() const { return col_keys.size(); }
  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto &r : g)
      n += r.size();
    return n;
  }

  static Coefficient get(const Row &r, int j) {
    auto it = r.find(j);
    return it == r.end() ? Coefficient() : it->second;
  }
  static void put(Row &r, int j, const Coefficient &c) {
    if (c.is_zero())
      r.erase(j);
    else
      r[j] = c;
  }
  static void axpy(RatLine &dst, const RatLine &src, const Rational &q) {
    for (const auto &[k, v] : src) {
      Rational s = dst[k] + q * v;
      if (s == 0)
        dst.erase(k);
      else
        dst[k] = s;
    }
  }

  bool row_op_legal(int k, int i, const Rational &q) const {
    for (const auto &[j, c] : g[i])
      if (!can_add(get(g[k], j), coeff_scale(c, -q)))
        return false;
    return true;
  }
  /// R_k -= q R_i.
  void row_op(int k, int i, const Rational &q) {
    for (const auto &[j, c] : g[i])
      put(g[k], j, coeff_add(get(g[k], j), coeff_scale(c, -q)));
    axpy(a_cols[i], a_cols[k], q);
  }

  bool col_op_legal(int l, int j, const Rational &q) const {
    for (const auto &r : g) {
      auto c = get(r, j);
      if (!c.is_zero() && !can_add(get(r, l), coeff_scale(c, -q)))
        return false;
    }
    return true;
  }
  /// C_l -= q C_j.
  void col_op(int l, int j, const Rational &q) {
    for (auto &r : g) {
      auto c = get(r, j);
      if (!c.is_zero())
        put(r, l, coeff_add(get(r, l), coeff_scale(c, -q)));
    }
    axpy(b_rows[j], b_rows[l], q);
  }

  std::vector<Row> columns() const {
    std::vector<Row> out(cols());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (const auto &[j, c] : g[i])
        out[j][static_cast<int>(i)] = c;
    return out;
  }

  void remove_zero_lines() {
    std::vector<Row> ng;
    std::vector<SubtreeDigest> nrk;
    std::vector<RatLine> na;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].empty())
        continue;
      ng.push_back(std::move(g[i]));
      nrk.push_back(row_keys[i]);
      na.push_back(std::move(a_cols[i]));
    }
    std::vector<bool> used(cols(), false);
    for (const auto &r : ng)
      for (const auto &[j, c] : r)
        used[j] = true;
    std::vector<int> remap(cols(), -1);
    std::vector<SubtreeDigest> nck;
    std::vector<RatLine> nb;
    for (std::size_t j = 0; j < cols(); ++j) {
      if (!used[j])
        continue;
      remap[j] = static_cast<int>(nck.size());
      nck.push_back(col_keys[j]);
      nb.push_back(std::move(b_rows[j]));
    }
    for (auto &r : ng) {
      Row nr;
      for (const auto &[j, c] : r)
        nr[remap[j]] = c;
      r = std::move(nr);
    }
    g = std::move(ng);
    row_keys = std::move(nrk);
    a_cols = std::move(na);
    col_keys = std::move(nck);
    b_rows = std::move(nb);
  }

  EliminationRecord record() const {
    EliminationRecord rec;
    rec.A = RationalMatrix(a_rows, rows());
    for (std::size_t a = 0; a < a_cols.size(); ++a)
      for (const auto &[i, q] : a_cols[a])
        rec.A.set(i, a, q);
    rec.B = RationalMatrix(cols(), b_cols);
    for (std::size_t b = 0; b < b_rows.size(); ++b)
      for (const auto &[j, q] : b_rows[b])
        rec.B.set(b, j, q);
    rec.gamma_tilde = GammaMatrix(rows(), cols());
    rec.gamma_tilde.row_keys = row_keys;
    rec.gamma_tilde.col_keys = col_keys;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (const auto &[j, c] : g[i])
        rec.gamma_tilde.set(i, j, c);
    return rec;
  }
};

/// Ratio q with line == q * base, when both have the same support and the
/// same symbol at every position.
std::optional<Rational> parallel_ratio(const Row &line, const Row &base) {
  if (line.size() != base.size())
    return std::nullopt;
  std::optional<Rational> q;
  for (auto it = line.begin(), jt = base.begin(); it != line.end(); ++it, ++jt) {
    if (it->first != jt->first || it->second.symbol() != jt->second.symbol())
      return std::nullopt;
    Rational r = it->second.rational() / jt->second.rational();
    if (q && *q != r)
      return std::nullopt;
    q = r;
  }
  return q;
}

void deparallelize_work(Work &w) {
  for (std::size_t k = 0; k < w.rows(); ++k) {
    if (w.g[k].size() < 2)
      continue;
    for (std::size_t i = 0; i < k; ++i) {
      if (w.g[i].size() < 2)
        continue;
      if (auto q = parallel_ratio(w.g[k], w.g[i])) {
        w.row_op(static_cast<int>(k), static_cast<int>(i), *q);
        break;
      }
    }
  }
  auto cols = w.columns();
  for (std::size_t l = 0; l < cols.size(); ++l) {
    if (cols[l].size() < 2)
      continue;
    for (std::size_t j = 0; j < l; ++j) {
      if (cols[j].size() < 2)
        continue;
      if (auto q = parallel_ratio(cols[l], cols[j])) {
        w.col_op(static_cast<int>(l), static_cast<int>(j), *q);
        cols[l].clear();
        break;
      }
    }
  }
  w.remove_zero_lines();
}

/// One pass of restricted elimination: rows with pivoting, then columns
/// against the recorded pivots.
void eliminate_once(Work &w) {
  const std::size_t n = w.rows();
  std::vector<bool> pivoted(n, false);
  std::vector<bool> pivot_col(w.cols(), false);
  std::vector<std::pair<int, int>> pivots;

  for (std::size_t i = 0; i < n; ++i) {
    int best = -1;
    std::size_t best_score = 0;
    Rational best_mag;
    for (const auto &[j, c] : w.g[i]) {
      if (pivot_col[j])
        continue;
      std::size_t score = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || pivoted[k])
          continue;
        auto e = Work::get(w.g[k], j);
        if (!e.is_zero() && e.symbol() == c.symbol())
          ++score;
      }
      Rational mag = abs(c.rational());
      if (best < 0 || score > best_score ||
          (score == best_score && mag < best_mag)) {
        best = j;
        best_score = score;
        best_mag = mag;
      }
    }
    pivoted[i] = true;
    if (best < 0)
      continue;
    pivot_col[best] = true;
    pivots.emplace_back(static_cast<int>(i), best);
    const Coefficient p = w.g[i].at(best);
    for (std::size_t k = 0; k < n; ++k) {
      if (pivoted[k])
        continue;
      auto e = Work::get(w.g[k], best);
      if (e.is_zero() || e.symbol() != p.symbol())
        continue;
      Rational q = e.rational() / p.rational();
      if (w.row_op_legal(static_cast<int>(k), static_cast<int>(i), q))
        w.row_op(static_cast<int>(k), static_cast<int>(i), q);
    }
  }

  for (const auto &[i, j] : pivots) {
    auto pit = w.g[i].find(j);
    if (pit == w.g[i].end())
      continue;
    const Coefficient p = pit->second;
    std::vector<std::pair<int, Coefficient>> targets(w.g[i].begin(), w.g[i].end());
    for (const auto &[l, e] : targets) {
      if (l == j || e.symbol() != p.symbol())
        continue;
      Rational q = e.rational() / p.rational();
      if (w.col_op_legal(l, j, q))
        w.col_op(l, j, q);
    }
  }
  w.remove_zero_lines();
}

} // namespace

EliminationRecord deparallelize(const GammaMatrix &gamma) {
  Work w(gamma);
  deparallelize_work(w);
  return w.record();
}

EliminationRecord sge(const GammaMatrix &gamma, int max_iter) {
  if (max_iter < 1)
    throw Error(ErrorCode::BadParams, "max_iter must be at least 1");
  Work w(gamma);
  deparallelize_work(w);
  for (int it = 0; it < max_iter; ++it) {
    if (std::min(w.rows(), w.cols()) <= 1)
      break;
    Work before = w;
    eliminate_once(w);
    auto size_before = std::make_pair(before.rows() + before.cols(), before.nnz());
    auto size_after = std::make_pair(w.rows() + w.cols(), w.nnz());
    if (!(size_after < size_before)) {
      w = std::move(before);
      break;
    }
  }
  return w.record();
}

bool factorization_holds(const GammaMatrix &gamma, const EliminationRecord &rec) {
  const auto &A = rec.A;
  const auto &G = rec.gamma_tilde;
  const auto &B = rec.B;
  if (A.rows() != gamma.rows() || B.cols() != gamma.cols() ||
      A.cols() != G.rows() || G.cols() != B.rows())
    return false;
  using Poly = std::map<std::uint32_t, Rational>;
  // (A G) by rows of A.
  std::vector<std::map<int, Poly>> ag(A.rows());
  for (const auto &[ia, q] : A.entries()) {
    auto [i, a] = ia;
    for (const auto &[b, c] : G.row(a)) {
      auto &p = ag[i][b][c.symbol().id()];
      p += q * c.rational();
    }
  }
  std::vector<std::vector<std::pair<int, Rational>>> brows(B.rows());
  for (const auto &[bj, q] : B.entries())
    brows[bj.first].emplace_back(bj.second, q);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::map<int, Poly> row;
    for (const auto &[b, poly] : ag[i])
      for (const auto &[j, q] : brows[b])
        for (const auto &[s, v] : poly)
          row[j][s] += v * q;
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      Poly p;
      if (auto it = row.find(static_cast<int>(j)); it != row.end())
        for (const auto &[s, v] : it->second)
          if (v != 0)
            p[s] = v;
      auto c = gamma.at(i, j);
      if (c.is_zero()) {
        if (!p.empty())
          return false;
      } else if (p.size() != 1 || p.begin()->first != c.symbol().id() ||
                 p.begin()->second != c.rational()) {
        return false;
      }
    }
  }
  return true;
}

namespace {

std::vector<std::vector<int>> adjacency(const GammaMatrix &gamma) {
  std::vector<std::vector<int>> adj(gamma.rows());
  for (std::size_t i = 0; i < gamma.rows(); ++i)
    for (const auto &[j, c] : gamma.row(i))
      adj[i].push_back(j);
  return adj;
}

} // namespace

Matching hopcroft_karp(const GammaMatrix &gamma) {
  const int n = static_cast<int>(gamma.rows());
  const int m = static_cast<int>(gamma.cols());
  const auto adj = adjacency(gamma);
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> match_row(n, -1), match_col(m, -1), dist(n);

  auto bfs = [&]() {
    std::deque<int> q;
    bool found = false;
    for (int r = 0; r < n; ++r) {
      if (match_row[r] < 0) {
        dist[r] = 0;
        q.push_back(r);
      } else {
        dist[r] = inf;
      }
    }
    while (!q.empty()) {
      int r = q.front();
      q.pop_front();
      for (int c : adj[r]) {
        int r2 = match_col[c];
        if (r2 < 0)
          found = true;
        else if (dist[r2] == inf) {
          dist[r2] = dist[r] + 1;
          q.push_back(r2);
        }
      }
    }
    return found;
  };

  std::vector<std::size_t> next(n);
  std::function<bool(int)> dfs = [&](int r) -> bool {
    for (; next[r] < adj[r].size(); ++next[r]) {
      int c = adj[r][next[r]];
      int r2 = match_col[c];
      if (r2 < 0 || (dist[r2] == dist[r] + 1 && dfs(r2))) {
        match_row[r] = c;
        match_col[c] = r;
        ++next[r];
        return true;
      }
    }
    dist[r] = inf;
    return false;
  };

  while (bfs()) {
    std::fill(next.begin(), next.end(), 0);
    for (int r = 0; r < n; ++r)
      if (match_row[r] < 0)
        dfs(r);
  }
  Matching out;
  for (int r = 0; r < n; ++r)
    if (match_row[r] >= 0)
      out.emplace_back(r, match_row[r]);
  return out;
}

CoverSolution konig_cover(const GammaMatrix &gamma, const Matching &matching) {
  const int n = static_cast<int>(gamma.rows());
  const int m = static_cast<int>(gamma.cols());
  const auto adj = adjacency(gamma);
  std::vector<int> match_row(n, -1), match_col(m, -1);
  for (const auto &[r, c] : matching) {
    if (r < 0 || r >= n || c < 0 || c >= m || gamma.at(r, c).is_zero() ||
        match_row[r] >= 0 || match_col[c] >= 0)
      throw Error(ErrorCode::MatchingNotMaximum, "not a matching of the pattern");
    match_row[r] = c;
    match_col[c] = r;
  }
  std::vector<bool> row_seen(n, false), col_seen(m, false);
  std::deque<int> q;
  for (int r = 0; r < n; ++r)
    if (match_row[r] < 0) {
      row_seen[r] = true;
      q.push_back(r);
    }
  while (!q.empty()) {
    int r = q.front();
    q.pop_front();
    for (int c : adj[r]) {
      if (col_seen[c])
        continue;
      col_seen[c] = true;
      int r2 = match_col[c];
      if (r2 < 0)
        throw Error(ErrorCode::MatchingNotMaximum, "augmenting path exists");
      if (!row_seen[r2]) {
        row_seen[r2] = true;
        q.push_back(r2);
      }
    }
  }
  CoverSolution cover;
  cover.matching = matching;
  for (int r = 0; r < n; ++r)
    if (!row_seen[r])
      cover.rows.push_back(r);
  for (int c = 0; c < m; ++c)
    if (col_seen[c])
      cover.cols.push_back(c);
  if (cover.size() != matching.size())
    throw Error(ErrorCode::MatchingNotMaximum, "cover and matching sizes differ");
  return cover;
}

bool cover_valid(const GammaMatrix &gamma, const CoverSolution &cover) {
  std::vector<bool> rc(gamma.rows(), false), cc(gamma.cols(), false);
  for (int r : cover.rows)
    rc[r] = true;
  for (int c : cover.cols)
    cc[c] = true;
  for (std::size_t i = 0; i < gamma.rows(); ++i)
    for (const auto &[j, c] : gamma.row(i))
      if (!rc[i] && !cc[j])
        return false;
  return true;
}

std::size_t numeric_rank(const GammaMatrix &gamma, const SymbolTable &table,
                         double tol) {
  if (gamma.rows() == 0 || gamma.cols() == 0)
    return 0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(gamma.rows(), gamma.cols());
  for (std::size_t i = 0; i < gamma.rows(); ++i)
    for (const auto &[j, c] : gamma.row(i))
      m(i, j) = instantiate_coefficient(c, table);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto &s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0)
    return 0;
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * s(0))
      ++r;
  return r;
}

} // namespace ttno
