#include "flexgate/minor_scan.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace flexgate {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Saturates far above the enumeration cap; callers must not multiply two
  // saturated values.
  constexpr std::int64_t kSaturation = 4'000'000'000'000'000LL;
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    if (c > kSaturation / (n - k + i)) return kSaturation;
    c = c * (n - k + i) / i;
  }
  return c;
}

namespace {

// In-place partial-pivot LU determinant; a is k x k row-major and is destroyed.
double lu_det(double* a, int k) {
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::abs(a[col * k + col]);
    for (int r = col + 1; r < k; ++r) {
      const double v = std::abs(a[r * k + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != col) {
      for (int c = col; c < k; ++c) std::swap(a[piv * k + c], a[col * k + c]);
      det = -det;
    }
    const double d = a[col * k + col];
    det *= d;
    for (int r = col + 1; r < k; ++r) {
      const double f = a[r * k + col] / d;
      if (f == 0.0) continue;
      for (int c = col + 1; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
    }
  }
  return det;
}

void validate_index(const RigidityMatrix& r, const MinorIndex& idx) {
  const int k = static_cast<int>(idx.rows.size());
  if (k == 0 || idx.cols.size() != idx.rows.size())
    throw IndexOutOfRange("minor index must select equally many rows and columns");
  for (int i = 0; i < k; ++i) {
    if (idx.rows[i] < 0 || idx.rows[i] >= r.rows() || (i > 0 && idx.rows[i] <= idx.rows[i - 1]))
      throw IndexOutOfRange("row set must be strictly increasing and in range");
    if (idx.cols[i] < 0 || idx.cols[i] >= r.cols() || (i > 0 && idx.cols[i] <= idx.cols[i - 1]))
      throw IndexOutOfRange("column set must be strictly increasing and in range");
  }
}

void gather(const Eigen::MatrixXd& m, const int* rows, const int* cols, int k, double* out) {
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out[r * k + c] = m(rows[r], cols[c]);
}

// Lexicographic combination unranking (combinatorial number system).
void unrank_combination(std::int64_t rank, int n, int k, int* out) {
  int start = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int v = start; v <= n - (k - slot); ++v) {
      const std::int64_t block = binomial(n - v - 1, k - slot - 1);
      if (rank < block) {
        out[slot] = v;
        start = v + 1;
        break;
      }
      rank -= block;
    }
  }
}

bool next_combination(int* comb, int n, int k) {
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

struct ScanAccumulator {
  double max_abs_value = 0.0;
  double max_abs_derivative = 0.0;
  std::int64_t value_offenders = 0;
  std::int64_t deriv_offenders = 0;
  std::vector<MinorOffender> offenders;
};

// Evaluates one minor (value, derivative, offender bookkeeping) into acc.
// scratch must hold 2*k*k doubles; norms 2*k.
void eval_minor(const Eigen::MatrixXd& m, const Eigen::MatrixXd& mdot, const int* rows,
                const int* cols, int k, double value_tol, double deriv_tol, double* scratch,
                double* norms, ScanAccumulator& acc) {
  double* sub = scratch;
  double* work = scratch + k * k;
  gather(m, rows, cols, k, sub);

  double* row_norm = norms;
  double* rate_norm = norms + k;
  for (int r = 0; r < k; ++r) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += sub[r * k + c] * sub[r * k + c];
    row_norm[r] = std::sqrt(s);
  }

  std::copy(sub, sub + k * k, work);
  const double value = lu_det(work, k);

  double deriv = 0.0;
  for (int rr = 0; rr < k; ++rr) {
    std::copy(sub, sub + k * k, work);
    double s = 0.0;
    bool nonzero = false;
    for (int c = 0; c < k; ++c) {
      const double v = mdot(rows[rr], cols[c]);
      work[rr * k + c] = v;
      s += v * v;
      nonzero = nonzero || v != 0.0;
    }
    rate_norm[rr] = std::sqrt(s);
    if (nonzero) deriv += lu_det(work, k);
  }

  // Hadamard-style scales: |det| <= prod row norms; the derivative is bounded
  // by the sum of single-row-replaced Hadamard products.
  double value_scale = 1.0;
  for (int r = 0; r < k; ++r) value_scale *= row_norm[r];
  double deriv_scale = 0.0;
  for (int r = 0; r < k; ++r) {
    double prod = rate_norm[r];
    for (int o = 0; o < k; ++o)
      if (o != r) prod *= row_norm[o];
    deriv_scale += prod;
  }

  acc.max_abs_value = std::max(acc.max_abs_value, std::abs(value));
  acc.max_abs_derivative = std::max(acc.max_abs_derivative, std::abs(deriv));
  const bool value_off = std::abs(value) > value_tol * value_scale;
  const bool deriv_off = std::abs(deriv) > deriv_tol * deriv_scale;
  if (value_off) ++acc.value_offenders;
  if (deriv_off) ++acc.deriv_offenders;
  if ((value_off || deriv_off) &&
      acc.offenders.size() < static_cast<size_t>(kMaxRetainedOffenders)) {
    MinorOffender off;
    off.idx.rows.assign(rows, rows + k);
    off.idx.cols.assign(cols, cols + k);
    off.value = value;
    off.derivative = deriv;
    acc.offenders.push_back(std::move(off));
  }
}

void merge(ScanAccumulator& into, const ScanAccumulator& from) {
  into.max_abs_value = std::max(into.max_abs_value, from.max_abs_value);
  into.max_abs_derivative = std::max(into.max_abs_derivative, from.max_abs_derivative);
  into.value_offenders += from.value_offenders;
  into.deriv_offenders += from.deriv_offenders;
  for (const auto& off : from.offenders) {
    if (into.offenders.size() >= static_cast<size_t>(kMaxRetainedOffenders)) break;
    into.offenders.push_back(off);
  }
}

}  // namespace

double minor_value(const RigidityMatrix& r, const MinorIndex& idx) {
  validate_index(r, idx);
  const int k = static_cast<int>(idx.rows.size());
  std::vector<double> buf(k * k);
  gather(r.entries, idx.rows.data(), idx.cols.data(), k, buf.data());
  return lu_det(buf.data(), k);
}

double minor_directional_derivative(const Polyhedron& p, const FirstOrderFlex& flex,
                                    const MinorIndex& idx) {
  const RigidityMatrix m = rigidity_matrix(p);
  const RigidityMatrix mdot = rigidity_matrix_rate(p, flex);
  validate_index(m, idx);
  const int k = static_cast<int>(idx.rows.size());
  std::vector<double> sub(k * k), work(k * k);
  gather(m.entries, idx.rows.data(), idx.cols.data(), k, sub.data());
  double deriv = 0.0;
  for (int rr = 0; rr < k; ++rr) {
    std::copy(sub.begin(), sub.end(), work.begin());
    for (int c = 0; c < k; ++c) work[rr * k + c] = mdot.entries(idx.rows[rr], idx.cols[c]);
    deriv += lu_det(work.data(), k);
  }
  return deriv;
}

MinorReport minor_stationarity_report(const Polyhedron& p, const FirstOrderFlex& flex, int k,
                                      const MinorStrategy& strategy, double value_tol,
                                      double deriv_tol, ScanMode mode, double flex_tol) {
  require_first_order_flex(p, flex, flex_tol);
  const RigidityMatrix m = rigidity_matrix(p);
  const RigidityMatrix mdot = rigidity_matrix_rate(p, flex);
  const int n_rows = m.rows();
  const int n_cols = m.cols();
  if (k < 1 || k > n_rows || k > n_cols)
    throw IndexOutOfRange("minor size " + std::to_string(k) + " out of range for " +
                          std::to_string(n_rows) + "x" + std::to_string(n_cols) + " matrix");

  MinorReport rep;
  rep.k = k;
  rep.strategy = strategy;

  // Work items are either a contiguous range of the flattened FULL enumeration
  // (rowRank * nColSets + colRank) or a range of pre-drawn samples. Chunks are
  // merged in index order, so Serial and Parallel produce identical reports.
  const std::int64_t n_row_sets = binomial(n_rows, k);
  const std::int64_t n_col_sets = binomial(n_cols, k);

  std::vector<int> sample_pool;  // Sampled: 2*k ints per draw (rows then cols)
  std::int64_t total = 0;
  if (strategy.kind == MinorStrategy::Kind::Full) {
    if (n_row_sets > kFullEnumerationCap || n_col_sets > kFullEnumerationCap ||
        n_row_sets * n_col_sets > kFullEnumerationCap)
      throw EnumerationTooLarge("FULL enumeration of " + std::to_string(n_row_sets) + "x" +
                                std::to_string(n_col_sets) + " minors exceeds cap " +
                                std::to_string(kFullEnumerationCap));
    total = n_row_sets * n_col_sets;
  } else {
    total = strategy.samples;
    std::mt19937_64 rng(strategy.seed);
    sample_pool.reserve(2 * k * total);
    std::vector<int> row_ids(n_rows), col_ids(n_cols);
    for (int i = 0; i < n_rows; ++i) row_ids[i] = i;
    for (int i = 0; i < n_cols; ++i) col_ids[i] = i;
    auto draw = [&](std::vector<int>& ids, int n) {
      for (int slot = 0; slot < k; ++slot) {
        std::uniform_int_distribution<int> pick(slot, n - 1);
        std::swap(ids[slot], ids[pick(rng)]);
      }
      sample_pool.insert(sample_pool.end(), ids.begin(), ids.begin() + k);
      std::sort(sample_pool.end() - k, sample_pool.end());
    };
    for (std::int64_t s = 0; s < total; ++s) {
      draw(row_ids, n_rows);
      draw(col_ids, n_cols);
    }
  }
  rep.minor_count = total;

  const std::int64_t chunk_size = 4096;
  const std::int64_t n_chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<ScanAccumulator> chunk_acc(n_chunks);

  auto run_chunk = [&](std::int64_t chunk) {
    const std::int64_t begin = chunk * chunk_size;
    const std::int64_t end = std::min(begin + chunk_size, total);
    ScanAccumulator& acc = chunk_acc[chunk];
    std::vector<double> scratch(2 * k * k), norms(2 * k);
    std::vector<int> rows(k), cols(k);
    if (strategy.kind == MinorStrategy::Kind::Full) {
      std::int64_t row_rank = begin / n_col_sets;
      std::int64_t col_rank = begin % n_col_sets;
      unrank_combination(row_rank, n_rows, k, rows.data());
      unrank_combination(col_rank, n_cols, k, cols.data());
      for (std::int64_t i = begin; i < end; ++i) {
        eval_minor(m.entries, mdot.entries, rows.data(), cols.data(), k, value_tol, deriv_tol,
                   scratch.data(), norms.data(), acc);
        if (i + 1 == end) break;
        if (!next_combination(cols.data(), n_cols, k)) {
          for (int s = 0; s < k; ++s) cols[s] = s;
          next_combination(rows.data(), n_rows, k);
        }
      }
    } else {
      for (std::int64_t i = begin; i < end; ++i) {
        const int* base = sample_pool.data() + 2 * k * i;
        eval_minor(m.entries, mdot.entries, base, base + k, k, value_tol, deriv_tol,
                   scratch.data(), norms.data(), acc);
      }
    }
  };

  if (mode == ScanMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t chunk = 0; chunk < n_chunks; ++chunk) run_chunk(chunk);
  } else {
    for (std::int64_t chunk = 0; chunk < n_chunks; ++chunk) run_chunk(chunk);
  }

  ScanAccumulator final_acc;
  for (const auto& acc : chunk_acc) merge(final_acc, acc);
  rep.max_abs_value = final_acc.max_abs_value;
  rep.max_abs_derivative = final_acc.max_abs_derivative;
  rep.value_offender_count = final_acc.value_offenders;
  rep.derivative_offender_count = final_acc.deriv_offenders;
  rep.offenders = std::move(final_acc.offenders);
  rep.all_values_vanish = rep.value_offender_count == 0;
  rep.all_derivatives_vanish = rep.derivative_offender_count == 0;
  return rep;
}

std::pair<int, std::vector<double>> rank_profile(const RigidityMatrix& r, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.entries);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * smax) ++rank;
  return {rank, std::vector<double>(sv.data(), sv.data() + sv.size())};
}

int minimal_vanishing_size(const RigidityMatrix& r, double rank_tol) {
  return rank_profile(r, rank_tol).first + 1;
}

}  // namespace flexgate
