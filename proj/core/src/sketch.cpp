#include "gave/sketch.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>

#include "gave/linalg.hpp"

namespace gave {

namespace {

// lambda_max((S^T A)(S^T A)^T) through the smaller Gram matrix.
double spectral_norm_sq_small(const Matrix& R) {
  if (R.size() == 0) return 0.0;
  if (R.rows() <= R.cols()) {
    return std::max(0.0, lambda_max_sym(Matrix(R * R.transpose())));
  }
  return std::max(0.0, lambda_max_sym(Matrix(R.transpose() * R)));
}

bool is_pow2(Eigen::Index v) { return v >= 1 && (v & (v - 1)) == 0; }

// Draws p distinct indices from [0, m) uniformly (partial Fisher-Yates),
// returned sorted.
std::vector<int> draw_subset(int m, int p, RngStream& rng) {
  std::vector<int> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < p; ++k) {
    int j = k + static_cast<int>(rng.uniform_int(m - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(p);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<int> permutation(int m, RngStream& rng) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = m - 1; k > 0; --k) {
    int j = static_cast<int>(rng.uniform_int(k + 1));
    std::swap(perm[k], perm[j]);
  }
  return perm;
}

Vector row_residual(const GaveProblem& problem, const std::vector<int>& rows,
                    const Vector& x, const Vector& abs_x) {
  Vector r(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int i = rows[k];
    r(k) = problem.A().row(i).dot(x) - problem.B().row(i).dot(abs_x) -
           problem.b()(i);
  }
  return r;
}

// Column j of the unnormalized Hadamard matrix H_m.
Vector hadamard_column(Eigen::Index m, int j) {
  Vector e = Vector::Zero(m);
  e(j) = 1.0;
  fwht(e);
  return e;
}

}  // namespace

const char* to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Picard: return "picard";
    case SketchKind::FullGradient: return "gradient";
    case SketchKind::RowKaczmarz: return "rk";
    case SketchKind::BlockKaczmarz: return "rbk";
    case SketchKind::AverageBlock: return "rabk";
    case SketchKind::UniformSample: return "uniform";
    case SketchKind::CountSketch: return "countsketch";
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Srht: return "srht";
  }
  return "?";
}

SketchKind sketch_kind_from_string(const std::string& name) {
  for (SketchKind k :
       {SketchKind::Picard, SketchKind::FullGradient, SketchKind::RowKaczmarz,
        SketchKind::BlockKaczmarz, SketchKind::AverageBlock,
        SketchKind::UniformSample, SketchKind::CountSketch, SketchKind::Gaussian,
        SketchKind::Srht}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown sketch kind: " + name);
}

void fwht(Vector& v) {
  const Eigen::Index m = v.size();
  if (!is_pow2(m)) {
    throw std::invalid_argument(
        "fwht requires a power-of-two length (got " + std::to_string(m) +
        "); zero-pad the input, e.g. with pad_rows_pow2");
  }
  for (Eigen::Index h = 1; h < m; h *= 2) {
    for (Eigen::Index i = 0; i < m; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const double a = v(j);
        const double b = v(j + h);
        v(j) = a + b;
        v(j + h) = a - b;
      }
    }
  }
}

Vector fwht_copy(Vector v) {
  fwht(v);
  return v;
}

GaveProblem pad_rows_pow2(const GaveProblem& problem) {
  Eigen::Index m = problem.m();
  Eigen::Index mp = 1;
  while (mp < m) mp *= 2;
  if (mp == m) return problem;
  Matrix A = Matrix::Zero(mp, problem.n());
  Matrix B = Matrix::Zero(mp, problem.n());
  Vector b = Vector::Zero(mp);
  A.topRows(m) = problem.A();
  B.topRows(m) = problem.B();
  b.head(m) = problem.b();
  return GaveProblem(std::move(A), std::move(B), std::move(b),
                     problem.known_solution(), problem.seed());
}

Paving build_paving(const Matrix& A, int t, RngStream& rng) {
  const int m = static_cast<int>(A.rows());
  if (t < 1 || t > m) {
    throw std::invalid_argument("build_paving requires 1 <= t <= m");
  }
  std::vector<int> perm = permutation(m, rng);
  Paving paving;
  paving.blocks.resize(t);
  // First (m % t) blocks get the extra row.
  const int base = m / t, extra = m % t;
  int pos = 0;
  for (int i = 0; i < t; ++i) {
    const int size = base + (i < extra ? 1 : 0);
    paving.blocks[i].assign(perm.begin() + pos, perm.begin() + pos + size);
    std::sort(paving.blocks[i].begin(), paving.blocks[i].end());
    pos += size;
  }
  paving.beta1 = std::numeric_limits<double>::infinity();
  paving.beta2 = 0.0;
  for (const auto& block : paving.blocks) {
    Matrix AJ = select_rows(A, block);
    Matrix gram = AJ * AJ.transpose();
    paving.beta1 = std::min(paving.beta1, lambda_min_sym(gram));
    paving.beta2 = std::max(paving.beta2, lambda_max_sym(gram));
  }
  return paving;
}

VarpiPartition build_varpi_partition(int m, int p, RngStream& rng) {
  if (p < 1 || p > m) {
    throw std::invalid_argument("varpi partition requires 1 <= p <= m");
  }
  std::vector<int> perm = permutation(m, rng);
  VarpiPartition part;
  const int t = (m + p - 1) / p;
  part.blocks.resize(t);
  for (int i = 0; i < t; ++i) {
    const int lo = i * p;
    const int hi = std::min(m, (i + 1) * p);
    part.blocks[i].assign(perm.begin() + lo, perm.begin() + hi);
    std::sort(part.blocks[i].begin(), part.blocks[i].end());
  }
  return part;
}

double varpi_norm_sq(const Matrix& A, const VarpiPartition& partition) {
  double sum = 0.0;
  for (const auto& block : partition.blocks) {
    sum += spectral_norm_sq_small(select_rows(A, block));
  }
  return sum;
}

SketchDistribution::SketchDistribution(SketchKind kind, const Matrix& A,
                                       Options opts, RngStream rng)
    : kind_(kind), m_(A.rows()), n_(A.cols()), opts_(opts) {
  if (A.norm() == 0.0) {
    throw PreconditionError("sketch distribution requires a nonzero matrix A");
  }
  const bool uses_p = kind == SketchKind::AverageBlock ||
                      kind == SketchKind::UniformSample ||
                      kind == SketchKind::CountSketch ||
                      kind == SketchKind::Gaussian || kind == SketchKind::Srht;
  if (uses_p && (opts_.p < 1 || opts_.p > m_)) {
    throw PreconditionError("block size p must satisfy 1 <= p <= m (p = " +
                            std::to_string(opts_.p) + ", m = " +
                            std::to_string(m_) + ")");
  }
  switch (kind_) {
    case SketchKind::Picard:
      pinv_ = pseudo_inverse(A);
      break;
    case SketchKind::FullGradient:
      norm_a2_sq_ = spectral_norm_sq_small(A);
      break;
    case SketchKind::RowKaczmarz: {
      row_cumsum_.resize(m_);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        acc += A.row(i).squaredNorm();
        row_cumsum_[i] = acc;
      }
      break;
    }
    case SketchKind::BlockKaczmarz: {
      int t = opts_.t > 0 ? opts_.t
                          : static_cast<int>((m_ + opts_.p - 1) / opts_.p);
      paving_ = build_paving(A, t, rng);
      block_pinv_.reserve(paving_.blocks.size());
      for (const auto& block : paving_.blocks) {
        block_pinv_.push_back(pseudo_inverse(select_rows(A, block)));
      }
      break;
    }
    case SketchKind::AverageBlock: {
      varpi_ = build_varpi_partition(static_cast<int>(m_), opts_.p, rng);
      block_norm_sq_.reserve(varpi_.blocks.size());
      double acc = 0.0;
      for (const auto& block : varpi_.blocks) {
        const double nsq = spectral_norm_sq_small(select_rows(A, block));
        block_norm_sq_.push_back(nsq);
        acc += nsq;
        block_cumsum_.push_back(acc);
      }
      varpi_norm_sq_ = acc;
      break;
    }
    case SketchKind::UniformSample:
    case SketchKind::CountSketch:
    case SketchKind::Gaussian:
      break;
    case SketchKind::Srht:
      if (!is_pow2(m_)) {
        throw PreconditionError(
            "SRHT requires the row count to be a power of two; pad the "
            "problem with pad_rows_pow2 first (m = " + std::to_string(m_) + ")");
      }
      break;
  }
}

int SketchDistribution::effective_block_size() const {
  switch (kind_) {
    case SketchKind::Picard:
    case SketchKind::FullGradient:
      return static_cast<int>(m_);
    case SketchKind::RowKaczmarz:
      return 1;
    case SketchKind::BlockKaczmarz:
      return static_cast<int>((m_ + paving_.blocks.size() - 1) /
                              paving_.blocks.size());
    default:
      return opts_.p;
  }
}

const Paving& SketchDistribution::paving() const {
  if (kind_ != SketchKind::BlockKaczmarz) {
    throw std::logic_error("paving() is only defined for the rbk kind");
  }
  return paving_;
}

const VarpiPartition& SketchDistribution::varpi_partition() const {
  if (kind_ != SketchKind::AverageBlock) {
    throw std::logic_error("varpi_partition() is only defined for the rabk kind");
  }
  return varpi_;
}

double SketchDistribution::varpi_norm_sq() const {
  if (kind_ != SketchKind::AverageBlock) {
    throw std::logic_error("varpi_norm_sq() is only defined for the rabk kind");
  }
  return varpi_norm_sq_;
}

SketchSample SketchDistribution::draw(const Matrix& A, RngStream& rng,
                                      DrawState* state) const {
  if (A.rows() != m_ || A.cols() != n_) {
    throw std::invalid_argument("draw: matrix dimensions differ from the ones "
                                "the distribution was built for");
  }
  SketchSample s;
  s.kind = kind_;
  switch (kind_) {
    case SketchKind::Picard:
      s.norm_sq_sa = 1.0;  // ||A^+ A||_2 = 1 for A != 0
      break;
    case SketchKind::FullGradient:
      s.norm_sq_sa = norm_a2_sq_;
      break;
    case SketchKind::RowKaczmarz: {
      const double total = row_cumsum_.back();
      const double u = rng.uniform() * total;
      const auto it = std::upper_bound(row_cumsum_.begin(), row_cumsum_.end(), u);
      const int i = static_cast<int>(it - row_cumsum_.begin());
      s.indices = {std::min(i, static_cast<int>(m_) - 1)};
      s.norm_sq_sa = A.row(s.indices[0]).squaredNorm();
      break;
    }
    case SketchKind::BlockKaczmarz: {
      const std::size_t t = paving_.blocks.size();
      if (opts_.without_replacement) {
        if (state == nullptr) {
          throw std::invalid_argument(
              "without-replacement block selection needs a caller-owned DrawState");
        }
        if (state->position >= state->order.size()) {
          state->order.resize(t);
          std::iota(state->order.begin(), state->order.end(), 0);
          for (std::size_t k = t - 1; k > 0; --k) {
            std::size_t j = rng.uniform_int(k + 1);
            std::swap(state->order[k], state->order[j]);
          }
          state->position = 0;
        }
        s.block_index = state->order[state->position++];
      } else {
        s.block_index = static_cast<int>(rng.uniform_int(t));
      }
      s.indices = paving_.blocks[s.block_index];
      s.zero_overlap = block_pinv_[s.block_index].norm() == 0.0;
      s.norm_sq_sa = s.zero_overlap ? 0.0 : 1.0;
      break;
    }
    case SketchKind::AverageBlock: {
      const double total = block_cumsum_.back();
      const double u = rng.uniform() * total;
      const auto it = std::upper_bound(block_cumsum_.begin(), block_cumsum_.end(), u);
      s.block_index = std::min(static_cast<int>(it - block_cumsum_.begin()),
                               static_cast<int>(varpi_.blocks.size()) - 1);
      s.indices = varpi_.blocks[s.block_index];
      s.norm_sq_sa = block_norm_sq_[s.block_index];
      s.zero_overlap = s.norm_sq_sa == 0.0;
      break;
    }
    case SketchKind::UniformSample:
    case SketchKind::CountSketch: {
      s.indices = draw_subset(static_cast<int>(m_), opts_.p, rng);
      if (kind_ == SketchKind::CountSketch) {
        s.signs.resize(opts_.p);
        for (int k = 0; k < opts_.p; ++k)
          s.signs(k) = rng.next_u64() & 1 ? 1.0 : -1.0;
      }
      s.norm_sq_sa = spectral_norm_sq_small(select_rows(A, s.indices));
      s.zero_overlap = s.norm_sq_sa == 0.0;
      break;
    }
    case SketchKind::Gaussian: {
      s.dense.resize(m_, opts_.p);
      for (Eigen::Index j = 0; j < opts_.p; ++j)
        for (Eigen::Index i = 0; i < m_; ++i) s.dense(i, j) = rng.normal();
      s.norm_sq_sa = spectral_norm_sq_small(Matrix(s.dense.transpose() * A));
      s.zero_overlap = s.norm_sq_sa == 0.0;
      break;
    }
    case SketchKind::Srht: {
      s.signs.resize(m_);
      for (Eigen::Index i = 0; i < m_; ++i)
        s.signs(i) = rng.next_u64() & 1 ? 1.0 : -1.0;
      s.indices = draw_subset(static_cast<int>(m_), opts_.p, rng);
      const double scale = std::sqrt(static_cast<double>(m_) / opts_.p);
      // Row k of S^T A is scale * (H e_{J_k} (*) signs)^T A.
      s.dense.resize(opts_.p, n_);
      for (int k = 0; k < opts_.p; ++k) {
        Vector h = hadamard_column(m_, s.indices[k]).cwiseProduct(s.signs);
        s.dense.row(k) = scale * (h.transpose() * A);
      }
      s.norm_sq_sa = spectral_norm_sq_small(s.dense);
      s.zero_overlap = s.norm_sq_sa == 0.0;
      break;
    }
  }
  return s;
}

Vector SketchDistribution::scaled_direction(const SketchSample& sample,
                                            const GaveProblem& problem,
                                            const Vector& x,
                                            const Vector& abs_x) const {
  if (sample.zero_overlap) return Vector::Zero(n_);
  switch (sample.kind) {
    case SketchKind::Picard: {
      Vector r = problem.A() * x - problem.B() * abs_x - problem.b();
      return pinv_ * r;  // A^T S S^T r = A^+ r for S = (A^+)^T
    }
    case SketchKind::FullGradient: {
      Vector r = problem.A() * x - problem.B() * abs_x - problem.b();
      return problem.A().transpose() * r / sample.norm_sq_sa;
    }
    case SketchKind::RowKaczmarz: {
      const int i = sample.indices[0];
      const double r = problem.A().row(i).dot(x) -
                       problem.B().row(i).dot(abs_x) - problem.b()(i);
      return problem.A().row(i).transpose() * (r / sample.norm_sq_sa);
    }
    case SketchKind::BlockKaczmarz: {
      Vector r = row_residual(problem, sample.indices, x, abs_x);
      return block_pinv_[sample.block_index] * r;  // (A_J)^+ r_J
    }
    case SketchKind::AverageBlock:
    case SketchKind::UniformSample:
    case SketchKind::CountSketch: {
      // Signs cancel in S S^T, so CountSketch shares the selector update.
      Vector r = row_residual(problem, sample.indices, x, abs_x);
      Vector dir = Vector::Zero(n_);
      for (std::size_t k = 0; k < sample.indices.size(); ++k) {
        dir += problem.A().row(sample.indices[k]).transpose() * r(k);
      }
      return dir / sample.norm_sq_sa;
    }
    case SketchKind::Gaussian: {
      Vector r = problem.A() * x - problem.B() * abs_x - problem.b();
      Vector y = sample.dense.transpose() * r;
      return problem.A().transpose() * (sample.dense * y) / sample.norm_sq_sa;
    }
    case SketchKind::Srht: {
      Vector r = problem.A() * x - problem.B() * abs_x - problem.b();
      Vector hr = fwht_copy(sample.signs.cwiseProduct(r));
      const double scale = std::sqrt(static_cast<double>(m_) / opts_.p);
      Vector y(opts_.p);
      for (int k = 0; k < opts_.p; ++k) y(k) = scale * hr(sample.indices[k]);
      return sample.dense.transpose() * y / sample.norm_sq_sa;  // (S^T A)^T y
    }
  }
  return Vector::Zero(n_);
}

Matrix SketchDistribution::dense_S(const SketchSample& sample,
                                   const Matrix& A) const {
  switch (sample.kind) {
    case SketchKind::Picard:
      return pinv_.transpose();
    case SketchKind::FullGradient:
      return Matrix::Identity(m_, m_);
    case SketchKind::RowKaczmarz: {
      Matrix S = Matrix::Zero(m_, 1);
      S(sample.indices[0], 0) = 1.0;
      return S;
    }
    case SketchKind::BlockKaczmarz: {
      // S = I_{:,J} ((A_J)^+)^T, an m x n matrix supported on rows J.
      Matrix S = Matrix::Zero(m_, n_);
      const Matrix& pinv = block_pinv_[sample.block_index];
      for (std::size_t k = 0; k < sample.indices.size(); ++k) {
        S.row(sample.indices[k]) = pinv.col(static_cast<Eigen::Index>(k));
      }
      return S;
    }
    case SketchKind::AverageBlock:
    case SketchKind::UniformSample: {
      Matrix S = Matrix::Zero(m_, static_cast<Eigen::Index>(sample.indices.size()));
      for (std::size_t k = 0; k < sample.indices.size(); ++k)
        S(sample.indices[k], static_cast<Eigen::Index>(k)) = 1.0;
      return S;
    }
    case SketchKind::CountSketch: {
      Matrix S = Matrix::Zero(m_, static_cast<Eigen::Index>(sample.indices.size()));
      for (std::size_t k = 0; k < sample.indices.size(); ++k)
        S(sample.indices[k], static_cast<Eigen::Index>(k)) = sample.signs(k);
      return S;
    }
    case SketchKind::Gaussian:
      return sample.dense;
    case SketchKind::Srht: {
      const double scale = std::sqrt(static_cast<double>(m_) / opts_.p);
      Matrix S(m_, opts_.p);
      for (std::size_t k = 0; k < sample.indices.size(); ++k) {
        S.col(static_cast<Eigen::Index>(k)) =
            scale * hadamard_column(m_, sample.indices[k]).cwiseProduct(sample.signs);
      }
      return S;
    }
  }
  (void)A;
  return Matrix();
}

ExpectationH SketchDistribution::expectation_H(const Matrix& A, RngStream& rng,
                                               long mc_samples) const {
  ExpectationH out;
  out.monte_carlo_samples = 0;
  switch (kind_) {
    case SketchKind::Picard:
      out.H = pinv_.transpose() * pinv_;
      return out;
    case SketchKind::FullGradient:
      out.H = Matrix::Identity(m_, m_) / norm_a2_sq_;
      return out;
    case SketchKind::RowKaczmarz: {
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (A.row(i).squaredNorm() == 0.0) {
          throw PreconditionError(
              "row Kaczmarz H is singular: row " + std::to_string(i) +
              " of A is zero (Assumption: E[S S^T] positive definite)");
        }
      }
      out.H = Matrix::Identity(m_, m_) / A.squaredNorm();
      return out;
    }
    case SketchKind::AverageBlock: {
      for (std::size_t i = 0; i < block_norm_sq_.size(); ++i) {
        if (block_norm_sq_[i] == 0.0) {
          throw PreconditionError("average block H is singular: block " +
                                  std::to_string(i) + " of A is zero");
        }
      }
      out.H = Matrix::Identity(m_, m_) / varpi_norm_sq_;
      return out;
    }
    case SketchKind::BlockKaczmarz: {
      Matrix H = Matrix::Zero(m_, m_);
      const double t = static_cast<double>(paving_.blocks.size());
      for (std::size_t bi = 0; bi < paving_.blocks.size(); ++bi) {
        const auto& block = paving_.blocks[bi];
        Matrix G = block_pinv_[bi].transpose() * block_pinv_[bi];  // |J| x |J|
        for (std::size_t r = 0; r < block.size(); ++r)
          for (std::size_t c = 0; c < block.size(); ++c)
            H(block[r], block[c]) += G(static_cast<Eigen::Index>(r),
                                       static_cast<Eigen::Index>(c)) / t;
      }
      const double lmin = lambda_min_sym(H);
      if (lmin <= 0.0) {
        throw PreconditionError(
            "block Kaczmarz H is not positive definite (lambda_min = " +
            std::to_string(lmin) + "); a paving block is rank deficient");
      }
      out.H = std::move(H);
      return out;
    }
    case SketchKind::UniformSample:
    case SketchKind::CountSketch:
    case SketchKind::Gaussian:
    case SketchKind::Srht: {
      Matrix H = Matrix::Zero(m_, m_);
      for (long it = 0; it < mc_samples; ++it) {
        SketchSample s = draw(A, rng);
        if (s.zero_overlap) continue;  // 0/0 = 0 contributes nothing
        if (s.kind == SketchKind::UniformSample || s.kind == SketchKind::CountSketch) {
          // S S^T is the 0/1 diagonal indicator of the selected rows.
          for (int i : s.indices) H(i, i) += 1.0 / s.norm_sq_sa;
        } else {
          Matrix S = dense_S(s, A);
          H.selfadjointView<Eigen::Lower>().rankUpdate(S, 1.0 / s.norm_sq_sa);
        }
      }
      H = Matrix(H.selfadjointView<Eigen::Lower>());
      H /= static_cast<double>(mc_samples);
      const double lmin = lambda_min_sym(H);
      if (lmin <= 0.0) {
        throw PreconditionError(
            "Monte Carlo estimate of H is not positive definite (lambda_min = " +
            std::to_string(lmin) + " after " + std::to_string(mc_samples) +
            " samples)");
      }
      out.H = std::move(H);
      out.monte_carlo_samples = mc_samples;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace gave
