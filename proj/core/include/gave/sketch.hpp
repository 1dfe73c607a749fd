#pragma once

#include <string>
#include <vector>

#include "gave/problem.hpp"
#include "gave/rng.hpp"

namespace gave {

enum class SketchKind {
  Picard,         // S = (A^+)^T with probability one
  FullGradient,   // S = I_m with probability one
  RowKaczmarz,    // S = e_i with probability ||A_i||^2 / ||A||_F^2
  BlockKaczmarz,  // S = I_{:,J} ((A_J)^+)^T over a row paving, uniform blocks
  AverageBlock,   // S = I_{:,I_i} over a fixed permutation partition
  UniformSample,  // S = I_{:,J}, J uniform among p-subsets of [m]
  CountSketch,    // S^T = D I_{J,:} with random signs D
  Gaussian,       // S i.i.d. standard normal m x p
  Srht,           // S^T = sqrt(m/p) I_{J,:} H_m D (m must be a power of two)
};

const char* to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& name);

/// Row paving (t, beta1, beta2): a partition of [m] such that the eigenvalues
/// of A_J A_J^T lie in [beta1, beta2] for every block J.
struct Paving {
  std::vector<std::vector<int>> blocks;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Partition of [m] into ceil(m/p) blocks of a uniform random permutation;
/// all blocks have size p except possibly the last.
struct VarpiPartition {
  std::vector<std::vector<int>> blocks;
};

/// One drawn sketching matrix. Structured forms keep the solver update at
/// O(p n); dense_S() on the distribution expands any sample for testing.
struct SketchSample {
  SketchKind kind;
  std::vector<int> indices;  // selected rows / block members
  int block_index = -1;      // BlockKaczmarz / AverageBlock partition slot
  Vector signs;              // CountSketch: per-index; SRHT: full length m
  Matrix dense;              // Gaussian: S; SRHT: S^T A
  double norm_sq_sa = 0.0;   // ||S^T A||_2^2
  bool zero_overlap = false; // S^T A == 0 for this draw (update is skipped)
};

struct ExpectationH {
  Matrix H;                  // E[S S^T / ||S^T A||_2^2]
  long monte_carlo_samples;  // 0 when the closed form was used
};

/// A named probability space over sketching matrices for a fixed A.
///
/// The distribution owns everything that is drawn once per experiment (row
/// probabilities, pavings, the permutation partition, pseudoinverse factors)
/// while draw() produces the per-iteration sample. Distributions are
/// immutable after construction; draw() takes the caller's stream, so
/// parallel trials with independent streams never contend.
/// Caller-owned mutable state for the without-replacement block order
/// (BlockKaczmarz). Keeps the distribution itself immutable and shareable.
struct DrawState {
  std::vector<int> order;
  std::size_t position = 0;
};

class SketchDistribution {
 public:
  struct Options {
    int p = 1;  // block size (Block/Average/Uniform/CountSketch/Gaussian/SRHT)
    int t = 0;  // paving size for BlockKaczmarz; 0 means ceil(m/p)
    // BlockKaczmarz: sweep the paving in a freshly shuffled order each epoch
    // instead of i.i.d. uniform block picks. The convergence theory assumes
    // the i.i.d. mode; pass a DrawState to draw() when enabling this.
    bool without_replacement = false;
  };

  /// rng seeds the construction-time randomness (paving permutation,
  /// varpi partition). Kinds without such state ignore it.
  SketchDistribution(SketchKind kind, const Matrix& A, Options opts,
                     RngStream rng);
  SketchDistribution(SketchKind kind, const Matrix& A)
      : SketchDistribution(kind, A, Options{}, RngStream(0)) {}

  SketchKind kind() const { return kind_; }
  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }

  /// Block size for full-iteration accounting (k * p / m): m for the
  /// degenerate full-matrix kinds, the configured p otherwise.
  int effective_block_size() const;

  SketchSample draw(const Matrix& A, RngStream& rng,
                    DrawState* state = nullptr) const;

  /// Algorithm step direction  A^T S S^T (A x - B |x| - b) / ||S^T A||_2^2.
  /// abs_x must equal x.cwiseAbs() (the solver caches it).
  Vector scaled_direction(const SketchSample& sample, const GaveProblem& problem,
                          const Vector& x, const Vector& abs_x) const;

  /// Dense m x q expansion of a structured sample (testing aid).
  Matrix dense_S(const SketchSample& sample, const Matrix& A) const;

  /// H = E[S S^T / ||S^T A||_2^2]: closed form for Picard, FullGradient,
  /// RowKaczmarz, BlockKaczmarz and AverageBlock; Monte Carlo otherwise.
  /// Throws if a Monte Carlo estimate fails to be positive definite.
  ExpectationH expectation_H(const Matrix& A, RngStream& rng,
                             long mc_samples = 100000) const;

  const Paving& paving() const;
  const VarpiPartition& varpi_partition() const;
  double varpi_norm_sq() const;

 private:
  SketchKind kind_;
  Eigen::Index m_ = 0, n_ = 0;
  Options opts_;
  Matrix pinv_;                    // Picard: A^+ (n x m)
  double norm_a2_sq_ = 0.0;        // FullGradient: ||A||_2^2
  std::vector<double> row_cumsum_; // RowKaczmarz
  Paving paving_;                  // BlockKaczmarz
  std::vector<Matrix> block_pinv_; // BlockKaczmarz: (A_J)^+ per block
  VarpiPartition varpi_;           // AverageBlock
  std::vector<double> block_norm_sq_;  // AverageBlock: ||A_I||_2^2 per block
  std::vector<double> block_cumsum_;   // AverageBlock
  double varpi_norm_sq_ = 0.0;
};

/// In-place unnormalized fast Walsh-Hadamard transform: v <- H_m v for
/// H_2 = [[1,1],[1,-1]], H_{2m} = H_2 (x) H_m. Length must be a power of two.
void fwht(Vector& v);
Vector fwht_copy(Vector v);

/// Zero-pads the rows of a problem to the next power of two (the appended
/// residual rows are identically zero, so the padded problem is equivalent).
/// Needed before using the SRHT sketch when m is not a power of two.
GaveProblem pad_rows_pow2(const GaveProblem& problem);

/// Rows of A split into t near-equal chunks of a random permutation, with
/// beta1/beta2 the exact extreme eigenvalues of A_J A_J^T over the blocks.
Paving build_paving(const Matrix& A, int t, RngStream& rng);

VarpiPartition build_varpi_partition(int m, int p, RngStream& rng);

/// ||A||_{varpi,p}^2 = sum_i ||A_{I_i,:}||_2^2 (spectral norms per block).
double varpi_norm_sq(const Matrix& A, const VarpiPartition& partition);

}  // namespace gave
