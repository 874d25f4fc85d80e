#pragma once

// Directed follower topology with leader pinning, and the Laplacian / M-matrix
// algebra built on it.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace ppc {

using DenseMatrix = Eigen::MatrixXd;

/// Communication edge j -> i: agent `to` receives from agent `from` (1-based).
struct Edge {
  int from = 0;
  int to = 0;
  double weight = 1.0;

  bool operator==(const Edge&) const = default;
};

class DirectedTopology {
 public:
  /// `adjacency(i, j)` = a_ij > 0 iff agent i receives from agent j (0-based).
  /// `pinning[i]` is b_i in {0, 1}. Throws InvalidParams on self loops,
  /// negative weights, non-binary pinning or size mismatch.
  DirectedTopology(DenseMatrix adjacency, std::vector<int> pinning);

  static DirectedTopology from_edges(int n_followers, std::span<const Edge> edges,
                                     std::span<const int> pinned_agents);

  int size() const { return static_cast<int>(pinning_.size()); }
  double weight(int i, int j) const { return adjacency_(i, j); }
  bool pinned(int i) const { return pinning_[static_cast<std::size_t>(i)] != 0; }
  const DenseMatrix& adjacency() const { return adjacency_; }
  const std::vector<int>& pinning() const { return pinning_; }

  /// In-neighbours of agent i (0-based): every j with a_ij > 0.
  const std::vector<int>& neighbors(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }

  /// Edge list (1-based) in row-major order of the adjacency matrix.
  std::vector<Edge> edges() const;
  /// 1-based indices of pinned agents.
  std::vector<int> pinned_agents() const;

  bool operator==(const DirectedTopology& other) const;

 private:
  DenseMatrix adjacency_;
  std::vector<int> pinning_;
  std::vector<std::vector<int>> neighbors_;
};

/// L = D - A.
DenseMatrix laplacian(const DirectedTopology& topo);

/// W = L + B.
DenseMatrix augmented(const DirectedTopology& topo);

/// True iff every follower is reachable from the leader in the augmented digraph.
bool has_leader_spanning_tree(const DirectedTopology& topo);

/// Diagonal P = diag(q)^-1 with q = (W·C̄)^-1·1. Throws SingularMatrix when
/// W·C̄ is not invertible and NotMMatrix when it lacks the Z-sign pattern or
/// some q_i <= 0. P·W·C̄ + (W·C̄)ᵀ·P is positive definite when W·C̄ has
/// nonnegative column sums; on other digraphs it can be indefinite.
DenseMatrix lemma1_p(const DenseMatrix& w, std::span<const double> cbar);

/// P = diag(p_i / q_i) with q = (W·C̄)^-1·1 and p = (W·C̄)^-T·1. Unlike
/// lemma1_p this is positive definite for every nonsingular M-matrix, not
/// only those with nonnegative column sums. Same errors as lemma1_p.
DenseMatrix lemma1_p_two_sided(const DenseMatrix& w, std::span<const double> cbar);

/// Q = P·(W·C̄) + (W·C̄)ᵀ·P.
DenseMatrix lemma1_q(const DenseMatrix& w, std::span<const double> cbar, const DenseMatrix& p);

/// Lower bound κ on σ_min(L + B) that needs only N.
double kappa(int n_followers);

/// Smallest singular value, as sqrt of the smallest eigenvalue of MᵀM.
double sigma_min(const DenseMatrix& m);

/// Eigenvalues of the symmetric part of `m`, ascending.
Eigen::VectorXd symmetric_eigenvalues(const DenseMatrix& m);

/// min eigenvalue > 1e-10 · max(1, max eigenvalue).
bool is_positive_definite(const DenseMatrix& symmetric);

}  // namespace ppc
