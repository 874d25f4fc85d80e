#include "ppc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "ppc/errors.hpp"

namespace ppc {

DirectedTopology::DirectedTopology(DenseMatrix adjacency, std::vector<int> pinning)
    : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {
  const auto n = static_cast<Eigen::Index>(pinning_.size());
  if (n == 0) throw InvalidParams("topology needs at least one follower");
  if (adjacency_.rows() != n || adjacency_.cols() != n)
    throw InvalidParams("adjacency must be N x N with N = number of pinning entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pinning_[static_cast<std::size_t>(i)] != 0 && pinning_[static_cast<std::size_t>(i)] != 1)
      throw InvalidParams("pinning gains must be 0 or 1");
    if (adjacency_(i, i) != 0.0) throw InvalidParams("self loops are not allowed");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(adjacency_(i, j) >= 0.0) || !std::isfinite(adjacency_(i, j)))
        throw InvalidParams("adjacency weights must be finite and nonnegative");
    }
  }
  neighbors_.resize(pinning_.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency_(i, j) > 0.0) neighbors_[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
}

DirectedTopology DirectedTopology::from_edges(int n_followers, std::span<const Edge> edges,
                                              std::span<const int> pinned_agents) {
  if (n_followers < 1) throw InvalidParams("topology needs at least one follower");
  DenseMatrix a = DenseMatrix::Zero(n_followers, n_followers);
  for (const Edge& e : edges) {
    if (e.from < 1 || e.from > n_followers || e.to < 1 || e.to > n_followers) {
      std::ostringstream os;
      os << "edge (" << e.from << " -> " << e.to << ") references an agent outside 1.." << n_followers;
      throw InvalidParams(os.str());
    }
    a(e.to - 1, e.from - 1) = e.weight;
  }
  std::vector<int> b(static_cast<std::size_t>(n_followers), 0);
  for (int p : pinned_agents) {
    if (p < 1 || p > n_followers) throw InvalidParams("pinned agent index out of range");
    b[static_cast<std::size_t>(p - 1)] = 1;
  }
  return DirectedTopology(std::move(a), std::move(b));
}

std::vector<Edge> DirectedTopology::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (adjacency_(i, j) > 0.0) out.push_back({j + 1, i + 1, adjacency_(i, j)});
  return out;
}

std::vector<int> DirectedTopology::pinned_agents() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (pinned(i)) out.push_back(i + 1);
  return out;
}

bool DirectedTopology::operator==(const DirectedTopology& other) const {
  return pinning_ == other.pinning_ && adjacency_ == other.adjacency_;
}

DenseMatrix laplacian(const DirectedTopology& topo) {
  const DenseMatrix& a = topo.adjacency();
  DenseMatrix l = -a;
  for (int i = 0; i < topo.size(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

DenseMatrix augmented(const DirectedTopology& topo) {
  DenseMatrix w = laplacian(topo);
  for (int i = 0; i < topo.size(); ++i) w(i, i) += topo.pinned(i) ? 1.0 : 0.0;
  return w;
}

bool has_leader_spanning_tree(const DirectedTopology& topo) {
  const int n = topo.size();
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::deque<int> frontier;
  for (int i = 0; i < n; ++i) {
    if (topo.pinned(i)) {
      reached[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop_front();
    for (int i = 0; i < n; ++i) {
      if (!reached[static_cast<std::size_t>(i)] && topo.weight(i, j) > 0.0) {
        reached[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

namespace {

DenseMatrix scaled(const DenseMatrix& w, std::span<const double> cbar) {
  if (w.rows() != w.cols()) throw InvalidParams("matrix must be square");
  if (static_cast<Eigen::Index>(cbar.size()) != w.cols())
    throw InvalidParams("C̄ must have one entry per column of W");
  DenseMatrix wc = w;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double c = cbar[static_cast<std::size_t>(j)];
    if (!(c > 0.0)) throw InvalidParams("C̄ entries must be positive");
    wc.col(j) *= c;
  }
  return wc;
}

// Solves (W·C̄)·v = 1, or its transpose, after checking the Z-sign pattern;
// every component of v must be positive.
Eigen::VectorXd m_matrix_solve(const DenseMatrix& wc, bool transpose) {
  const Eigen::Index n = wc.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && wc(i, j) > 0.0) throw NotMMatrix("W·C̄ has a positive off-diagonal entry");

  Eigen::FullPivLU<DenseMatrix> lu(transpose ? DenseMatrix(wc.transpose()) : wc);
  if (!lu.isInvertible()) throw SingularMatrix("W·C̄ is singular");
  const Eigen::VectorXd v = lu.solve(Eigen::VectorXd::Ones(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(v(i) > 0.0)) {
      std::ostringstream os;
      os << "W·C̄ is not a nonsingular M-matrix: " << (transpose ? "p_" : "q_") << i + 1 << " = " << v(i) << " <= 0";
      throw NotMMatrix(os.str());
    }
  }
  return v;
}

}  // namespace

DenseMatrix lemma1_p(const DenseMatrix& w, std::span<const double> cbar) {
  const Eigen::VectorXd q = m_matrix_solve(scaled(w, cbar), false);
  return q.cwiseInverse().asDiagonal();
}

DenseMatrix lemma1_p_two_sided(const DenseMatrix& w, std::span<const double> cbar) {
  const DenseMatrix wc = scaled(w, cbar);
  const Eigen::VectorXd q = m_matrix_solve(wc, false);
  const Eigen::VectorXd p = m_matrix_solve(wc, true);
  return p.cwiseQuotient(q).asDiagonal();
}

DenseMatrix lemma1_q(const DenseMatrix& w, std::span<const double> cbar, const DenseMatrix& p) {
  const DenseMatrix wc = scaled(w, cbar);
  return p * wc + wc.transpose() * p;
}

double kappa(int n_followers) {
  if (n_followers < 1) throw InvalidParams("kappa needs N >= 1");
  const double n = n_followers;
  // std::pow(0, 0) == 1 covers N = 1.
  return std::pow((n - 1.0) / n, (n - 1.0) / 2.0) / (n * n + n - 1.0);
}

Eigen::VectorXd symmetric_eigenvalues(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidParams("matrix must be square");
  const DenseMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("symmetric eigen-solver did not converge");
  return es.eigenvalues();
}

double sigma_min(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidParams("sigma_min needs a square matrix");
  const Eigen::VectorXd ev = symmetric_eigenvalues(m.transpose() * m);
  return std::sqrt(std::max(0.0, ev(0)));
}

bool is_positive_definite(const DenseMatrix& symmetric) {
  const Eigen::VectorXd ev = symmetric_eigenvalues(symmetric);
  const double hi = ev(ev.size() - 1);
  return ev(0) > 1e-10 * std::max(1.0, hi);
}

}  // namespace ppc
