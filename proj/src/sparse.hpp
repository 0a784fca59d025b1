#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "qls/discretization.hpp"

namespace qls::detail {

/// Numbering of the free (non-Dirichlet) nodes of a grid.
struct FreeIndex {
  std::vector<long> of_node;  ///< -1 on Dirichlet nodes
  std::vector<std::size_t> node_of;

  explicit FreeIndex(const Grid& g) : of_node(g.size(), -1) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.fixed(i)) {
        of_node[i] = static_cast<long>(node_of.size());
        node_of.push_back(i);
      }
  }
  long size() const { return static_cast<long>(node_of.size()); }
};

/// Stiffness matrix of the edge energy on free nodes plus an optional diagonal
/// (indexed by node).
inline Eigen::SparseMatrix<double> assemble(const Grid& g, const FreeIndex& idx,
                                            const std::vector<double>* diagonal = nullptr) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edges().size() + idx.node_of.size());
  for (const Edge& e : g.edges()) {
    const long a = idx.of_node[e.i], b = idx.of_node[e.j];
    if (a >= 0) trip.emplace_back(a, a, e.c);
    if (b >= 0) trip.emplace_back(b, b, e.c);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -e.c);
      trip.emplace_back(b, a, -e.c);
    }
  }
  if (diagonal)
    for (long k = 0; k < idx.size(); ++k) trip.emplace_back(k, k, (*diagonal)[idx.node_of[k]]);
  Eigen::SparseMatrix<double> A(idx.size(), idx.size());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace qls::detail
