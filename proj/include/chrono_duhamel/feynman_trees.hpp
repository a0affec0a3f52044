#ifndef CHRONO_DUHAMEL_FEYNMAN_TREES_HPP
#define CHRONO_DUHAMEL_FEYNMAN_TREES_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "chrono_duhamel/duhamel_dynamics.hpp"
#include "chrono_duhamel/multilinear.hpp"

namespace chrono_duhamel {

/// Rooted tree of k-ary interaction vertices. Each vertex has `children`
/// (subtrees, joined by a Green edge) and k - children.size() leaves, which
/// carry the free field at the reference time. Children are kept in a
/// canonical order, so trees are unordered (non-plane).
struct FeynmanTree {
  std::vector<FeynmanTree> children;
  /// k! / ((k - j)! prod m_i!) times the children's multiplicities, with j
  /// the number of children and m_i the repeat counts of identical children.
  double multiplicity = 1.0;

  int vertices() const;
  /// Bracket notation: a vertex with children A, B prints as "[AB]".
  std::string shape() const;
};

bool operator==(const FeynmanTree& a, const FeynmanTree& b);
bool operator<(const FeynmanTree& a, const FeynmanTree& b);

/// All trees with exactly n vertices for a degree-k vertex.
std::vector<FeynmanTree> enumerate_trees(int n, int k);

struct TreeQuadrature {
  int order = 8;   // Gauss-Legendre points per panel
  int panels = 1;  // panels per integration dimension
};

struct TreeTerm {
  FeynmanTree tree;
  int order = 0;  // number of vertices; 0 for the bare leaf term
  double value = 0.0;
};

struct TreeExpansion {
  std::vector<TreeTerm> terms;
  double total = 0.0;
};

/// Expansion of f(Theta_{t1} u) in trees with at most K vertices, given the
/// chart coordinates c2 of Theta_{t2} u. Requires N(u) = lambda u^k and a
/// functional with only a degree-1 term.
TreeExpansion tree_expand(const Model& model, const SymFunctional& f_linear, double t1, double t2, int K,
                          const Eigen::VectorXd& c2, const TreeQuadrature& quad = {});

/// The chart-vector contribution of one tree: multiplicity * int_{t1}^{t2} Y_T.
Eigen::VectorXd tree_contribution(const Model& model, const FeynmanTree& tree, double t1, double t2,
                                  const Eigen::VectorXd& c2, const TreeQuadrature& quad = {});

}  // namespace chrono_duhamel

#endif
