#include "chrono_duhamel/feynman_trees.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace chrono_duhamel {

int FeynmanTree::vertices() const {
  int n = 1;
  for (const auto& c : children) n += c.vertices();
  return n;
}

std::string FeynmanTree::shape() const {
  std::string s = "[";
  for (const auto& c : children) s += c.shape();
  return s + "]";
}

bool operator==(const FeynmanTree& a, const FeynmanTree& b) { return a.shape() == b.shape(); }

bool operator<(const FeynmanTree& a, const FeynmanTree& b) {
  const int va = a.vertices(), vb = b.vertices();
  if (va != vb) return va < vb;
  return a.shape() < b.shape();
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

FeynmanTree make_vertex(std::vector<FeynmanTree> children, int k) {
  FeynmanTree t;
  std::sort(children.begin(), children.end());
  const int j = static_cast<int>(children.size());
  double mult = factorial(k) / factorial(k - j);
  for (std::size_t i = 0; i < children.size();) {
    std::size_t e = i;
    while (e < children.size() && children[e] == children[i]) ++e;
    mult /= factorial(static_cast<int>(e - i));
    i = e;
  }
  for (const auto& c : children) mult *= c.multiplicity;
  t.children = std::move(children);
  t.multiplicity = mult;
  return t;
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch)
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    w[i] = 2.0 * v * v;
  }
}

class TreeEvaluator {
 public:
  TreeEvaluator(const Model& model, double t2, const Eigen::VectorXd& c2, const TreeQuadrature& quad)
      : model_(model), t2_(t2), base_(from_chart(model.grid, model.disp, c2, 0.0)), quad_(quad) {
    if (model.nonlin.coeffs.size() != 1) throw std::invalid_argument("tree expansion needs a single-monomial nonlinearity");
    k_ = model.nonlin.coeffs.begin()->first;
    lambda_ = model.nonlin.coeffs.begin()->second;
    gauss_legendre(quad.order, gx_, gw_);
  }

  int k() const { return k_; }

  Eigen::VectorXd integrate(const std::function<Eigen::VectorXd(double)>& g, double a, double b) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(chart_dim(model_.grid));
    const double width = (b - a) / quad_.panels;
    for (int p = 0; p < quad_.panels; ++p) {
      const double lo = a + p * width;
      for (std::size_t i = 0; i < gx_.size(); ++i) acc += 0.5 * width * gw_[i] * g(lo + 0.5 * width * (gx_[i] + 1.0));
    }
    return acc;
  }

  // Y_T(tau): Green lift at tau of lambda * (leaf field)^(k-j) * prod of child slots
  Eigen::VectorXd Y(const FeynmanTree& tree, double tau) const {
    const Grid& g = model_.grid;
    Eigen::VectorXcd prod = Eigen::VectorXcd::Constant(g.M, lambda_);
    const int leaves = k_ - static_cast<int>(tree.children.size());
    if (leaves > 0) {
      const Eigen::VectorXcd leaf = propagate(g, model_.disp, base_, tau).psi;
      for (int i = 0; i < leaves; ++i) prod = prod.cwiseProduct(leaf);
    }
    for (const auto& child : tree.children) {
      const Eigen::VectorXd inner = integrate([&](double s) { return Y(child, s); }, tau, t2_);
      const Eigen::VectorXcd slot = propagate(g, model_.disp, from_chart(g, model_.disp, inner, 0.0), tau).psi;
      prod = prod.cwiseProduct(slot);
    }
    return to_chart(green_apply(g, model_.disp, tau, prod).chart_data);
  }

 private:
  const Model& model_;
  double t2_;
  CauchyData base_;
  TreeQuadrature quad_;
  int k_ = 3;
  double lambda_ = 1.0;
  std::vector<double> gx_, gw_;
};

}  // namespace

std::vector<FeynmanTree> enumerate_trees(int n, int k) {
  if (n < 1 || k < 1) return {};
  // pool of all trees with fewer than n vertices, in canonical order
  std::vector<std::vector<FeynmanTree>> by_size(n + 1);
  by_size[1] = {make_vertex({}, k)};
  for (int size = 2; size <= n; ++size) {
    std::vector<FeynmanTree> pool;
    for (int s = 1; s < size; ++s) pool.insert(pool.end(), by_size[s].begin(), by_size[s].end());
    std::vector<FeynmanTree> found;
    std::vector<FeynmanTree> chosen;
    std::function<void(std::size_t, int)> pick = [&](std::size_t start, int remaining) {
      if (remaining == 0) {
        found.push_back(make_vertex(chosen, k));
        return;
      }
      if (static_cast<int>(chosen.size()) == k) return;
      for (std::size_t i = start; i < pool.size(); ++i) {
        const int v = pool[i].vertices();
        if (v > remaining) continue;
        chosen.push_back(pool[i]);
        pick(i, remaining - v);
        chosen.pop_back();
      }
    };
    pick(0, size - 1);
    std::sort(found.begin(), found.end());
    by_size[size] = std::move(found);
  }
  return by_size[n];
}

Eigen::VectorXd tree_contribution(const Model& model, const FeynmanTree& tree, double t1, double t2,
                                  const Eigen::VectorXd& c2, const TreeQuadrature& quad) {
  TreeEvaluator ev(model, t2, c2, quad);
  return tree.multiplicity * ev.integrate([&](double tau) { return ev.Y(tree, tau); }, t1, t2);
}

TreeExpansion tree_expand(const Model& model, const SymFunctional& f_linear, double t1, double t2, int K,
                          const Eigen::VectorXd& c2, const TreeQuadrature& quad) {
  for (int p : f_linear.degrees())
    if (p != 1 && !f_linear.term(p).is_zero()) throw std::invalid_argument("tree_expand: functional must be linear");
  if (f_linear.codomain_dim() != 1) throw std::invalid_argument("tree_expand: functional must be scalar");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(f_linear.dim());
  if (f_linear.has_term(1)) w = Eigen::Map<const Eigen::VectorXd>(f_linear.term(1).coeffs().data(), f_linear.dim());

  TreeExpansion out;
  TreeTerm leaf;
  leaf.value = w.dot(c2);
  out.terms.push_back(leaf);
  out.total = leaf.value;
  if (K <= 0 || model.nonlin.is_zero()) return out;
  TreeEvaluator ev(model, t2, c2, quad);
  for (int n = 1; n <= K; ++n) {
    for (const auto& tree : enumerate_trees(n, ev.k())) {
      const Eigen::VectorXd contrib =
          tree.multiplicity * ev.integrate([&](double tau) { return ev.Y(tree, tau); }, t1, t2);
      TreeTerm term{tree, n, w.dot(contrib)};
      out.total += term.value;
      out.terms.push_back(std::move(term));
    }
  }
  return out;
}

}  // namespace chrono_duhamel
