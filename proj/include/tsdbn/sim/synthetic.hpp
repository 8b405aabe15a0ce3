#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "../data/dataset.hpp"
#include "../dbn/dbn.hpp"
#include "../error.hpp"
#include "../graph/dag.hpp"
#include "../linalg.hpp"
#include "../rng.hpp"

namespace tsdbn::sim {

struct SparseVar {
  Matrix a;                  // a(j, i): effect of x_i(t-1) on x_j(t)
  Vector noise_sd;
  std::vector<std::string> names;

  std::size_t k() const { return names.size(); }
  // Variable-level support (off-diagonal nonzeros) as a DAG.
  Dag support() const {
    Dag g(names);
    for (std::size_t j = 0; j < k(); ++j)
      for (std::size_t i = 0; i < k(); ++i)
        if (i != j && a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) != 0.0) g.try_add(i, j);
    return g;
  }
};

struct SparseVarOptions {
  double density = 0.15;  // expected share of the k(k-1) ordered pairs
  double min_effect = 0.4;
  double max_effect = 0.8;
  double self_effect = 0.3;
  double max_spectral_radius = 0.9;
  double snr = 3.0;  // per equation that has at least one cross-variable parent
};

inline std::vector<std::string> default_names(std::size_t k, const std::string& prefix = "X") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

// Stationary covariance of x(t) = A x(t-1) + e by fixed-point iteration.
inline Matrix stationary_covariance(const Matrix& a, const Vector& noise_var) {
  Matrix s = noise_var.asDiagonal();
  for (int it = 0; it < 10000; ++it) {
    Matrix next = a * s * a.transpose();
    next.diagonal() += noise_var;
    const double diff = (next - s).cwiseAbs().maxCoeff();
    s = next;
    if (diff < 1e-12 * (1.0 + s.cwiseAbs().maxCoeff())) break;
  }
  return s;
}

// Cross-variable edges follow a random variable order (so the support is a
// DAG), each forward pair kept with probability 2 * density. Noise variances
// are set so every equation with a planted parent has signal variance
// Var(A_j x(t-1)) equal to snr times its noise variance; other equations get
// unit noise.
inline SparseVar random_sparse_var(std::size_t k, Rng& rng, const SparseVarOptions& opt = {}) {
  if (k < 2) throw ValidationError("sparse VAR needs k >= 2");
  SparseVar v;
  v.names = default_names(k);
  v.a = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = k - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  const double p = std::min(1.0, 2.0 * opt.density);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (rng.uniform() < p) {
        const double mag = opt.min_effect + (opt.max_effect - opt.min_effect) * rng.uniform();
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        v.a(static_cast<Eigen::Index>(perm[b]), static_cast<Eigen::Index>(perm[a])) = sign * mag;
      }
  for (std::size_t j = 0; j < k; ++j) v.a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = opt.self_effect;
  const double rho = v.a.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > opt.max_spectral_radius) v.a *= opt.max_spectral_radius / rho;

  Vector noise_var = Vector::Ones(static_cast<Eigen::Index>(k));
  std::vector<char> has_parent(k, 0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i)
      if (i != j && v.a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) != 0.0) has_parent[j] = 1;
  for (int it = 0; it < 200; ++it) {
    const Matrix s = stationary_covariance(v.a, noise_var);
    const Matrix signal = v.a * s * v.a.transpose();
    double change = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!has_parent[j]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const double target = signal(jj, jj) / opt.snr;
      change = std::max(change, std::fabs(target - noise_var(jj)) / target);
      noise_var(jj) = target;
    }
    if (change < 1e-10) break;
  }
  v.noise_sd = noise_var.cwiseSqrt();
  return v;
}

// n rows after a burn-in of `burn_in` steps from zero.
inline Matrix simulate_var(const SparseVar& v, std::size_t n, Rng& rng, std::size_t burn_in = 200) {
  const auto k = static_cast<Eigen::Index>(v.k());
  Matrix out(static_cast<Eigen::Index>(n), k);
  Vector x = Vector::Zero(k), e(k);
  for (std::size_t t = 0; t < n + burn_in; ++t) {
    for (Eigen::Index j = 0; j < k; ++j) e(j) = v.noise_sd(j) * rng.normal();
    x = v.a * x + e;
    if (t >= burn_in) out.row(static_cast<Eigen::Index>(t - burn_in)) = x.transpose();
  }
  return out;
}

inline Dataset to_dataset(const Matrix& m, const std::vector<std::string>& names) {
  Dataset d;
  d.index_name = "t";
  for (Eigen::Index r = 0; r < m.rows(); ++r) d.time_index.push_back(std::to_string(r + 1));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::vector<std::optional<double>> vals;
    for (Eigen::Index r = 0; r < m.rows(); ++r) vals.emplace_back(m(r, c));
    d.columns.push_back(make_continuous(names[static_cast<std::size_t>(c)], std::move(vals)));
  }
  return d;
}

// Linear Gaussian structural equations over `g` in topological order: each
// node is sum(weight * parent) + N(0, 1); weights[j][i] for edge i -> j.
inline Matrix sample_linear_sem(const Dag& g, const Matrix& weights, std::size_t n, Rng& rng) {
  const auto order = g.topological_order();
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g.size()));
  for (std::size_t r = 0; r < n; ++r)
    for (auto v : order) {
      double x = rng.normal();
      for (auto p : g.parents(v))
        x += weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(p)) *
             out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = x;
    }
  return out;
}

// Random DAG on m nodes over a random order with edge probability p.
inline Dag random_dag(std::size_t m, double p, Rng& rng, const std::vector<std::string>& names = {}) {
  Dag g(names.empty() ? default_names(m, "V") : names);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (rng.uniform() < p) g.try_add(perm[a], perm[b]);
  return g;
}

// Discrete network with random CPT rows (normalized exponentials, i.e.
// flat Dirichlet draws).
inline Dbn random_discrete_network(const Dag& g, const std::vector<std::size_t>& states, Rng& rng) {
  if (states.size() != g.size()) throw ValidationError("state count vector size differs from node count");
  Dbn dbn;
  dbn.graph = g;
  dbn.clamped.assign(g.size(), std::nullopt);
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<std::string> lv;
    for (std::size_t s = 0; s < states[v]; ++s) lv.push_back(std::to_string(s + 1));
    dbn.levels.push_back(lv);
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    Cpt c;
    c.parents = g.parents(v);
    for (auto p : c.parents) c.parent_states.push_back(states[p]);
    c.states = states[v];
    const std::size_t q = c.configurations();
    c.table.resize(q * c.states);
    for (std::size_t cfg = 0; cfg < q; ++cfg) {
      double total = 0.0;
      for (std::size_t s = 0; s < c.states; ++s) total += c.table[cfg * c.states + s] = rng.exponential();
      for (std::size_t s = 0; s < c.states; ++s) c.table[cfg * c.states + s] /= total;
    }
    dbn.cpts.push_back(std::move(c));
  }
  return dbn;
}

// Forward sample of a discrete network into DiscreteData.
inline DiscreteData sample_discrete(const Dbn& dbn, std::size_t n, Rng& rng) {
  DiscreteData d;
  d.names = dbn.nodes();
  d.levels = dbn.levels;
  d.values.assign(dbn.size(), std::vector<int>(n, 0));
  const auto order = dbn.graph.topological_order();
  std::vector<int> x(dbn.size(), 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto v : order) {
      const auto& c = dbn.cpts[v];
      const std::size_t base = c.config(x) * c.states;
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = static_cast<int>(c.states) - 1;
      for (std::size_t s = 0; s < c.states; ++s) {
        acc += c.table[base + s];
        if (u < acc) {
          pick = static_cast<int>(s);
          break;
        }
      }
      x[v] = pick;
      d.values[v][r] = pick;
    }
  }
  return d;
}

}  // namespace tsdbn::sim
