#include "iscan/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "iscan/errors.hpp"
#include "iscan/rng.hpp"

namespace iscan {

Dag::Dag(int num_nodes) : d_(num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("Dag: num_nodes must be >= 1");
  parents_.resize(d_);
  children_.resize(d_);
}

void Dag::check_node(int node) const {
  if (node < 0 || node >= d_)
    throw std::invalid_argument("Dag: node " + std::to_string(node) + " out of range [0," +
                                std::to_string(d_) + ")");
}

bool Dag::has_edge(int from, int to) const {
  check_node(from);
  check_node(to);
  const auto& ch = children_[from];
  return std::binary_search(ch.begin(), ch.end(), to);
}

void Dag::add_edge(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) throw std::invalid_argument("Dag: self-loop on node " + std::to_string(from));
  if (has_edge(from, to))
    throw std::invalid_argument("Dag: duplicate edge " + std::to_string(from) + "->" +
                                std::to_string(to));
  children_[from].insert(std::upper_bound(children_[from].begin(), children_[from].end(), to), to);
  parents_[to].insert(std::upper_bound(parents_[to].begin(), parents_[to].end(), from), from);
  ++num_edges_;
}

void Dag::remove_edge(int from, int to) {
  if (!has_edge(from, to))
    throw std::invalid_argument("Dag: cannot remove missing edge " + std::to_string(from) + "->" +
                                std::to_string(to));
  auto& ch = children_[from];
  ch.erase(std::lower_bound(ch.begin(), ch.end(), to));
  auto& pa = parents_[to];
  pa.erase(std::lower_bound(pa.begin(), pa.end(), from));
  --num_edges_;
}

const std::vector<int>& Dag::parents(int node) const {
  check_node(node);
  return parents_[node];
}

const std::vector<int>& Dag::children(int node) const {
  check_node(node);
  return children_[node];
}

std::vector<std::pair<int, int>> Dag::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_edges_);
  for (int i = 0; i < d_; ++i)
    for (int j : children_[i]) out.emplace_back(i, j);
  return out;
}

std::vector<int> Dag::roots() const {
  std::vector<int> out;
  for (int i = 0; i < d_; ++i)
    if (parents_[i].empty()) out.push_back(i);
  return out;
}

std::vector<int> Dag::leaves() const {
  std::vector<int> out;
  for (int i = 0; i < d_; ++i)
    if (children_[i].empty()) out.push_back(i);
  return out;
}

Dag generate_er(int d, double k, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("generate_er: d must be >= 2");
  if (k <= 0) throw std::invalid_argument("generate_er: k must be > 0");
  Dag g(d);
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  auto eng = make_engine(derive_seed(seed, "er-graph"));
  std::shuffle(perm.begin(), perm.end(), eng);
  const double p = std::min(1.0, 2.0 * k / (d - 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (unif(eng) < p) g.add_edge(perm[a], perm[b]);
  return g;
}

Dag generate_sf(int d, int k, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("generate_sf: d must be >= 2");
  if (k < 1) throw std::invalid_argument("generate_sf: k must be >= 1");
  if (k >= d) throw std::invalid_argument("generate_sf: k must be < d");
  Dag g(d);
  auto eng = make_engine(derive_seed(seed, "sf-graph"));
  std::vector<int> degree(d, 0);
  for (int t = 1; t < d; ++t) {
    // Attach to min(k, t) distinct earlier nodes, weight = degree+1 so
    // isolated nodes stay reachable. Weights are frozen at the start of the
    // round; chosen candidates are removed from the pool.
    std::vector<int> pool(t);
    std::iota(pool.begin(), pool.end(), 0);
    const int picks = std::min(k, t);
    for (int c = 0; c < picks; ++c) {
      double total = 0;
      for (int u : pool) total += degree[u] + 1;
      std::uniform_real_distribution<double> unif(0.0, total);
      double r = unif(eng);
      std::size_t chosen = pool.size() - 1;
      for (std::size_t idx = 0; idx < pool.size(); ++idx) {
        r -= degree[pool[idx]] + 1;
        if (r < 0) {
          chosen = idx;
          break;
        }
      }
      const int u = pool[chosen];
      g.add_edge(u, t);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
    }
    for (int u : g.parents(t)) ++degree[u];
    degree[t] += picks;
  }
  return g;
}

TopologicalOrder topological_sort(const Dag& g) {
  const int d = g.num_nodes();
  std::vector<int> indegree(d);
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int i = 0; i < d; ++i) {
    indegree[i] = static_cast<int>(g.parents(i).size());
    if (indegree[i] == 0) ready.push(i);
  }
  TopologicalOrder out;
  out.order.reserve(d);
  while (!ready.empty()) {
    int n = ready.top();
    ready.pop();
    out.order.push_back(n);
    for (int c : g.children(n))
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(out.order.size()) != d)
    throw CycleError("topological_sort: graph contains a cycle");
  return out;
}

bool is_valid_order(const Dag& g, const TopologicalOrder& o) {
  const int d = g.num_nodes();
  if (static_cast<int>(o.order.size()) != d)
    throw std::invalid_argument("is_valid_order: order length " +
                                std::to_string(o.order.size()) + " != num_nodes " +
                                std::to_string(d));
  std::vector<int> pos(d, -1);
  for (int p = 0; p < d; ++p) {
    const int node = o.order[p];
    if (node < 0 || node >= d || pos[node] != -1)
      throw std::invalid_argument("is_valid_order: order is not a permutation of 0.." +
                                  std::to_string(d - 1));
    pos[node] = p;
  }
  for (auto [i, j] : g.edges())
    if (pos[i] >= pos[j]) return false;
  return true;
}

std::string to_dot(const Dag& g, const std::vector<std::string>& names) {
  if (!names.empty() && static_cast<int>(names.size()) != g.num_nodes())
    throw std::invalid_argument("to_dot: names size does not match num_nodes");
  std::ostringstream os;
  os << "digraph {\n";
  for (int i = 0; i < g.num_nodes(); ++i) {
    os << "  " << i;
    if (!names.empty()) os << " [label=\"" << names[i] << "\"]";
    os << ";\n";
  }
  for (auto [i, j] : g.edges()) os << "  " << i << " -> " << j << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace iscan
