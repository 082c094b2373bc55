#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace iscan {

// Directed acyclic graph over nodes 0..d-1. Edges are kept in sorted
// adjacency lists; acyclicity is the caller's responsibility at insertion
// time and is verified by topological_sort.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int num_nodes);

  int num_nodes() const { return d_; }
  int num_edges() const { return num_edges_; }
  bool has_edge(int from, int to) const;
  void add_edge(int from, int to);     // rejects self-loops and duplicates
  void remove_edge(int from, int to);  // rejects missing edges
  const std::vector<int>& parents(int node) const;
  const std::vector<int>& children(int node) const;
  std::vector<std::pair<int, int>> edges() const;  // lexicographic order
  std::vector<int> roots() const;                  // nodes with no parents
  std::vector<int> leaves() const;                 // nodes with no children

  bool operator==(const Dag& other) const = default;

 private:
  void check_node(int node) const;

  int d_ = 0;
  int num_edges_ = 0;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

struct TopologicalOrder {
  std::vector<int> order;  // order[position] = node id

  bool operator==(const TopologicalOrder& other) const = default;
};

// Erdos-Renyi DAG: draws a random node permutation, then includes each
// forward edge independently with p = min(1, 2k/(d-1)); kd edges on average.
Dag generate_er(int d, double k, std::uint64_t seed);

// Preferential-attachment DAG: nodes arrive in index order, each new node
// attaches to min(k, #existing) distinct earlier nodes chosen with
// probability proportional to degree+1. Edges point earlier -> later, which
// guarantees acyclicity and concentrates degree on hub nodes.
Dag generate_sf(int d, int k, std::uint64_t seed);

// Kahn's algorithm, smallest node id first among the available nodes, so the
// result is deterministic. Throws CycleError if the graph has a cycle.
TopologicalOrder topological_sort(const Dag& g);

// True when every edge goes from an earlier to a later position of o.
bool is_valid_order(const Dag& g, const TopologicalOrder& o);

// Graphviz serialization. Node labels are indices, or names when provided.
std::string to_dot(const Dag& g, const std::vector<std::string>& names = {});

}  // namespace iscan
