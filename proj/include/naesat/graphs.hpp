#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace naesat {

// (d,k)-biregular bipartite multigraph as a half-edge matching. Clause slot
// s = a*k + j is the j-th position of clause a; variable slot t = v*d + i is
// the i-th half-edge of variable v. Variable slots are numbered in increasing
// clause-slot order, so the clause-side listing determines the whole matching.
class FactorGraph {
 public:
  FactorGraph() = default;

  // clause_vars[a*k + j] is the variable in slot j of clause a.
  static FactorGraph from_clause_vars(int n, int d, int k, std::vector<int> clause_vars);

  int n() const { return n_; }
  int m() const { return m_; }
  int d() const { return d_; }
  int k() const { return k_; }
  int edges() const { return m_ * k_; }

  int var_at(int clause_slot) const { return clause_var_[clause_slot]; }
  int var_at(int a, int j) const { return clause_var_[a * k_ + j]; }
  std::span<const int> clause_vars(int a) const {
    return {clause_var_.data() + static_cast<std::size_t>(a) * k_, static_cast<std::size_t>(k_)};
  }
  // Clause slots incident to v, in variable-slot order.
  std::span<const int> var_slots(int v) const {
    return {var_to_clause_.data() + static_cast<std::size_t>(v) * d_, static_cast<std::size_t>(d_)};
  }
  int clause_slot_of(int var_slot) const { return var_to_clause_[var_slot]; }
  int var_slot_of(int clause_slot) const { return clause_to_var_[clause_slot]; }

  const std::vector<int>& clause_var_list() const { return clause_var_; }

  // Bijection and degree checks; returns an empty string when consistent.
  std::string check() const;

  // No clause meets a variable in two slots.
  bool is_simple() const;

  friend bool operator==(const FactorGraph&, const FactorGraph&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  int d_ = 0;
  int k_ = 0;
  std::vector<int> clause_var_;
  std::vector<int> var_to_clause_;
  std::vector<int> clause_to_var_;
};

// One bit per clause slot.
struct LiteralAssignment {
  std::vector<std::uint8_t> bits;
  friend bool operator==(const LiteralAssignment&, const LiteralAssignment&) = default;
};

struct Instance {
  FactorGraph graph;
  LiteralAssignment literals;
  friend bool operator==(const Instance&, const Instance&) = default;
};

FactorGraph generate_graph(int n, int d, int k, std::uint64_t seed);
LiteralAssignment generate_literals(const FactorGraph& g, std::uint64_t seed);

// "p naesat n m d k" then one clause per line: k signed 1-based variable
// indices, negative meaning literal 1, terminated by 0.
std::string serialize(const FactorGraph& g, const LiteralAssignment& L);
Instance parse(std::string_view text);

// Files ending in ".gz" are read and written through zlib.
Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const FactorGraph& g, const LiteralAssignment& L);

}  // namespace naesat
