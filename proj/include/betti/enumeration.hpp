#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "betti/presentation.hpp"

namespace betti {

inline constexpr std::size_t kDefaultMaxCosets = 100000;

// Reads BETTI_MAX_COSETS, falling back to kDefaultMaxCosets.
std::size_t default_max_cosets();

// A complete, standardized coset table. Columns are 2g (generator g) and
// 2g+1 (its inverse); coset 0 is the subgroup itself. Cosets are numbered
// in breadth-first order from 0, scanning columns left to right.
class CosetTable {
 public:
  CosetTable() = default;

  // Builds from raw rows (any numbering) and standardizes. Throws
  // Error(validation) if the table is incomplete or inconsistent.
  CosetTable(std::vector<std::string> generators, std::size_t size, std::vector<int> action);

  std::size_t size() const { return size_; }
  int num_generators() const { return static_cast<int>(generators_.size()); }
  int num_columns() const { return 2 * num_generators(); }
  const std::vector<std::string>& generators() const { return generators_; }

  int act(int coset, int column) const {
    return action_[static_cast<std::size_t>(coset) * static_cast<std::size_t>(num_columns()) +
                   static_cast<std::size_t>(column)];
  }
  int act(int coset, const Word& w) const;

  // Schreier transversal: a word taking coset 0 to the given coset.
  const Word& transversal(int coset) const { return transversal_[static_cast<std::size_t>(coset)]; }
  // BFS tree: parent coset and the column leading from it (-1 for coset 0).
  int parent(int coset) const { return parent_[static_cast<std::size_t>(coset)]; }
  int parent_column(int coset) const { return parent_column_[static_cast<std::size_t>(coset)]; }

  const std::vector<int>& action() const { return action_; }

  // True iff every relator fixes every coset.
  bool satisfies(const std::vector<Word>& relators) const;
  // Number of cosets fixed by w.
  std::size_t fixed_points(const Word& w) const;

  friend bool operator==(const CosetTable& a, const CosetTable& b) {
    return a.generators_ == b.generators_ && a.size_ == b.size_ && a.action_ == b.action_;
  }

 private:
  void standardize();

  std::vector<std::string> generators_;
  std::size_t size_ = 0;
  std::vector<int> action_;
  std::vector<Word> transversal_;
  std::vector<int> parent_;
  std::vector<int> parent_column_;
};

// Strategy knob for the enumerator; results are identical after
// standardization whichever is used.
enum class EnumerationStrategy { hlt, hlt_define_first };

CosetTable enumerate_cosets(const Presentation& p, const std::vector<Word>& subgroup_gens,
                            std::size_t max_cosets = kDefaultMaxCosets,
                            EnumerationStrategy strategy = EnumerationStrategy::hlt);

// Regular action of a finite group on itself, with multiplication and
// inverse tables. Element 0 is the identity; element g corresponds to coset g
// of the trivial subgroup, so g * s = act(g, s).
class GroupTable {
 public:
  GroupTable() = default;
  explicit GroupTable(CosetTable regular);

  std::size_t size() const { return table_.size(); }
  int order() const { return static_cast<int>(table_.size()); }
  int num_generators() const { return table_.num_generators(); }
  const CosetTable& cosets() const { return table_; }

  int mul(int g, int h) const {
    return mul_[static_cast<std::size_t>(g) * table_.size() + static_cast<std::size_t>(h)];
  }
  int inverse(int g) const { return inv_[static_cast<std::size_t>(g)]; }
  int generator(int s) const { return table_.act(0, 2 * s); }
  int element(const Word& w) const { return table_.act(0, w); }
  const Word& word(int g) const { return table_.transversal(g); }
  int conjugate(int g, int x) const { return mul(mul(g, x), inverse(g)); }  // g x g^-1

 private:
  CosetTable table_;
  std::vector<int> mul_;
  std::vector<int> inv_;
};

// Enumerates with trivial subgroup. Refuses groups above max_elements so the
// quadratic multiplication table stays bounded.
GroupTable make_group_table(const Presentation& p, std::size_t max_cosets = kDefaultMaxCosets,
                            std::size_t max_elements = 5000);

int element_order(const GroupTable& t, int g);
// Sorted element list of the generated subgroup.
std::vector<int> subgroup_closure(const GroupTable& t, std::span<const int> gens);
bool is_subgroup(const GroupTable& t, std::span<const int> elements);

struct CyclicIntersectionWitness {
  int a, b, c;
  int common;  // nontrivial element of <ab> ∩ <ac>
};
// Empty iff <ab> ∩ <ac> = {1} for all pairwise distinct a, b, c in S.
std::optional<CyclicIntersectionWitness> find_cyclic_intersection(const GroupTable& t, std::span<const int> S);
bool check_cyclic_intersections(const GroupTable& t, std::span<const int> S);

// Orbits under conjugation by the generators, each sorted, ordered by least element.
std::vector<std::vector<int>> conjugacy_classes(const GroupTable& t);

// {"schema":1,"size":q,"generators":[...],"columns":["a","a^-1",...],"action":[[...],...]}
nlohmann::json table_to_json(const CosetTable& t);
CosetTable table_from_json(const nlohmann::json& j);

}  // namespace betti
