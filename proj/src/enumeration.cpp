#include "betti/enumeration.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "betti/error.hpp"

namespace betti {

std::size_t default_max_cosets() {
  if (const char* env = std::getenv("BETTI_MAX_COSETS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxCosets;
}

// --- CosetTable -------------------------------------------------------------

CosetTable::CosetTable(std::vector<std::string> generators, std::size_t size, std::vector<int> action)
    : generators_(std::move(generators)), size_(size), action_(std::move(action)) {
  const auto cols = static_cast<std::size_t>(num_columns());
  if (size_ == 0) throw Error(ErrorCode::validation, "coset table must have at least one coset");
  if (action_.size() != size_ * cols) throw Error(ErrorCode::validation, "coset table has wrong shape");
  for (std::size_t c = 0; c < size_; ++c) {
    for (std::size_t x = 0; x < cols; ++x) {
      const int d = action_[c * cols + x];
      if (d < 0 || static_cast<std::size_t>(d) >= size_)
        throw Error(ErrorCode::validation, "coset table is incomplete",
                    "coset " + std::to_string(c) + " column " + std::to_string(x));
      if (action_[static_cast<std::size_t>(d) * cols + (x ^ 1U)] != static_cast<int>(c))
        throw Error(ErrorCode::validation, "coset table is inconsistent",
                    "coset " + std::to_string(c) + " column " + std::to_string(x));
    }
  }
  standardize();
}

void CosetTable::standardize() {
  const auto cols = static_cast<std::size_t>(num_columns());
  std::vector<int> renumber(size_, -1);
  std::vector<int> order;
  order.reserve(size_);
  std::vector<int> parent(size_, -1), parent_col(size_, -1);
  renumber[0] = 0;
  order.push_back(0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto c = static_cast<std::size_t>(order[head]);
    for (std::size_t x = 0; x < cols; ++x) {
      const int d = action_[c * cols + x];
      if (renumber[static_cast<std::size_t>(d)] < 0) {
        renumber[static_cast<std::size_t>(d)] = static_cast<int>(order.size());
        parent[order.size()] = static_cast<int>(head);
        parent_col[order.size()] = static_cast<int>(x);
        order.push_back(d);
      }
    }
  }
  if (order.size() != size_)
    throw Error(ErrorCode::validation, "coset table is not transitive from coset 0");

  std::vector<int> fresh(size_ * cols);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto old = static_cast<std::size_t>(order[i]);
    for (std::size_t x = 0; x < cols; ++x)
      fresh[i * cols + x] = renumber[static_cast<std::size_t>(action_[old * cols + x])];
  }
  action_ = std::move(fresh);
  parent_ = std::move(parent);
  parent_column_ = std::move(parent_col);
  transversal_.assign(size_, Word());
  for (std::size_t i = 1; i < size_; ++i) {
    const int col = parent_column_[i];
    transversal_[i] = transversal_[static_cast<std::size_t>(parent_[i])] *
                      Word::from_columns(std::span<const int>(&col, 1));
  }
}

int CosetTable::act(int coset, const Word& w) const {
  for (const Letter& l : w.letters()) {
    const int col = 2 * l.gen + (l.exp < 0 ? 1 : 0);
    for (int i = 0; i < std::abs(l.exp); ++i) coset = act(coset, col);
  }
  return coset;
}

bool CosetTable::satisfies(const std::vector<Word>& relators) const {
  for (const Word& r : relators)
    for (std::size_t c = 0; c < size_; ++c)
      if (act(static_cast<int>(c), r) != static_cast<int>(c)) return false;
  return true;
}

std::size_t CosetTable::fixed_points(const Word& w) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < size_; ++c)
    if (act(static_cast<int>(c), w) == static_cast<int>(c)) ++n;
  return n;
}

// --- Todd-Coxeter -----------------------------------------------------------

namespace {

struct TableFull {};

// HLT enumeration with union-find coincidence processing. When the live
// count reaches the cap, a lookahead pass (scan without defining) runs and
// the table is compacted before giving up.
class Enumerator {
 public:
  Enumerator(const Presentation& p, std::size_t cap, EnumerationStrategy strategy)
      : cols_(static_cast<std::size_t>(2 * p.rank())), cap_(cap), strategy_(strategy) {
    for (const Word& r : p.relators) {
      std::vector<int> c = r.columns();
      if (!c.empty()) relators_.push_back(std::move(c));
    }
    new_coset();
  }

  std::vector<int> run(const std::vector<Word>& subgroup) {
    for (const Word& w : subgroup) {
      const std::vector<int> cols = w.columns();
      if (cols.empty()) continue;
      retry([&] { scan_and_fill(0, cols); });
    }
    std::size_t alpha = 0;
    while (alpha < rows()) {
      if (live(alpha)) {
        bool done = false;
        while (!done) {
          try {
            process(static_cast<int>(alpha));
            done = true;
          } catch (const TableFull&) {
            alpha = relieve(alpha);
            if (alpha >= rows()) break;
          }
        }
      }
      ++alpha;
    }
    compact(0);
    return table_;
  }

  std::size_t rows() const { return parent_.size(); }

 private:
  template <class F>
  void retry(F&& f) {
    for (;;) {
      try {
        f();
        return;
      } catch (const TableFull&) {
        relieve(0);
      }
    }
  }

  // Lookahead then compaction; returns the new index of `alpha`.
  std::size_t relieve(std::size_t alpha) {
    lookahead();
    const std::size_t moved = compact(alpha);
    // A complete table needs no further definitions, so it may sit at the cap.
    if (live_ >= cap_ && !complete()) throw CapExceeded(cap_);
    return moved;
  }

  bool complete() const {
    return std::all_of(table_.begin(), table_.end(), [](int v) { return v >= 0; });
  }

  void process(int alpha) {
    if (strategy_ == EnumerationStrategy::hlt_define_first) {
      define_row(alpha);
      for (auto it = relators_.rbegin(); it != relators_.rend(); ++it) {
        if (!live(static_cast<std::size_t>(alpha))) return;
        scan_and_fill(alpha, *it);
      }
      return;
    }
    for (const auto& r : relators_) {
      if (!live(static_cast<std::size_t>(alpha))) return;
      scan_and_fill(alpha, r);
    }
    define_row(alpha);
  }

  void define_row(int alpha) {
    for (std::size_t x = 0; x < cols_; ++x) {
      if (!live(static_cast<std::size_t>(alpha))) return;
      if (get(alpha, x) < 0) define(alpha, x);
    }
  }

  bool live(std::size_t c) const { return parent_[c] == static_cast<int>(c); }

  int& at(int c, std::size_t x) { return table_[static_cast<std::size_t>(c) * cols_ + x]; }
  int get(int c, std::size_t x) const { return table_[static_cast<std::size_t>(c) * cols_ + x]; }

  int new_coset() {
    if (live_ >= cap_) throw TableFull{};
    const int c = static_cast<int>(rows());
    parent_.push_back(c);
    table_.resize(table_.size() + cols_, -1);
    ++live_;
    return c;
  }

  void define(int f, std::size_t x) {
    const int c = new_coset();
    at(f, x) = c;
    at(c, x ^ 1U) = f;
  }

  void scan_and_fill(int alpha, const std::vector<int>& w) { scan(alpha, w, true); }

  // Scans w from alpha forwards and backwards. With fill, closes a gap of
  // length > 1 by defining new cosets; otherwise only deduces.
  void scan(int alpha, const std::vector<int>& w, bool fill) {
    int f = alpha, b = alpha;
    std::ptrdiff_t i = 0, j = static_cast<std::ptrdiff_t>(w.size()) - 1;
    for (;;) {
      while (i <= j && get(f, static_cast<std::size_t>(w[static_cast<std::size_t>(i)])) >= 0) {
        f = get(f, static_cast<std::size_t>(w[static_cast<std::size_t>(i)]));
        ++i;
      }
      if (i > j) {
        if (f != b) coincidence(f, b);
        return;
      }
      while (j >= i && get(b, static_cast<std::size_t>(w[static_cast<std::size_t>(j)]) ^ 1U) >= 0) {
        b = get(b, static_cast<std::size_t>(w[static_cast<std::size_t>(j)]) ^ 1U);
        --j;
      }
      if (j < i) {
        coincidence(f, b);
        return;
      }
      const auto x = static_cast<std::size_t>(w[static_cast<std::size_t>(i)]);
      if (i == j) {
        at(f, x) = b;
        at(b, x ^ 1U) = f;
        return;
      }
      if (!fill) return;
      define(f, x);
    }
  }

  int rep(int c) {
    int root = c;
    while (parent_[static_cast<std::size_t>(root)] != root) root = parent_[static_cast<std::size_t>(root)];
    while (parent_[static_cast<std::size_t>(c)] != root) {
      const int next = parent_[static_cast<std::size_t>(c)];
      parent_[static_cast<std::size_t>(c)] = root;
      c = next;
    }
    return root;
  }

  void merge(int k, int l, std::vector<int>& queue) {
    const int a = rep(k), b = rep(l);
    if (a == b) return;
    const int lo = std::min(a, b), hi = std::max(a, b);
    parent_[static_cast<std::size_t>(hi)] = lo;
    --live_;
    queue.push_back(hi);
  }

  void coincidence(int alpha, int beta) {
    std::vector<int> queue;
    merge(alpha, beta, queue);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const int gamma = queue[i];
      for (std::size_t x = 0; x < cols_; ++x) {
        const int delta = get(gamma, x);
        if (delta < 0) continue;
        at(delta, x ^ 1U) = -1;
        const int mu = rep(gamma), nu = rep(delta);
        if (get(mu, x) >= 0) {
          merge(nu, get(mu, x), queue);
        } else if (get(nu, x ^ 1U) >= 0) {
          merge(mu, get(nu, x ^ 1U), queue);
        } else {
          at(mu, x) = nu;
          at(nu, x ^ 1U) = mu;
        }
      }
    }
  }

  void lookahead() {
    for (std::size_t c = 0; c < rows(); ++c) {
      for (const auto& r : relators_) {
        if (!live(c)) break;
        scan(static_cast<int>(c), r, false);
      }
    }
  }

  // Renumbers live cosets consecutively (order preserved). Returns the new
  // index of the first live coset at or after `alpha`.
  std::size_t compact(std::size_t alpha) {
    std::vector<int> index(rows(), -1);
    std::size_t next = 0, moved = 0;
    bool seen = false;
    for (std::size_t c = 0; c < rows(); ++c) {
      if (!seen && c >= alpha) {
        moved = next;
        seen = true;
      }
      if (live(c)) index[c] = static_cast<int>(next++);
    }
    if (!seen) moved = next;
    std::vector<int> fresh(next * cols_, -1);
    for (std::size_t c = 0; c < rows(); ++c) {
      if (!live(c)) continue;
      for (std::size_t x = 0; x < cols_; ++x) {
        const int d = get(static_cast<int>(c), x);
        fresh[static_cast<std::size_t>(index[c]) * cols_ + x] =
            d < 0 ? -1 : index[static_cast<std::size_t>(rep(d))];
      }
    }
    table_ = std::move(fresh);
    parent_.resize(next);
    std::iota(parent_.begin(), parent_.end(), 0);
    live_ = next;
    return moved;
  }

  std::size_t cols_;
  std::size_t cap_;
  EnumerationStrategy strategy_;
  std::vector<std::vector<int>> relators_;
  std::vector<int> table_;
  std::vector<int> parent_;
  std::size_t live_ = 0;
};

}  // namespace

CosetTable enumerate_cosets(const Presentation& p, const std::vector<Word>& subgroup_gens, std::size_t max_cosets,
                            EnumerationStrategy strategy) {
  if (max_cosets < 1) throw Error(ErrorCode::invalid_argument, "max_cosets must be positive");
  if (p.rank() == 0) throw Error(ErrorCode::empty_generators, "presentation has no generators");
  for (const Word& w : subgroup_gens)
    for (const Letter& l : w.letters())
      if (l.gen < 0 || l.gen >= p.rank()) throw Error(ErrorCode::invalid_argument, "subgroup word uses unknown generator");
  Enumerator e(p, max_cosets, strategy);
  std::vector<int> action = e.run(subgroup_gens);
  const std::size_t size = action.size() / static_cast<std::size_t>(2 * p.rank());
  CosetTable table(p.generators, size, std::move(action));
  if (!table.satisfies(p.relators))
    throw Error(ErrorCode::internal, "enumerated table does not satisfy the relators");
  for (const Word& w : subgroup_gens)
    if (table.act(0, w) != 0) throw Error(ErrorCode::internal, "subgroup generator moves the base coset");
  return table;
}

// --- GroupTable -------------------------------------------------------------

GroupTable::GroupTable(CosetTable regular) : table_(std::move(regular)) {
  const std::size_t n = table_.size();
  mul_.assign(n * n, -1);
  inv_.assign(n, -1);
  for (std::size_t g = 0; g < n; ++g) {
    mul_[g * n] = static_cast<int>(g);
    for (std::size_t h = 1; h < n; ++h) {
      const auto ph = static_cast<std::size_t>(table_.parent(static_cast<int>(h)));
      mul_[g * n + h] = table_.act(mul_[g * n + ph], table_.parent_column(static_cast<int>(h)));
    }
  }
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h)
      if (mul_[g * n + h] == 0) {
        inv_[g] = static_cast<int>(h);
        break;
      }
  // Regular action must be free: every element has a unique inverse and rows are permutations.
  for (std::size_t g = 0; g < n; ++g) {
    if (inv_[g] < 0) throw Error(ErrorCode::validation, "table is not a regular action");
    std::vector<char> seen(n, 0);
    for (std::size_t h = 0; h < n; ++h) {
      const auto v = static_cast<std::size_t>(mul_[g * n + h]);
      if (seen[v]) throw Error(ErrorCode::validation, "table is not a regular action");
      seen[v] = 1;
    }
  }
}

GroupTable make_group_table(const Presentation& p, std::size_t max_cosets, std::size_t max_elements) {
  CosetTable t = enumerate_cosets(p, {}, max_cosets);
  if (t.size() > max_elements)
    throw Error(ErrorCode::precondition, "group of order " + std::to_string(t.size()) +
                                             " exceeds the element limit " + std::to_string(max_elements));
  return GroupTable(std::move(t));
}

int element_order(const GroupTable& t, int g) {
  int x = g, n = 1;
  while (x != 0) {
    x = t.mul(x, g);
    ++n;
  }
  return n;
}

std::vector<int> subgroup_closure(const GroupTable& t, std::span<const int> gens) {
  std::vector<char> in(t.size(), 0);
  std::vector<int> elements{0};
  in[0] = 1;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (int s : gens) {
      const int x = t.mul(elements[i], s);
      if (!in[static_cast<std::size_t>(x)]) {
        in[static_cast<std::size_t>(x)] = 1;
        elements.push_back(x);
      }
    }
  }
  // In a finite group closure under products already contains inverses.
  std::sort(elements.begin(), elements.end());
  return elements;
}

bool is_subgroup(const GroupTable& t, std::span<const int> elements) {
  std::vector<char> in(t.size(), 0);
  for (int g : elements) {
    if (g < 0 || static_cast<std::size_t>(g) >= t.size()) return false;
    in[static_cast<std::size_t>(g)] = 1;
  }
  if (!in[0]) return false;
  for (int g : elements) {
    if (!in[static_cast<std::size_t>(t.inverse(g))]) return false;
    for (int h : elements)
      if (!in[static_cast<std::size_t>(t.mul(g, h))]) return false;
  }
  return true;
}

std::optional<CyclicIntersectionWitness> find_cyclic_intersection(const GroupTable& t, std::span<const int> S) {
  const std::size_t n = S.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const int ab = t.mul(S[i], S[j]);
      const std::vector<int> cab = subgroup_closure(t, std::span<const int>(&ab, 1));
      for (std::size_t k = j + 1; k < n; ++k) {
        if (k == i) continue;
        const int ac = t.mul(S[i], S[k]);
        const std::vector<int> cac = subgroup_closure(t, std::span<const int>(&ac, 1));
        std::vector<int> common;
        std::set_intersection(cab.begin(), cab.end(), cac.begin(), cac.end(), std::back_inserter(common));
        if (common.size() > 1) return CyclicIntersectionWitness{S[i], S[j], S[k], common[1]};
      }
    }
  }
  return std::nullopt;
}

bool check_cyclic_intersections(const GroupTable& t, std::span<const int> S) {
  return !find_cyclic_intersection(t, S).has_value();
}

std::vector<std::vector<int>> conjugacy_classes(const GroupTable& t) {
  const std::size_t n = t.size();
  std::vector<int> cls(n, -1);
  std::vector<std::vector<int>> classes;
  for (std::size_t g = 0; g < n; ++g) {
    if (cls[g] >= 0) continue;
    const int id = static_cast<int>(classes.size());
    std::vector<int> orbit{static_cast<int>(g)};
    cls[g] = id;
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      for (int s = 0; s < t.num_generators(); ++s) {
        const int y = t.conjugate(t.generator(s), orbit[i]);
        if (cls[static_cast<std::size_t>(y)] < 0) {
          cls[static_cast<std::size_t>(y)] = id;
          orbit.push_back(y);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    classes.push_back(std::move(orbit));
  }
  return classes;
}

// --- JSON -------------------------------------------------------------------

nlohmann::json table_to_json(const CosetTable& t) {
  nlohmann::json j;
  j["schema"] = 1;
  j["size"] = t.size();
  j["generators"] = t.generators();
  nlohmann::json columns = nlohmann::json::array();
  for (const std::string& g : t.generators()) {
    columns.push_back(g);
    columns.push_back(g + "^-1");
  }
  j["columns"] = columns;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < t.size(); ++c) {
    nlohmann::json row = nlohmann::json::array();
    for (int x = 0; x < t.num_columns(); ++x) row.push_back(t.act(static_cast<int>(c), x));
    rows.push_back(std::move(row));
  }
  j["action"] = std::move(rows);
  return j;
}

CosetTable table_from_json(const nlohmann::json& j) {
  try {
    auto gens = j.at("generators").get<std::vector<std::string>>();
    const auto size = j.at("size").get<std::size_t>();
    const auto& rows = j.at("action");
    const std::size_t cols = 2 * gens.size();
    if (!rows.is_array() || rows.size() != size) throw Error(ErrorCode::validation, "action has wrong row count");
    std::vector<int> action;
    action.reserve(size * cols);
    for (const auto& row : rows) {
      if (!row.is_array()) throw Error(ErrorCode::validation, "action row is not an array");
      if (row.size() == cols) {
        for (const auto& v : row) action.push_back(v.get<int>());
      } else if (row.size() == gens.size()) {
        // Generator columns only; inverses filled in below.
        for (const auto& v : row) {
          action.push_back(v.get<int>());
          action.push_back(-1);
        }
      } else {
        throw Error(ErrorCode::validation, "action row has wrong length");
      }
    }
    for (std::size_t c = 0; c < size; ++c)
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const int d = action[c * cols + 2 * g];
        if (d >= 0 && static_cast<std::size_t>(d) < size && action[static_cast<std::size_t>(d) * cols + 2 * g + 1] < 0)
          action[static_cast<std::size_t>(d) * cols + 2 * g + 1] = static_cast<int>(c);
      }
    return CosetTable(std::move(gens), size, std::move(action));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, std::string("malformed table JSON: ") + e.what());
  }
}

}  // namespace betti
