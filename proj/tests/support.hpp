// Shared corpus and independent oracles for the test programs.
#pragma once

#include <array>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "betti/presentation.hpp"
#include "betti/scalar.hpp"

namespace support {

using Perm = std::vector<int>;

struct CorpusGroup {
  std::string name;
  std::string text;
  std::vector<Perm> images;  // faithful permutation images of the generators
};

inline Perm compose(const Perm& p, const Perm& q) {  // apply p, then q
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[static_cast<std::size_t>(p[i])];
  return r;
}

inline Perm invert(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return r;
}

inline Perm identity_perm(std::size_t n) {
  Perm r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<int>(i);
  return r;
}

inline Perm evaluate(const betti::Word& w, const std::vector<Perm>& images) {
  Perm r = identity_perm(images.front().size());
  for (const betti::Letter& l : w.letters()) {
    const Perm& g = images[static_cast<std::size_t>(l.gen)];
    const Perm step = l.exp > 0 ? g : invert(g);
    for (int i = 0; i < std::abs(l.exp); ++i) r = compose(r, step);
  }
  return r;
}

// Order of the permutation group generated by the images.
inline std::size_t closure_size(const std::vector<Perm>& images) {
  std::set<Perm> seen{identity_perm(images.front().size())};
  std::vector<Perm> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const Perm& g : frontier)
      for (const Perm& s : images) {
        Perm h = compose(g, s);
        if (seen.insert(h).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return seen.size();
}

inline Perm cycle_perm(std::size_t n, std::vector<int> cycle) {
  Perm p = identity_perm(n);
  for (std::size_t i = 0; i < cycle.size(); ++i)
    p[static_cast<std::size_t>(cycle[i])] = cycle[(i + 1) % cycle.size()];
  return p;
}

// Right multiplication by a quaternion unit on {1, i, j, k, -1, -i, -j, -k}.
inline Perm quaternion_perm(int unit) {
  // Index u + 4 s encodes (-1)^s e_u, e = (1, i, j, k).
  static const int table[4][4] = {{0, 1, 2, 3}, {1, 4, 3, 6}, {2, 7, 4, 1}, {3, 2, 5, 4}};
  Perm p(8);
  for (int x = 0; x < 8; ++x) {
    const int r = table[x % 4][unit];
    p[static_cast<std::size_t>(x)] = (r % 4) + 4 * (((r / 4) + (x / 4)) % 2);
  }
  return p;
}

// Unitriangular 3x3 matrices over F_3 acting on F_3^3 (row vectors).
inline Perm heisenberg_perm(int which) {
  Perm p(27);
  for (int v = 0; v < 27; ++v) {
    std::array<int, 3> x{v % 3, (v / 3) % 3, v / 9};
    std::array<int, 3> y = x;
    if (which == 0) y[1] = (x[1] + x[0]) % 3;  // x -> x * E12
    else y[2] = (x[2] + x[1]) % 3;              // x -> x * E23
    p[static_cast<std::size_t>(v)] = y[0] + 3 * y[1] + 9 * y[2];
  }
  return p;
}

inline std::vector<CorpusGroup> corpus() {
  std::vector<CorpusGroup> out;
  for (int n = 1; n <= 12; ++n) {
    std::vector<int> cyc(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cyc[static_cast<std::size_t>(i)] = i;
    out.push_back({"Z/" + std::to_string(n), "<a | a^" + std::to_string(n) + ">",
                   {cycle_perm(static_cast<std::size_t>(n), cyc)}});
  }
  out.push_back({"S3", "<a, b | a^2, b^2, (ab)^3>", {cycle_perm(3, {0, 1}), cycle_perm(3, {1, 2})}});
  // c = aba, the third transposition.
  const Perm a3 = cycle_perm(3, {0, 1}), b3 = cycle_perm(3, {1, 2});
  out.push_back({"S3 (3 generators)", "<a, b, c | a^2, b^2, c^2, (ab)^3, abac>", {a3, b3, compose(compose(a3, b3), a3)}});
  out.push_back({"D4", "<r, s | r^4, s^2, (rs)^2>", {cycle_perm(4, {0, 1, 2, 3}), cycle_perm(4, {1, 3})}});
  out.push_back({"Q8", "<i, j | i^4, i^2 j^-2, i j i j^-1>", {quaternion_perm(1), quaternion_perm(2)}});
  out.push_back({"Heisenberg mod 3", "<x, y | x^3, y^3, [x,y]^3, [[x,y],x], [[x,y],y]>",
                 {heisenberg_perm(0), heisenberg_perm(1)}});
  out.push_back({"B(2,3)", "<a, b | a^3, b^3, (ab)^3, (ab^-1)^3>", {heisenberg_perm(0), heisenberg_perm(1)}});
  return out;
}

// Rank over Q by plain Gaussian elimination on fractions (independent of
// the library's Bareiss routine).
inline std::size_t oracle_rank(std::vector<std::vector<betti::Rational>> m) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m.front().size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const betti::Rational f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline std::string data_path(const std::string& name) { return std::string(BETTI_DATA_DIR) + "/" + name; }

}  // namespace support
