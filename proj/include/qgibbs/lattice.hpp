#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qgibbs {

enum class Boundary { open, periodic };

/// Sorted, deduplicated set of site indices.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<int> sites);
  explicit Region(std::vector<int> sites);

  const std::vector<int>& sites() const { return sites_; }
  int size() const { return static_cast<int>(sites_.size()); }
  bool empty() const { return sites_.empty(); }
  bool contains(int site) const;
  bool contains(const Region& other) const;
  /// Position of `site` within the canonical order, or -1.
  int position(int site) const;

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  int operator[](int i) const { return sites_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<int> sites_;
};

/// D-dimensional square lattice, row-major site numbering (last axis fastest).
class Lattice {
 public:
  Lattice(std::vector<int> extents, std::vector<Boundary> boundary);

  static Lattice chain(int n, Boundary b = Boundary::periodic);
  static Lattice square(int lx, int ly, Boundary b = Boundary::periodic);

  int dimension() const { return static_cast<int>(extents_.size()); }
  int size() const { return n_; }
  const std::vector<int>& extents() const { return extents_; }
  const std::vector<Boundary>& boundary() const { return boundary_; }
  bool fully_periodic() const;

  std::vector<int> coords(int site) const;
  int site(std::span<const int> coords) const;

  /// Manhattan distance with per-axis wraparound on periodic axes.
  int distance(int a, int b) const;
  /// All sites b with distance(a, b) <= r.
  Region ball(int a, int r) const;
  /// Min over X of the distance to the nearest site outside the lattice;
  /// std::nullopt when every axis is periodic.
  std::optional<int> boundary_distance(const Region& x) const;
  int diameter() const;
  Region all_sites() const;

  /// Unordered nearest-neighbour pairs (i < j), each listed once.
  std::vector<std::pair<int, int>> nearest_neighbor_pairs() const;

  /// Site reached from `site` by the lattice shift taking `from` to `to`.
  /// Requires a fully periodic lattice.
  int translate(int site, int from, int to) const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  void check_site(int s) const;

  std::vector<int> extents_;
  std::vector<Boundary> boundary_;
  std::vector<int> strides_;
  int n_ = 0;
};

}  // namespace qgibbs
