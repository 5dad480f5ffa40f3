#include "qgibbs/lattice.hpp"

#include "qgibbs/types.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>

namespace qgibbs {

Region::Region(std::initializer_list<int> sites) : Region(std::vector<int>(sites)) {}

Region::Region(std::vector<int> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool Region::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool Region::contains(const Region& other) const {
  return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(),
                       other.sites_.end());
}

int Region::position(int site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) return -1;
  return static_cast<int>(it - sites_.begin());
}

Lattice::Lattice(std::vector<int> extents, std::vector<Boundary> boundary)
    : extents_(std::move(extents)), boundary_(std::move(boundary)) {
  require(!extents_.empty(), "lattice needs at least one axis");
  if (boundary_.size() == 1 && extents_.size() > 1)
    boundary_.assign(extents_.size(), boundary_.front());
  require(boundary_.size() == extents_.size(),
          "lattice boundary list must match the number of axes");
  strides_.assign(extents_.size(), 1);
  n_ = 1;
  for (int ax = dimension() - 1; ax >= 0; --ax) {
    require(extents_[ax] > 0, "lattice extents must be positive");
    strides_[ax] = n_;
    n_ *= extents_[ax];
  }
}

Lattice Lattice::chain(int n, Boundary b) { return Lattice({n}, {b}); }

Lattice Lattice::square(int lx, int ly, Boundary b) { return Lattice({lx, ly}, {b, b}); }

bool Lattice::fully_periodic() const {
  return std::all_of(boundary_.begin(), boundary_.end(),
                     [](Boundary b) { return b == Boundary::periodic; });
}

void Lattice::check_site(int s) const {
  if (s < 0 || s >= n_)
    throw InvalidArgument("site index " + std::to_string(s) + " out of range [0, " +
                          std::to_string(n_) + ")");
}

std::vector<int> Lattice::coords(int site) const {
  check_site(site);
  std::vector<int> c(extents_.size());
  for (int ax = 0; ax < dimension(); ++ax) c[ax] = (site / strides_[ax]) % extents_[ax];
  return c;
}

int Lattice::site(std::span<const int> c) const {
  require(static_cast<int>(c.size()) == dimension(), "coordinate rank mismatch");
  int s = 0;
  for (int ax = 0; ax < dimension(); ++ax) {
    require(c[ax] >= 0 && c[ax] < extents_[ax], "coordinate out of range");
    s += c[ax] * strides_[ax];
  }
  return s;
}

int Lattice::distance(int a, int b) const {
  const auto ca = coords(a);
  const auto cb = coords(b);
  int d = 0;
  for (int ax = 0; ax < dimension(); ++ax) {
    int delta = std::abs(ca[ax] - cb[ax]);
    if (boundary_[ax] == Boundary::periodic) delta = std::min(delta, extents_[ax] - delta);
    d += delta;
  }
  return d;
}

Region Lattice::ball(int a, int r) const {
  check_site(a);
  require(r >= 0, "ball radius must be nonnegative");
  std::vector<int> sites;
  for (int b = 0; b < n_; ++b)
    if (distance(a, b) <= r) sites.push_back(b);
  return Region(std::move(sites));
}

std::optional<int> Lattice::boundary_distance(const Region& x) const {
  require(!x.empty(), "boundary distance of an empty region");
  if (fully_periodic()) return std::nullopt;
  int best = std::numeric_limits<int>::max();
  for (int a : x) {
    const auto c = coords(a);
    for (int ax = 0; ax < dimension(); ++ax) {
      if (boundary_[ax] == Boundary::periodic) continue;
      best = std::min({best, c[ax] + 1, extents_[ax] - c[ax]});
    }
  }
  return best;
}

int Lattice::diameter() const {
  int d = 0;
  for (int ax = 0; ax < dimension(); ++ax)
    d += boundary_[ax] == Boundary::periodic ? extents_[ax] / 2 : extents_[ax] - 1;
  return d;
}

Region Lattice::all_sites() const {
  std::vector<int> s(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) s[i] = i;
  return Region(std::move(s));
}

std::vector<std::pair<int, int>> Lattice::nearest_neighbor_pairs() const {
  std::set<std::pair<int, int>> edges;
  for (int s = 0; s < n_; ++s) {
    auto c = coords(s);
    for (int ax = 0; ax < dimension(); ++ax) {
      auto nc = c;
      nc[ax] += 1;
      if (nc[ax] == extents_[ax]) {
        if (boundary_[ax] == Boundary::open) continue;
        nc[ax] = 0;
      }
      const int t = site(nc);
      if (t == s) continue;
      edges.insert({std::min(s, t), std::max(s, t)});
    }
  }
  return {edges.begin(), edges.end()};
}

int Lattice::translate(int s, int from, int to) const {
  require(fully_periodic(), "translations need a fully periodic lattice");
  auto cs = coords(s);
  const auto cf = coords(from);
  const auto ct = coords(to);
  for (int ax = 0; ax < dimension(); ++ax)
    cs[ax] = ((cs[ax] + ct[ax] - cf[ax]) % extents_[ax] + extents_[ax]) % extents_[ax];
  return site(cs);
}

}  // namespace qgibbs
