#include "planarmvs/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>

#include "planarmvs/errors.hpp"

namespace planarmvs {

namespace {

constexpr int kGhost = -1;

struct Tri {
  std::array<int, 3> v;    // kGhost allowed in slot 2 only
  std::array<int, 3> adj;  // adj[i] shares the edge opposite v[i]
  bool alive = true;

  bool ghost() const { return v[2] == kGhost; }
};

// > 0 when (a, b, c) makes a counterclockwise turn (positive cross product).
std::int64_t orient(const Eigen::Vector2i &a, const Eigen::Vector2i &b,
                    const Eigen::Vector2i &c) {
  const std::int64_t abx = b.x() - a.x(), aby = b.y() - a.y();
  const std::int64_t acx = c.x() - a.x(), acy = c.y() - a.y();
  return abx * acy - aby * acx;
}

// > 0 when d lies strictly inside the circumcircle of the CCW triangle
// (a, b, c).  Exact for pixel coordinates (128-bit accumulation).
__int128 incircle(const Eigen::Vector2i &a, const Eigen::Vector2i &b, const Eigen::Vector2i &c,
                  const Eigen::Vector2i &d) {
  const std::int64_t adx = a.x() - d.x(), ady = a.y() - d.y();
  const std::int64_t bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const std::int64_t cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const __int128 ad2 = static_cast<__int128>(adx) * adx + static_cast<__int128>(ady) * ady;
  const __int128 bd2 = static_cast<__int128>(bdx) * bdx + static_cast<__int128>(bdy) * bdy;
  const __int128 cd2 = static_cast<__int128>(cdx) * cdx + static_cast<__int128>(cdy) * cdy;
  const __int128 m_a = static_cast<__int128>(bdx) * cdy - static_cast<__int128>(bdy) * cdx;
  const __int128 m_b = static_cast<__int128>(adx) * cdy - static_cast<__int128>(ady) * cdx;
  const __int128 m_c = static_cast<__int128>(adx) * bdy - static_cast<__int128>(ady) * bdx;
  return ad2 * m_a - bd2 * m_b + cd2 * m_c;
}

class Builder {
 public:
  explicit Builder(const std::vector<Eigen::Vector2i> &pts) : pts_(pts) {}

  std::vector<std::array<int, 3>> run() {
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (pts_[a].y() != pts_[b].y()) return pts_[a].y() < pts_[b].y();
      return pts_[a].x() < pts_[b].x();
    });
    for (std::size_t i = 1; i < order_.size(); ++i)
      if (pts_[order_[i - 1]] == pts_[order_[i]])
        throw ValidationError("delaunay: duplicate points");

    seed();
    for (const int idx : order_) {
      if (idx == seed_[0] || idx == seed_[1] || idx == seed_[2]) continue;
      insert(idx);
    }
    return finish();
  }

 private:
  const std::vector<Eigen::Vector2i> &pts_;
  std::vector<int> order_;
  std::vector<Tri> tris_;
  std::array<int, 3> seed_{};
  int last_ = 0;

  const Eigen::Vector2i &at(int v) const { return pts_[v]; }

  // First two sorted points plus the first non-collinear one form the seed
  // triangle; the skipped collinear points are inserted afterwards.
  void seed() {
    const int a = order_[0], b = order_[1];
    int c = -1;
    for (std::size_t i = 2; i < order_.size(); ++i) {
      if (orient(at(a), at(b), at(order_[i])) != 0) {
        c = order_[i];
        break;
      }
    }
    if (c < 0) throw InsufficientSupportError("delaunay: all points are collinear");
    seed_ = {a, b, c};

    std::array<int, 3> v = {a, b, c};
    if (orient(at(a), at(b), at(c)) < 0) std::swap(v[1], v[2]);
    const int t = add_tri({v[0], v[1], v[2]});
    add_tri({v[1], v[0], kGhost});
    add_tri({v[2], v[1], kGhost});
    add_tri({v[0], v[2], kGhost});
    wire_all({t, t + 1, t + 2, t + 3});
  }

  int add_tri(std::array<int, 3> v) {
    tris_.push_back(Tri{v, {-1, -1, -1}, true});
    return static_cast<int>(tris_.size()) - 1;
  }

  // Links adjacency among the given triangles by matching undirected edges;
  // edges already half-wired (adj set on the other side) are honored.
  void wire_all(const std::vector<int> &tri_ids) {
    std::map<std::pair<int, int>, std::pair<int, int>> open;  // edge -> (tri, slot)
    auto key = [](int x, int y) { return std::make_pair(std::min(x, y), std::max(x, y)); };
    for (const int ti : tri_ids) {
      for (int s = 0; s < 3; ++s) {
        const int x = tris_[ti].v[(s + 1) % 3], y = tris_[ti].v[(s + 2) % 3];
        auto [it, inserted] = open.emplace(key(x, y), std::make_pair(ti, s));
        if (!inserted) {
          const auto [tj, sj] = it->second;
          tris_[ti].adj[s] = tj;
          tris_[tj].adj[sj] = ti;
        }
      }
    }
  }

  bool in_disk(const Tri &t, const Eigen::Vector2i &p) const {
    if (t.ghost()) {
      const auto &u = at(t.v[0]);
      const auto &v = at(t.v[1]);
      const std::int64_t o = orient(u, v, p);
      if (o != 0) return o > 0;
      // Collinear with the hull edge: inside its open segment joins the
      // cavity (p splits this hull edge); beyond it is handled by the
      // neighboring corner ghost.
      const std::int64_t d =
          static_cast<std::int64_t>(p.x() - u.x()) * (p.x() - v.x()) +
          static_cast<std::int64_t>(p.y() - u.y()) * (p.y() - v.y());
      return d < 0;
    }
    return incircle(at(t.v[0]), at(t.v[1]), at(t.v[2]), p) > 0;
  }

  int locate(const Eigen::Vector2i &p) const {
    int t = last_;
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri &tri = tris_[t];
      if (tri.ghost()) {
        if (in_disk(tri, p)) return t;
        t = tri.adj[2];  // inward across the hull edge
        continue;
      }
      int next = -1;
      for (int s = 0; s < 3; ++s) {
        if (orient(at(tri.v[(s + 1) % 3]), at(tri.v[(s + 2) % 3]), p) < 0) {
          next = tri.adj[s];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Exhaustive fallback; unreachable with exact predicates but guarantees
    // termination.
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (tris_[i].alive && in_disk(tris_[i], p)) return static_cast<int>(i);
    throw InternalError("delaunay: point location failed");
  }

  void insert(int pi) {
    const Eigen::Vector2i &p = at(pi);
    int start = locate(p);
    if (!in_disk(tris_[start], p)) {
      // p sits inside (or on the boundary of) the located triangle but on
      // its circumcircle; any incident triangle with p in its open disk
      // seeds the cavity (must exist, p being distinct from all vertices).
      bool found = false;
      for (int s = 0; s < 3 && !found; ++s) {
        const int n = tris_[start].adj[s];
        if (n >= 0 && in_disk(tris_[n], p)) {
          start = n;
          found = true;
        }
      }
      if (!found) throw InternalError("delaunay: empty cavity");
    }

    // Cavity BFS over the open-circumdisk predicate.
    std::vector<int> cavity{start};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[start] = 1;
    std::vector<std::array<int, 4>> boundary;  // a, b, ext tri, ext slot
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      const int ti = cavity[i];
      for (int s = 0; s < 3; ++s) {
        const int n = tris_[ti].adj[s];
        if (in_cavity[n]) continue;
        if (in_disk(tris_[n], p)) {
          in_cavity[n] = 1;
          cavity.push_back(n);
        } else {
          // Directed boundary edge as stored in the cavity triangle.
          const int a = tris_[ti].v[(s + 1) % 3], b = tris_[ti].v[(s + 2) % 3];
          int ext_slot = -1;
          for (int q = 0; q < 3; ++q)
            if (tris_[n].adj[q] == ti) ext_slot = q;
          boundary.push_back({a, b, n, ext_slot});
        }
      }
    }

    std::vector<int> fresh;
    for (const auto &[a, b, ext, ext_slot] : boundary) {
      std::array<int, 3> v{pi, a, b};
      // Keep the ghost vertex in slot 2.
      if (v[1] == kGhost) v = {v[2], v[0], v[1]};
      const int nt = add_tri(v);
      fresh.push_back(nt);
      // Wire the external side directly; slot of edge (a, b) in nt is the
      // one opposite the remaining vertex.
      int slot = -1;
      for (int s = 0; s < 3; ++s)
        if (tris_[nt].v[s] != a && tris_[nt].v[s] != b) slot = s;
      tris_[nt].adj[slot] = ext;
      tris_[ext].adj[ext_slot] = nt;
    }
    // Internal wiring among the fresh star triangles.
    {
      std::map<std::pair<int, int>, std::pair<int, int>> open;
      auto key = [](int x, int y) { return std::make_pair(std::min(x, y), std::max(x, y)); };
      for (const int ti : fresh) {
        for (int s = 0; s < 3; ++s) {
          if (tris_[ti].adj[s] >= 0) continue;
          const int x = tris_[ti].v[(s + 1) % 3], y = tris_[ti].v[(s + 2) % 3];
          auto [it, inserted] = open.emplace(key(x, y), std::make_pair(ti, s));
          if (!inserted) {
            const auto [tj, sj] = it->second;
            tris_[ti].adj[s] = tj;
            tris_[tj].adj[sj] = ti;
          }
        }
      }
    }
    for (const int ti : cavity) tris_[ti].alive = false;
    last_ = fresh.front();
  }

  std::vector<std::array<int, 3>> finish() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri &t : tris_) {
      if (!t.alive || t.ghost()) continue;
      std::array<int, 3> tri = t.v;
      // Rotate the smallest index first (orientation preserved).
      const int lo = static_cast<int>(std::min_element(tri.begin(), tri.end()) - tri.begin());
      std::rotate(tri.begin(), tri.begin() + lo, tri.end());
      out.push_back(tri);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Eigen::Vector2i> &points) {
  if (points.size() < 3)
    throw ValidationError("delaunay: need at least 3 points, got " +
                          std::to_string(points.size()));
  Builder builder(points);
  return builder.run();
}

}  // namespace planarmvs
