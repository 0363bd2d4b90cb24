#include "gridlay/error.hpp"
#include "gridlay/pointcloud.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace gridlay {

namespace {

using Real = long double;

struct P3 {
  Real x = 0, y = 0, z = 0;
};

P3 operator-(const P3& a, const P3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Real dot(const P3& a, const P3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
P3 cross(const P3& a, const P3& b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
Real norm2(const P3& a) { return dot(a, a); }

// (b - a) . ((c - a) x (d - a)); positive when d lies on the side of abc that the
// right-hand rule over a -> b -> c points to.
Real orient(const P3& a, const P3& b, const P3& c, const P3& d) { return dot(b - a, cross(c - a, d - a)); }

Real det3(const P3& r0, const P3& r1, const P3& r2) { return dot(r0, cross(r1, r2)); }

// True when e is strictly inside the circumsphere of the positively oriented tetrahedron abcd.
bool insphere(const P3& a, const P3& b, const P3& c, const P3& d, const P3& e) {
  const P3 ra = a - e, rb = b - e, rc = c - e, rd = d - e;
  const Real det = -norm2(ra) * det3(rb, rc, rd) + norm2(rb) * det3(ra, rc, rd) - norm2(rc) * det3(ra, rb, rd) +
                   norm2(rd) * det3(ra, rb, rc);
  return det < 0;
}

// Deterministic per-index offset of magnitude <= kJitter per coordinate, so that predicates
// never see exactly cospherical or coplanar input.
constexpr double kJitter = 1e-9;
constexpr double kFlat = 1e-8; // relative thickness below which a cloud counts as flat

double jitter(std::uint64_t index, std::uint64_t axis) {
  std::uint64_t z = index * 3 + axis + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return kJitter * (2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0);
}

constexpr int kInf = -1;

struct Tet {
  std::array<int, 4> v{};
  bool alive = true;
  bool finite = true;
  bool sphere_ok = false; ///< cached circumsphere is accurate enough for quick decisions
  P3 center;
  Real radius2 = 0;
};

class Delaunay3 {
public:
  explicit Delaunay3(std::vector<P3> pts) : q_(std::move(pts)), n_(q_.size()) {}

  // `first` holds four affinely independent point indices.
  void run(std::array<int, 4> first) {
    if (orient(q_[first[0]], q_[first[1]], q_[first[2]], q_[first[3]]) < 0) std::swap(first[0], first[1]);
    const int root = add(first);
    for (int k = 0; k < 4; ++k) {
      std::array<int, 4> v = first;
      v[static_cast<std::size_t>(k)] = kInf;
      canonical(v);
      std::swap(v[0], v[1]); // the neighbor lies on the other side of the shared face
      add(v);
    }
    (void)root;
    std::vector<char> used(n_, 0);
    for (int i : first) used[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < n_; ++i)
      if (!used[i]) insert(static_cast<int>(i));
  }

  std::vector<std::array<int, 4>> finite_tets() const {
    std::vector<std::array<int, 4>> out;
    for (const auto& t : tets_)
      if (t.alive && t.finite) out.push_back(t.v);
    return out;
  }

private:
  std::vector<P3> q_;
  std::size_t n_;
  std::vector<Tet> tets_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> faces_;

  std::uint64_t face_key(int a, int b, int c) const {
    std::array<std::uint64_t, 3> k{static_cast<std::uint64_t>(a < 0 ? static_cast<int>(n_) : a),
                                   static_cast<std::uint64_t>(b < 0 ? static_cast<int>(n_) : b),
                                   static_cast<std::uint64_t>(c < 0 ? static_cast<int>(n_) : c)};
    std::sort(k.begin(), k.end());
    const std::uint64_t m = n_ + 1;
    return (k[0] * m + k[1]) * m + k[2];
  }

  std::uint64_t face_of(const Tet& t, int k) const {
    std::array<int, 3> f{};
    int w = 0;
    for (int i = 0; i < 4; ++i)
      if (i != k) f[static_cast<std::size_t>(w++)] = t.v[static_cast<std::size_t>(i)];
    return face_key(f[0], f[1], f[2]);
  }

  // Moves kInf to the last slot with an even permutation.
  static void canonical(std::array<int, 4>& v) {
    for (std::size_t j = 0; j < 3; ++j)
      if (v[j] == kInf) {
        std::swap(v[j], v[3]);
        if (j == 2) std::swap(v[0], v[1]);
        else std::swap(v[j == 0 ? 1 : 0], v[2]);
        return;
      }
  }

  int add(const std::array<int, 4>& v) {
    Tet t;
    t.v = v;
    t.finite = v[3] != kInf;
    if (t.finite) {
      const P3& a = q_[static_cast<std::size_t>(v[0])];
      const P3 u = q_[static_cast<std::size_t>(v[1])] - a;
      const P3 w = q_[static_cast<std::size_t>(v[2])] - a;
      const P3 x = q_[static_cast<std::size_t>(v[3])] - a;
      const Real vol = dot(u, cross(w, x));
      const Real len = std::sqrt(std::max({norm2(u), norm2(w), norm2(x)}));
      if (vol > 0 && vol > 1e-6L * len * len * len) {
        const P3 s = cross(w, x), r = cross(x, u), o = cross(u, w);
        const Real lu = norm2(u), lw = norm2(w), lx = norm2(x);
        const P3 off{(lu * s.x + lw * r.x + lx * o.x) / (2 * vol), (lu * s.y + lw * r.y + lx * o.y) / (2 * vol),
                     (lu * s.z + lw * r.z + lx * o.z) / (2 * vol)};
        t.center = {a.x + off.x, a.y + off.y, a.z + off.z};
        t.radius2 = norm2(off);
        t.sphere_ok = true;
      }
    }
    const int id = static_cast<int>(tets_.size());
    tets_.push_back(t);
    for (int k = 0; k < 4; ++k) {
      auto [it, inserted] = faces_.try_emplace(face_of(tets_.back(), k), std::array<int, 2>{-1, -1});
      auto& slot = it->second;
      if (slot[0] == -1) slot[0] = id;
      else slot[1] = id;
    }
    return id;
  }

  void remove(int id) {
    Tet& t = tets_[static_cast<std::size_t>(id)];
    t.alive = false;
    for (int k = 0; k < 4; ++k) {
      auto it = faces_.find(face_of(t, k));
      auto& slot = it->second;
      if (slot[0] == id) slot[0] = slot[1];
      slot[1] = -1;
      if (slot[0] == -1) faces_.erase(it);
    }
  }

  int neighbor(int id, int k) const {
    const auto& slot = faces_.at(face_of(tets_[static_cast<std::size_t>(id)], k));
    return slot[0] == id ? slot[1] : slot[0];
  }

  const P3& pt(int i) const { return q_[static_cast<std::size_t>(i)]; }

  // Signed side of e relative to the hull face of an infinite tet: positive is outside.
  Real hull_side(const Tet& t, const P3& e) const { return orient(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), e); }

  bool in_circumcircle(const Tet& t, const P3& e) const {
    const P3& a = pt(t.v[0]);
    const P3 u = pt(t.v[1]) - a, w = pt(t.v[2]) - a;
    const P3 nrm = cross(u, w);
    const Real nn = norm2(nrm);
    if (!(nn > 0)) return false;
    const P3 s = cross(nrm, u), r = cross(w, nrm);
    const Real lu = norm2(u), lw = norm2(w);
    const P3 off{(lw * s.x + lu * r.x) / (2 * nn), (lw * s.y + lu * r.y) / (2 * nn), (lw * s.z + lu * r.z) / (2 * nn)};
    const P3 c{a.x + off.x, a.y + off.y, a.z + off.z};
    return norm2(e - c) < norm2(off);
  }

  bool conflict(const Tet& t, const P3& e) const {
    if (!t.finite) {
      const Real side = hull_side(t, e);
      const P3 nrm = cross(pt(t.v[1]) - pt(t.v[0]), pt(t.v[2]) - pt(t.v[0]));
      const Real band = 1e-12L * std::sqrt(norm2(nrm));
      if (side > band) return true;
      if (side < -band) return false;
      return in_circumcircle(t, e);
    }
    if (t.sphere_ok) {
      const Real d2 = norm2(e - t.center);
      const Real band = 1e-9L * t.radius2;
      if (d2 < t.radius2 - band) return true;
      if (d2 > t.radius2 + band) return false;
    }
    return insphere(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), pt(t.v[3]), e);
  }

  bool contains(const Tet& t, const P3& e) const {
    if (!t.finite) return hull_side(t, e) > 0;
    if (t.sphere_ok && norm2(e - t.center) > t.radius2 * (1 + 1e-9L)) return false;
    const P3 &a = pt(t.v[0]), &b = pt(t.v[1]), &c = pt(t.v[2]), &d = pt(t.v[3]);
    return orient(e, b, c, d) >= 0 && orient(a, e, c, d) >= 0 && orient(a, b, e, d) >= 0 && orient(a, b, c, e) >= 0;
  }

  void insert(int p) {
    const P3& e = pt(p);
    int seed = -1;
    for (std::size_t i = 0; i < tets_.size() && seed < 0; ++i)
      if (tets_[i].alive && contains(tets_[i], e)) seed = static_cast<int>(i);
    if (seed < 0)
      for (std::size_t i = 0; i < tets_.size() && seed < 0; ++i)
        if (tets_[i].alive && conflict(tets_[i], e)) seed = static_cast<int>(i);
    if (seed < 0) throw Error("Delaunay insertion found no conflicting cell for point " + std::to_string(p));

    std::vector<char> in_cavity(tets_.size(), 0);
    std::vector<int> cavity{seed};
    in_cavity[static_cast<std::size_t>(seed)] = 1;
    for (std::size_t head = 0; head < cavity.size(); ++head)
      for (int k = 0; k < 4; ++k) {
        const int nb = neighbor(cavity[head], k);
        if (nb < 0 || in_cavity[static_cast<std::size_t>(nb)]) continue;
        if (conflict(tets_[static_cast<std::size_t>(nb)], e)) {
          in_cavity[static_cast<std::size_t>(nb)] = 1;
          cavity.push_back(nb);
        }
      }

    // Grow the cavity until every boundary face sees the new point from the inside, so the
    // new cells are all positively oriented even when the predicates disagreed.
    std::vector<std::pair<int, int>> boundary;
    for (bool grown = true; grown;) {
      grown = false;
      boundary.clear();
      for (std::size_t c = 0; c < cavity.size(); ++c)
        for (int k = 0; k < 4; ++k) {
          const int id = cavity[c];
          const int nb = neighbor(id, k);
          if (nb >= 0 && in_cavity[static_cast<std::size_t>(nb)]) continue;
          std::array<int, 4> v = tets_[static_cast<std::size_t>(id)].v;
          v[static_cast<std::size_t>(k)] = p;
          if (v[3] != kInf) {
            if (!(orient(pt(v[0]), pt(v[1]), pt(v[2]), pt(v[3])) > 0) && nb >= 0) {
              in_cavity[static_cast<std::size_t>(nb)] = 1;
              cavity.push_back(nb);
              grown = true;
              continue;
            }
          }
          boundary.emplace_back(id, k);
        }
    }

    for (int id : cavity) remove(id);
    for (const auto& [id, k] : boundary) {
      std::array<int, 4> v = tets_[static_cast<std::size_t>(id)].v;
      v[static_cast<std::size_t>(k)] = p;
      canonical(v);
      add(v);
    }
  }
};

std::array<int, 4> sorted_cell(std::array<int, 4> c) {
  std::sort(c.begin(), c.end());
  return c;
}

// Two-dimensional Bowyer-Watson with a distant enclosing triangle, used for flat clouds.
std::vector<std::array<int, 3>> delaunay2(const std::vector<std::array<Real, 2>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::array<Real, 2>> q = pts;
  Real span = 0;
  for (const auto& p : q) span = std::max({span, std::abs(p[0]), std::abs(p[1])});
  const Real big = 1e4L * std::max<Real>(span, 1);
  q.push_back({-big, -big});
  q.push_back({big, -big});
  q.push_back({0, big});
  const auto ccw = [&](int a, int b, int c) {
    const auto &pa = q[static_cast<std::size_t>(a)], &pb = q[static_cast<std::size_t>(b)], &pc = q[static_cast<std::size_t>(c)];
    return (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
  };
  const auto incircle = [&](const std::array<int, 3>& t, int e) {
    const auto& pe = q[static_cast<std::size_t>(e)];
    Real m[3][3];
    for (int i = 0; i < 3; ++i) {
      const auto& p = q[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
      const Real dx = p[0] - pe[0], dy = p[1] - pe[1];
      m[i][0] = dx;
      m[i][1] = dy;
      m[i][2] = dx * dx + dy * dy;
    }
    const Real det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return det > 0;
  };

  const int s0 = static_cast<int>(n);
  std::vector<std::array<int, 3>> tris{{s0, s0 + 1, s0 + 2}};
  for (std::size_t i = 0; i < n; ++i) {
    const int e = static_cast<int>(i);
    std::vector<std::array<int, 3>> keep;
    std::map<std::pair<int, int>, int> edge_count;
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : tris) {
      if (!incircle(t, e)) {
        keep.push_back(t);
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
        edges.emplace_back(a, b);
        ++edge_count[{std::min(a, b), std::max(a, b)}];
      }
    }
    for (const auto& [a, b] : edges)
      if (edge_count[{std::min(a, b), std::max(a, b)}] == 1 && ccw(a, b, e) > 0) keep.push_back({a, b, e});
    tris = std::move(keep);
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris)
    if (t[0] < s0 && t[1] < s0 && t[2] < s0) out.push_back(t);
  return out;
}

// Joins components by their closest pair of points, in component order.
bool bridge(std::size_t n, std::vector<Edge>& edges, const PointMatrix& pts) {
  auto comps = connected_components(Graph(n, edges));
  if (comps.size() <= 1) return false;
  std::vector<int> joined = comps[0];
  for (std::size_t c = 1; c < comps.size(); ++c) {
    double best = std::numeric_limits<double>::infinity();
    Edge link;
    for (int a : joined)
      for (int b : comps[c]) {
        const double d = (pts.row(a) - pts.row(b)).squaredNorm();
        if (d < best) {
          best = d;
          link = {std::min(a, b), std::max(a, b)};
        }
      }
    edges.push_back(link);
    joined.insert(joined.end(), comps[c].begin(), comps[c].end());
  }
  return true;
}

} // namespace

Triangulation delaunay_triangulation(const PointCloud& pc) {
  const std::size_t n = pc.size();
  if (n == 0) throw InputError("Delaunay triangulation needs at least one point");
  Triangulation out;
  std::vector<Edge> edges;
  if (n < 4) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.push_back({static_cast<int>(i), static_cast<int>(j)});
    out.graph = Graph(n, std::move(edges));
    return out;
  }

  const PointMatrix pts = normalized(pc).points;
  const auto row = [&](std::size_t i) -> Eigen::Vector3d { return pts.row(static_cast<Eigen::Index>(i)).transpose(); };

  // Pick an initial simplex of well-separated points.
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < n; ++i)
    if ((row(i) - row(0)).squaredNorm() > (row(i1) - row(0)).squaredNorm()) i1 = i;
  const Eigen::Vector3d dir = (row(i1) - row(0)).normalized();
  const double extent = (row(i1) - row(0)).norm();
  std::size_t i2 = 0;
  double line_dist = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d r = row(i) - row(0);
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > line_dist) {
      line_dist = d;
      i2 = i;
    }
  }

  if (!(extent > 0.0) || line_dist <= kFlat * extent) {
    // Collinear (or coincident) points: a path along the line.
    out.collinear = true;
    std::vector<std::pair<double, int>> order;
    for (std::size_t i = 0; i < n; ++i) order.emplace_back((row(i) - row(0)).dot(dir), static_cast<int>(i));
    std::sort(order.begin(), order.end());
    for (std::size_t k = 1; k < n; ++k)
      edges.push_back({std::min(order[k - 1].second, order[k].second), std::max(order[k - 1].second, order[k].second)});
    out.graph = Graph(n, std::move(edges));
    return out;
  }

  const Eigen::Vector3d normal = (row(i1) - row(0)).cross(row(i2) - row(0)).normalized();
  std::size_t i3 = 0;
  double plane_dist = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs((row(i) - row(0)).dot(normal));
    if (d > plane_dist) {
      plane_dist = d;
      i3 = i;
    }
  }

  if (plane_dist <= kFlat * extent) {
    // Flat cloud: triangulate in the best-fit plane.
    out.planar_fallback = true;
    const Eigen::RowVector3d mean = pts.colwise().mean();
    const Eigen::MatrixXd centered = pts.rowwise() - mean;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> pca(centered.transpose() * centered);
    const Eigen::Vector3d ax = pca.eigenvectors().col(2);
    const Eigen::Vector3d ay = pca.eigenvectors().col(1);
    std::vector<std::array<Real, 2>> flat(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d r = centered.row(static_cast<Eigen::Index>(i)).transpose();
      flat[i] = {static_cast<Real>(r.dot(ax) + jitter(i, 0)), static_cast<Real>(r.dot(ay) + jitter(i, 1))};
    }
    for (const auto& t : delaunay2(flat)) {
      out.cells.push_back({t[0], t[1], t[2], -1});
      for (int k = 0; k < 3; ++k) {
        const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
        edges.push_back({std::min(a, b), std::max(a, b)});
      }
    }
  } else {
    std::vector<P3> q(n);
    for (std::size_t i = 0; i < n; ++i)
      q[i] = {static_cast<Real>(pts(static_cast<Eigen::Index>(i), 0) + jitter(i, 0)),
              static_cast<Real>(pts(static_cast<Eigen::Index>(i), 1) + jitter(i, 1)),
              static_cast<Real>(pts(static_cast<Eigen::Index>(i), 2) + jitter(i, 2))};
    Delaunay3 dt(std::move(q));
    dt.run({0, static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3)});
    for (const auto& t : dt.finite_tets()) {
      out.cells.push_back(sorted_cell(t));
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) edges.push_back({std::min(t[a], t[b]), std::max(t[a], t[b])});
    }
  }
  std::sort(out.cells.begin(), out.cells.end());
  out.bridged = bridge(n, edges, pts);
  out.graph = Graph(n, std::move(edges));
  return out;
}

} // namespace gridlay
