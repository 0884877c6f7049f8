// Reference implementations for tests. Written from the definitions, not
// from the library code: plain loops, no incremental state sharing.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

struct P
{
  double x;
  double y;
};

inline double d(P a, P b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)); }

struct Trace
{
  std::vector<std::size_t> cutoffs;
  std::vector<P> centroids;
  std::vector<double> radii;
  std::vector<bool> local; // radius passed min_r while dense
};

// Reference segmenter, one point at a time. The centroid update divides by n_points.
inline Trace segment_trace(const std::vector<P>& T, double min_r, double min_density)
{
  Trace out;
  out.cutoffs.push_back(0);
  P current_centroid = T[0];
  double n_points = 1;
  double radius = 0;
  bool local = false;
  for (std::size_t i = 1; i < T.size(); ++i) {
    n_points = n_points + 1;
    radius = std::max(radius, std::hypot(current_centroid.x - T[i].x, current_centroid.y - T[i].y));
    if (radius > min_r) {
      const double density = n_points / (std::numbers::pi * radius * radius);
      if (density < min_density) {
        out.cutoffs.push_back(i);
        out.centroids.push_back(current_centroid);
        // radius and n_points before T[i] joined
        out.local.push_back(local);
        current_centroid = T[i];
        n_points = 1;
        radius = 0;
        local = false;
        continue;
      }
      local = true;
    }
    const double n = n_points;
    current_centroid = {((n - 1) * current_centroid.x + T[i].x) / n, ((n - 1) * current_centroid.y + T[i].y) / n};
  }
  out.cutoffs.push_back(T.size());
  out.centroids.push_back(current_centroid);
  out.local.push_back(local);
  return out;
}

// Radius of each segment as the segmenter tracks it (max distance of each new
// point to the centroid before that point joined).
inline std::vector<double> trace_radii(const std::vector<P>& T, const Trace& tr)
{
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < tr.cutoffs.size(); ++k) {
    P c = T[tr.cutoffs[k]];
    double r = 0;
    double n = 1;
    for (std::size_t i = tr.cutoffs[k] + 1; i < tr.cutoffs[k + 1]; ++i) {
      n += 1;
      r = std::max(r, std::hypot(c.x - T[i].x, c.y - T[i].y));
      c = {((n - 1) * c.x + T[i].x) / n, ((n - 1) * c.y + T[i].y) / n};
    }
    out.push_back(r);
  }
  return out;
}

struct Circ
{
  P c;
  double r;
};

inline bool covers(const Circ& c, const std::vector<P>& pts)
{
  for (const auto& p : pts) {
    if (d(c.c, p) > c.r * (1 + 1e-9) + 1e-12) {
      return false;
    }
  }
  return true;
}

// Smallest circle over every pair diameter and triple circumcircle. O(n^4).
inline Circ mec_brute(const std::vector<P>& pts)
{
  if (pts.size() == 1) {
    return {pts[0], 0};
  }
  Circ best{{0, 0}, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Circ c{{(pts[i].x + pts[j].x) / 2, (pts[i].y + pts[j].y) / 2}, d(pts[i], pts[j]) / 2};
      if (c.r < best.r && covers(c, pts)) {
        best = c;
      }
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const P a = pts[i];
        const P b = pts[j];
        const P e = pts[k];
        const double dd = 2 * (a.x * (b.y - e.y) + b.x * (e.y - a.y) + e.x * (a.y - b.y));
        if (std::abs(dd) < 1e-15) {
          continue;
        }
        const double a2 = a.x * a.x + a.y * a.y;
        const double b2 = b.x * b.x + b.y * b.y;
        const double e2 = e.x * e.x + e.y * e.y;
        const P c{(a2 * (b.y - e.y) + b2 * (e.y - a.y) + e2 * (a.y - b.y)) / dd,
                  (a2 * (e.x - b.x) + b2 * (a.x - e.x) + e2 * (b.x - a.x)) / dd};
        const Circ cc{c, d(c, a)};
        if (cc.r < best.r && covers(cc, pts)) {
          best = cc;
        }
      }
    }
  }
  return best;
}

inline double cross(P o, P a, P b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Gift wrapping; returns the hull ring (any orientation).
inline std::vector<P> jarvis(const std::vector<P>& pts)
{
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y)) {
      start = i;
    }
  }
  std::vector<P> hull;
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    std::size_t next = (cur + 1) % pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double c = cross(pts[cur], pts[next], pts[i]);
      if (c < 0 || (c == 0 && d(pts[cur], pts[i]) > d(pts[cur], pts[next]))) {
        next = i;
      }
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());
  return hull;
}

inline double shoelace(const std::vector<P>& ring)
{
  double s = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const P a = ring[i];
    const P b = ring[(i + 1) % ring.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return std::abs(s) / 2;
}

inline double hausdorff(const std::vector<P>& a, const std::vector<P>& b)
{
  auto directed = [](const std::vector<P>& x, const std::vector<P>& y) {
    double worst = 0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) {
        best = std::min(best, d(p, q));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

inline double dtw(const std::vector<P>& a, const std::vector<P>& b)
{
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(a.size() + 1, std::vector<double>(b.size() + 1, inf));
  D[0][0] = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      D[i][j] = std::hypot(a[i - 1].x - b[j - 1].x, a[i - 1].y - b[j - 1].y) +
                std::min({D[i - 1][j], D[i][j - 1], D[i - 1][j - 1]});
    }
  }
  return D[a.size()][b.size()];
}

struct TP
{
  double t;
  P p;
};

// Linear scan interpolation; the last sample at t wins on ties.
inline bool interp(const std::vector<TP>& s, double t, P& out)
{
  if (s.empty() || t < s.front().t || t > s.back().t) {
    return false;
  }
  for (std::size_t i = s.size(); i-- > 0;) {
    if (s[i].t == t) {
      out = s[i].p;
      return true;
    }
    if (s[i].t < t) {
      const double u = (t - s[i].t) / (s[i + 1].t - s[i].t);
      out = {s[i].p.x + u * (s[i + 1].p.x - s[i].p.x), s[i].p.y + u * (s[i + 1].p.y - s[i].p.y)};
      return true;
    }
  }
  return false;
}

struct Meet
{
  double t_begin;
  double t_end;
  double min_distance;
};

// Exact meetings from full raw data: every sample time of either trajectory in
// the common span, qualifying samples merged when gaps are <= time_tol.
inline std::vector<Meet> brute_meet(const std::vector<TP>& a, const std::vector<TP>& b, double tol, double time_tol)
{
  const double lo = std::max(a.front().t, b.front().t);
  const double hi = std::min(a.back().t, b.back().t);
  std::vector<std::pair<double, double>> hits; // (t, distance)
  auto sweep = [&](const std::vector<TP>& own, const std::vector<TP>& other) {
    for (const auto& s : own) {
      P q;
      if (s.t >= lo && s.t <= hi && interp(other, s.t, q)) {
        const double dist = d(s.p, q);
        if (dist <= tol) {
          hits.emplace_back(s.t, dist);
        }
      }
    }
  };
  sweep(a, b);
  sweep(b, a);
  std::sort(hits.begin(), hits.end());
  std::vector<Meet> out;
  for (const auto& [t, dist] : hits) {
    if (!out.empty() && t <= out.back().t_end + time_tol) {
      out.back().t_end = std::max(out.back().t_end, t);
      out.back().min_distance = std::min(out.back().min_distance, dist);
    } else {
      out.push_back({t, t, dist});
    }
  }
  return out;
}

} // namespace oracle
