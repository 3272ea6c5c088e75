#include "qccd/ArchGraph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

namespace qccd {
namespace {

constexpr int kInf = std::numeric_limits<int>::max();

void checkSpec(const GridSpec& s) {
  auto fail = [](const char* field, int got, int min) {
    std::ostringstream os;
    os << "GridSpec." << field << " must be >= " << min << ", got " << got;
    throw std::invalid_argument(os.str());
  };
  if (s.m < 2) fail("m", s.m, 2);
  if (s.n < 2) fail("n", s.n, 2);
  if (s.v < 1) fail("v", s.v, 1);
  if (s.h < 1) fail("h", s.h, 1);
  if (s.pzCapacity < 1) fail("pzCapacity", s.pzCapacity, 1);
}

struct CornerPair {
  int entryRow, entryCol, exitRow, exitCol;
};

CornerPair cornerJunctions(const GridSpec& s) {
  switch (s.entryCorner) {
    case Corner::TopLeft: return {0, 0, 1, 0};
    case Corner::TopRight: return {0, s.n - 1, 1, s.n - 1};
    case Corner::BottomLeft: return {s.m - 1, 0, s.m - 2, 0};
    case Corner::BottomRight: return {s.m - 1, s.n - 1, s.m - 2, s.n - 1};
  }
  throw std::invalid_argument("GridSpec.entryCorner is not a valid corner");
}

/// 0/1 breadth-first distances from `start` over edge adjacency: stepping
/// between two edges costs 1 through a major node, 0 through a minor node.
/// `memoryOnly` restricts the traversal to memory edges.
std::vector<int> edgeDistances01(const ArchGraph& g, int start,
                                 bool memoryOnly) {
  std::vector<int> dist(g.edgeCount(), kInf);
  std::deque<int> dq;
  dist[start] = 0;
  dq.push_back(start);
  while (!dq.empty()) {
    int e = dq.front();
    dq.pop_front();
    const Edge& ed = g.edge(e);
    for (int node : {ed.a, ed.b}) {
      int w = g.isMajor(node) ? 1 : 0;
      for (int f : g.edgesAt(node)) {
        if (f == e) continue;
        if (memoryOnly && g.edge(f).tag != EdgeTag::Memory) continue;
        if (dist[e] + w < dist[f]) {
          dist[f] = dist[e] + w;
          if (w == 0)
            dq.push_front(f);
          else
            dq.push_back(f);
        }
      }
    }
  }
  return dist;
}

/// Plain breadth-first hop distances from `start` over edge adjacency: every
/// step between adjacent edges costs 1, regardless of the node crossed.
std::vector<int> edgeHopDistances(const ArchGraph& g, int start) {
  std::vector<int> dist(g.edgeCount(), kInf);
  std::deque<int> dq;
  dist[start] = 0;
  dq.push_back(start);
  while (!dq.empty()) {
    int e = dq.front();
    dq.pop_front();
    const Edge& ed = g.edge(e);
    for (int node : {ed.a, ed.b}) {
      for (int f : g.edgesAt(node)) {
        if (f == e || dist[f] != kInf) continue;
        dist[f] = dist[e] + 1;
        dq.push_back(f);
      }
    }
  }
  return dist;
}

Direction oppositeDir(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::East: return Direction::West;
    case Direction::West: return Direction::East;
  }
  return Direction::North;
}

/// Perimeter of the junction rectangle spanning rows [r0,r1] x cols [c0,c1],
/// as the clockwise edge walk starting at the north-west corner. Consecutive
/// edges share a node; the list is a closed loop.
std::vector<int> rectPerimeter(const ArchGraph& g, int r0, int c0, int r1,
                               int c1) {
  const GridSpec& s = g.spec();
  const int hSegs = s.m * (s.n - 1);
  auto hseg = [&](int r, int c) -> const Segment& {
    return g.segment(r * (s.n - 1) + c);
  };
  auto vseg = [&](int r, int c) -> const Segment& {
    return g.segment(hSegs + r * s.n + c);
  };
  std::vector<int> per;
  for (int c = c0; c < c1; ++c) {
    const auto& es = hseg(r0, c).edges;
    per.insert(per.end(), es.begin(), es.end());
  }
  for (int r = r0; r < r1; ++r) {
    const auto& es = vseg(r, c1).edges;
    per.insert(per.end(), es.begin(), es.end());
  }
  for (int c = c1 - 1; c >= c0; --c) {
    const auto& es = hseg(r1, c).edges;
    per.insert(per.end(), es.rbegin(), es.rend());
  }
  for (int r = r1 - 1; r >= r0; --r) {
    const auto& es = vseg(r, c0).edges;
    per.insert(per.end(), es.rbegin(), es.rend());
  }
  return per;
}

/// Column span start for a lateral rectangle choice at column c: prefer the
/// side toward the entry corner's column, interior side when c is that column.
int lateralColSpan(int entryCol, int c) {
  if (entryCol > c) return c;
  if (entryCol < c) return c - 1;
  return c == 0 ? 0 : c - 1;
}

int lateralRowSpan(int entryRow, int r) {
  if (entryRow > r) return r;
  if (entryRow < r) return r - 1;
  return r == 0 ? 0 : r - 1;
}

/// Rotates/reverses a closed perimeter so it starts at moverEdge and its
/// second element is nextEdge (one rotation then advances the mover).
Cycle orientPerimeter(std::vector<int> per, int moverEdge, int nextEdge) {
  auto pos = std::find(per.begin(), per.end(), moverEdge);
  if (pos == per.end() ||
      per[(static_cast<std::size_t>(pos - per.begin()) + 1) % per.size()] !=
          nextEdge) {
    std::reverse(per.begin(), per.end());
    pos = std::find(per.begin(), per.end(), moverEdge);
  }
  if (pos == per.end())
    throw std::logic_error("cycle construction lost the mover edge");
  std::rotate(per.begin(), pos, per.end());
  if (per.size() < 2 || per[1] != nextEdge)
    throw std::logic_error("cycle construction cannot reach the next edge");
  Cycle cy;
  cy.edges = std::move(per);
  return cy;
}

}  // namespace

ArchGraph ArchGraph::build(const GridSpec& spec) {
  checkSpec(spec);
  ArchGraph g;
  g.spec_ = spec;
  const int m = spec.m, n = spec.n, v = spec.v, h = spec.h;

  const int majors = m * n;
  const int hSegs = m * (n - 1);
  const int vSegs = (m - 1) * n;
  const int hMinorBase = majors;
  const int vMinorBase = hMinorBase + hSegs * (h - 1);
  const int p1 = vMinorBase + vSegs * (v - 1);
  const int p2 = p1 + 1;

  g.nodes_.resize(static_cast<std::size_t>(p2) + 1);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) g.nodes_[r * n + c] = {NodeKind::Major, r, c};

  auto addSegment = [&](int ja, int jb, Orientation o, int len,
                        auto minorAt) {
    Segment s;
    s.junctionA = ja;
    s.junctionB = jb;
    s.orient = o;
    int prev = ja;
    for (int k = 0; k < len; ++k) {
      int next = (k == len - 1) ? jb : minorAt(k);
      int id = static_cast<int>(g.edges_.size());
      g.edges_.push_back(
          {prev, next, EdgeTag::Memory, o, static_cast<int>(g.segments_.size()),
           k});
      s.edges.push_back(id);
      prev = next;
    }
    g.segments_.push_back(std::move(s));
  };

  for (int r = 0; r < m; ++r)
    for (int c = 0; c + 1 < n; ++c) {
      int seg = r * (n - 1) + c;
      addSegment(r * n + c, r * n + c + 1, Orientation::Horizontal, h,
                 [&](int k) { return hMinorBase + seg * (h - 1) + k; });
    }
  for (int r = 0; r + 1 < m; ++r)
    for (int c = 0; c < n; ++c) {
      int seg = r * n + c;
      addSegment(r * n + c, (r + 1) * n + c, Orientation::Vertical, v,
                 [&](int k) { return vMinorBase + seg * (v - 1) + k; });
    }

  g.memoryEdges_ = static_cast<int>(g.edges_.size());
  if (g.memoryEdges_ != spec.memoryEdgeCount())
    throw std::logic_error("memory edge construction does not match formula");

  const CornerPair cp = cornerJunctions(spec);
  g.entryJunction_ = cp.entryRow * n + cp.entryCol;
  g.exitJunction_ = cp.exitRow * n + cp.exitCol;
  {
    Segment s;
    s.junctionA = g.entryJunction_;
    s.junctionB = g.exitJunction_;
    s.orient = Orientation::Interface;
    const int segId = static_cast<int>(g.segments_.size());
    g.edges_.push_back({g.entryJunction_, p1, EdgeTag::Entry,
                        Orientation::Interface, segId, 0});
    g.edges_.push_back(
        {p1, p2, EdgeTag::Processing, Orientation::Interface, segId, 1});
    g.edges_.push_back({p2, g.exitJunction_, EdgeTag::Exit,
                        Orientation::Interface, segId, 2});
    s.edges = {g.memoryEdges_, g.memoryEdges_ + 1, g.memoryEdges_ + 2};
    g.segments_.push_back(std::move(s));
  }

  g.edgesAt_.resize(g.nodes_.size());
  for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
    g.edgesAt_[g.edges_[e].a].push_back(e);
    g.edgesAt_[g.edges_[e].b].push_back(e);
  }

  g.distToEntry_ = edgeDistances01(g, g.entryEdge(), /*memoryOnly=*/false);
  g.hopsToEntry_ = edgeHopDistances(g, g.entryEdge());

  g.diameter_ = 0;
  for (int e = 0; e < g.memoryEdges_; ++e) {
    auto d = edgeDistances01(g, e, /*memoryOnly=*/true);
    for (int f = 0; f < g.memoryEdges_; ++f)
      if (d[f] != kInf) g.diameter_ = std::max(g.diameter_, d[f]);
  }

  int bestScore = -1;
  for (int j = 0; j < majors; ++j) {
    int score = kInf;
    for (int e : g.edgesAt_[j])
      if (g.edges_[e].tag == EdgeTag::Memory)
        score = std::min(score, g.distToEntry_[e]);
    if (score > bestScore) {
      bestScore = score;
      g.farthestJunction_ = j;
    }
  }
  return g;
}

int ArchGraph::sharedNode(int e1, int e2) const {
  if (e1 == e2) return -1;
  const Edge& x = edges_[e1];
  const Edge& y = edges_[e2];
  if (x.a == y.a || x.a == y.b) return x.a;
  if (x.b == y.a || x.b == y.b) return x.b;
  return -1;
}

int ArchGraph::edgeAcross(int j, Direction dir) const {
  const Node& nd = nodes_[j];
  if (nd.kind != NodeKind::Major) return -1;
  const int m = spec_.m, n = spec_.n;
  const int r = nd.row, c = nd.col;
  const int hSegs = m * (n - 1);
  switch (dir) {
    case Direction::North:
      return r > 0 ? segments_[hSegs + (r - 1) * n + c].edges.back() : -1;
    case Direction::South:
      return r + 1 < m ? segments_[hSegs + r * n + c].edges.front() : -1;
    case Direction::West:
      return c > 0 ? segments_[r * (n - 1) + c - 1].edges.back() : -1;
    case Direction::East:
      return c + 1 < n ? segments_[r * (n - 1) + c].edges.front() : -1;
  }
  return -1;
}

Direction ArchGraph::directionAcross(int j, int edge) const {
  for (Direction d : {Direction::North, Direction::South, Direction::East,
                      Direction::West})
    if (edgeAcross(j, d) == edge) return d;
  std::ostringstream os;
  os << "edge " << edge << " is not across junction node " << j;
  throw std::invalid_argument(os.str());
}

bool ArchGraph::legalHop(int from, int to) const {
  if (from == to || sharedNode(from, to) == -1) return false;
  switch (edges_[from].tag) {
    case EdgeTag::Memory:
      return edges_[to].tag == EdgeTag::Memory ||
             edges_[to].tag == EdgeTag::Entry;
    case EdgeTag::Entry: return edges_[to].tag == EdgeTag::Processing;
    case EdgeTag::Processing: return edges_[to].tag == EdgeTag::Exit;
    case EdgeTag::Exit: return edges_[to].tag == EdgeTag::Memory;
  }
  return false;
}

std::string ArchGraph::toDot() const {
  std::ostringstream os;
  os << "graph arch {\n  node [shape=point];\n";
  for (int i = 0; i < nodeCount(); ++i)
    if (nodes_[i].kind == NodeKind::Major)
      os << "  n" << i << " [shape=box, label=\"J" << nodes_[i].row << ','
         << nodes_[i].col << "\"];\n";
  os << "  n" << edges_[entryEdge()].b << " [label=\"P1\"];\n";
  os << "  n" << edges_[processingEdge()].b << " [label=\"P2\"];\n";
  for (int e = 0; e < edgeCount(); ++e) {
    const Edge& ed = edges_[e];
    os << "  n" << ed.a << " -- n" << ed.b << " [label=\"" << e << "\"";
    if (ed.tag != EdgeTag::Memory) os << ", color=red, penwidth=2";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

int junctionDistance(const ArchGraph& g, int fromEdge, int toEdge) {
  if (fromEdge == toEdge) return 0;
  return edgeDistances01(g, fromEdge, /*memoryOnly=*/false)[toEdge];
}

int hopDistance(const ArchGraph& g, int fromEdge, int toEdge) {
  if (fromEdge == toEdge) return 0;
  return edgeHopDistances(g, fromEdge)[toEdge];
}

std::vector<int> shortestPathEdges(const ArchGraph& g, int fromEdge,
                                   int toEdge) {
  using Cost = std::pair<int, int>;  // (junction crossings, hops)
  std::vector<Cost> dist(g.edgeCount(), {kInf, kInf});
  std::vector<int> parent(g.edgeCount(), -1);
  std::vector<char> done(g.edgeCount(), 0);
  using QE = std::tuple<int, int, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  dist[fromEdge] = {0, 0};
  pq.emplace(0, 0, fromEdge);
  while (!pq.empty()) {
    auto [cr, hp, e] = pq.top();
    pq.pop();
    if (done[e] || Cost{cr, hp} != dist[e]) continue;
    done[e] = 1;
    if (e == toEdge) break;
    const Edge& ed = g.edge(e);
    for (int node : {ed.a, ed.b}) {
      int w = g.isMajor(node) ? 1 : 0;
      for (int f : g.edgesAt(node)) {
        if (f == e || done[f] || !g.legalHop(e, f)) continue;
        Cost cand{cr + w, hp + 1};
        if (cand < dist[f]) {
          dist[f] = cand;
          parent[f] = e;
          pq.emplace(cand.first, cand.second, f);
        }
      }
    }
  }
  if (fromEdge != toEdge && parent[toEdge] == -1) {
    std::ostringstream os;
    os << "no legal path from edge " << fromEdge << " to edge " << toEdge;
    throw std::invalid_argument(os.str());
  }
  std::vector<int> path;
  for (int e = toEdge; e != -1; e = parent[e]) path.push_back(e);
  std::reverse(path.begin(), path.end());
  return path;
}

Cycle findCycle(const ArchGraph& g, int moverEdge, int blockedJunction,
                Direction heading) {
  const GridSpec& s = g.spec();
  const Edge& me = g.edge(moverEdge);
  if (me.tag != EdgeTag::Memory)
    throw NoCycleError("cycles are defined for memory edges only");
  const Node& bj = g.node(blockedJunction);
  if (bj.kind != NodeKind::Major)
    throw NoCycleError("blocked node is not a junction");
  const Node& ej = g.node(g.entryJunction());
  const Segment& ms = g.segment(me.segment);

  if (me.a == blockedJunction || me.b == blockedJunction) {
    const int target = g.edgeAcross(blockedJunction, heading);
    if (target == -1)
      throw NoCycleError("no segment across the junction in that direction");
    if (target == moverEdge)
      throw NoCycleError("heading points back along the mover's own segment");
    const Edge& te = g.edge(target);
    const int otherJunction =
        ms.junctionA == blockedJunction ? ms.junctionB : ms.junctionA;
    const Node& oj = g.node(otherJunction);
    Direction md;
    if (oj.row < bj.row)
      md = Direction::North;
    else if (oj.row > bj.row)
      md = Direction::South;
    else if (oj.col < bj.col)
      md = Direction::West;
    else
      md = Direction::East;

    int r0, c0;
    if (me.orient != te.orient) {
      // Turning crossing: the one rectangle spanned by the mover's segment
      // and the target segment.
      Direction vd =
          (md == Direction::North || md == Direction::South) ? md : heading;
      Direction hd =
          (md == Direction::East || md == Direction::West) ? md : heading;
      r0 = vd == Direction::North ? bj.row - 1 : bj.row;
      c0 = hd == Direction::West ? bj.col - 1 : bj.col;
      return orientPerimeter(rectPerimeter(g, r0, c0, r0 + 1, c0 + 1),
                             moverEdge, target);
    }
    if (me.orient == Orientation::Vertical) {
      // Straight vertical crossing: both rectangles stacked around the
      // junction, lateral column toward the entry corner.
      c0 = lateralColSpan(ej.col, bj.col);
      return orientPerimeter(
          rectPerimeter(g, bj.row - 1, c0, bj.row + 1, c0 + 1), moverEdge,
          target);
    }
    // Straight horizontal crossing: side-by-side rectangles.
    r0 = lateralRowSpan(ej.row, bj.row);
    return orientPerimeter(rectPerimeter(g, r0, bj.col - 1, r0 + 1, bj.col + 1),
                           moverEdge, target);
  }

  // Mover strictly inside its segment: rotate the rectangle containing the
  // whole segment.
  const Direction ab = ms.orient == Orientation::Horizontal ? Direction::East
                                                            : Direction::South;
  int nextPos;
  if (heading == ab)
    nextPos = me.posInSegment + 1;
  else if (heading == oppositeDir(ab))
    nextPos = me.posInSegment - 1;
  else
    throw NoCycleError("heading does not follow the mover's segment");
  if (nextPos < 0 || nextPos >= static_cast<int>(ms.edges.size()))
    throw NoCycleError("no in-segment edge in that direction");
  const int next = ms.edges[nextPos];

  const Node& ja = g.node(ms.junctionA);
  int r0, c0;
  if (ms.orient == Orientation::Horizontal) {
    c0 = ja.col;
    r0 = lateralRowSpan(ej.row, ja.row);
  } else {
    r0 = ja.row;
    c0 = lateralColSpan(ej.col, ja.col);
  }
  (void)s;
  return orientPerimeter(rectPerimeter(g, r0, c0, r0 + 1, c0 + 1), moverEdge,
                         next);
}

int freeEdgeSearch(const ArchGraph& g, const std::vector<bool>& occupied,
                   int startNode) {
  std::vector<int> dist(g.edgeCount(), kInf);
  std::deque<int> dq;
  for (int e : g.edgesAt(startNode)) {
    if (g.edge(e).tag != EdgeTag::Memory) continue;
    dist[e] = 0;
    dq.push_back(e);
  }
  while (!dq.empty()) {
    int e = dq.front();
    dq.pop_front();
    const Edge& ed = g.edge(e);
    for (int node : {ed.a, ed.b}) {
      int w = g.isMajor(node) ? 1 : 0;
      for (int f : g.edgesAt(node)) {
        if (f == e || g.edge(f).tag != EdgeTag::Memory) continue;
        if (dist[e] + w < dist[f]) {
          dist[f] = dist[e] + w;
          if (w == 0)
            dq.push_front(f);
          else
            dq.push_back(f);
        }
      }
    }
  }
  // Among the nearest free edges, prefer the spot farthest from the entry
  // edge so parked chains stay clear of the inbound lanes; remaining ties go
  // to the lowest edge id.
  const std::vector<int>& entryCross = g.distanceToEntry();
  const std::vector<int>& entryHops = g.hopsToEntry();
  int best = -1, bestDist = kInf;
  for (int e = 0; e < g.memoryEdgeCount(); ++e) {
    if (occupied[e] || dist[e] == kInf) continue;
    if (dist[e] < bestDist ||
        (dist[e] == bestDist &&
         std::tie(entryCross[e], entryHops[e]) >
             std::tie(entryCross[best], entryHops[best]))) {
      bestDist = dist[e];
      best = e;
    }
  }
  if (best == -1)
    throw SaturationError("no free memory edge reachable from the start node");
  return best;
}

}  // namespace qccd
