#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qccd {

/// Grid corner at which the processing-zone interface is attached.
enum class Corner : std::uint8_t { TopLeft, TopRight, BottomLeft, BottomRight };

/// Cardinal travel direction on the junction grid. North points toward row 0,
/// west toward column 0.
enum class Direction : std::uint8_t { North, South, East, West };

enum class NodeKind : std::uint8_t { Major, Minor };

enum class EdgeTag : std::uint8_t { Memory, Entry, Processing, Exit };

enum class Orientation : std::uint8_t { Horizontal, Vertical, Interface };

/// Parameters of a rectangular QCCD memory-zone grid.
///
/// The memory zone is an m x n lattice of X-junctions (major nodes). Adjacent
/// junctions are connected by linear segments: horizontal segments carry h
/// trapping sites (edges), vertical segments carry v, with sites separated by
/// minor nodes. A three-edge interface (entry -> processing -> exit) hangs off
/// one corner; the processing edge is the single gate-execution region.
struct GridSpec {
  int m = 2;  ///< junction rows, >= 2
  int n = 2;  ///< junction columns, >= 2
  int v = 1;  ///< edges per vertical segment, >= 1
  int h = 1;  ///< edges per horizontal segment, >= 1
  Corner entryCorner = Corner::TopRight;
  int pzCapacity = 2;  ///< max chains simultaneously in the processing zone

  /// Number of memory-zone edges: m*(n-1)*h horizontal + (m-1)*n*v vertical.
  [[nodiscard]] int memoryEdgeCount() const {
    return m * (n - 1) * h + (m - 1) * n * v;
  }
  bool operator==(const GridSpec&) const = default;
};

struct Node {
  NodeKind kind = NodeKind::Minor;
  int row = -1;  ///< junction row for major nodes, -1 otherwise
  int col = -1;
};

struct Edge {
  int a = -1;  ///< endpoint on the segment's junctionA side
  int b = -1;  ///< endpoint on the segment's junctionB side
  EdgeTag tag = EdgeTag::Memory;
  Orientation orient = Orientation::Horizontal;
  int segment = -1;    ///< owning segment id (interface edges form their own)
  int posInSegment = 0;  ///< index along the segment, 0 at the segment's a-end
};

/// A linear run of edges between two junctions (or along the interface).
struct Segment {
  int junctionA = -1;  ///< major node at the low end (west / north)
  int junctionB = -1;  ///< major node at the high end (east / south)
  Orientation orient = Orientation::Horizontal;
  std::vector<int> edges;  ///< ordered from junctionA to junctionB
};

/// Closed loop of edges used for conflict resolution. Rotating the cycle moves
/// the chain on edges[i] to edges[(i+1) % size] for every occupied edge.
struct Cycle {
  std::vector<int> edges;
  int chain = -1;  ///< the priority chain the rotation serves, -1 if unset
};

class NoCycleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SaturationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Immutable topology of one architecture instance.
///
/// Deterministic numbering: major nodes first in row-major order, then minor
/// nodes per segment (horizontal segments row-major, then vertical segments
/// row-major, each ordered from its low-id junction), then the two interface
/// nodes. Edges follow the same segment order, then entry, processing, exit.
class ArchGraph {
public:
  /// Builds and validates the graph. Throws std::invalid_argument naming the
  /// offending field for out-of-range spec values.
  static ArchGraph build(const GridSpec& spec);

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] int nodeCount() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] int edgeCount() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int memoryEdgeCount() const { return memoryEdges_; }
  [[nodiscard]] const Node& node(int id) const { return nodes_[id]; }
  [[nodiscard]] const Edge& edge(int id) const { return edges_[id]; }
  [[nodiscard]] bool isMajor(int nodeId) const {
    return nodes_[nodeId].kind == NodeKind::Major;
  }
  [[nodiscard]] int majorNodeAt(int row, int col) const {
    return row * spec_.n + col;
  }

  [[nodiscard]] int entryEdge() const { return memoryEdges_; }
  [[nodiscard]] int processingEdge() const { return memoryEdges_ + 1; }
  [[nodiscard]] int exitEdge() const { return memoryEdges_ + 2; }
  /// Junction where the entry edge attaches (the entry corner).
  [[nodiscard]] int entryJunction() const { return entryJunction_; }
  /// Junction where the exit edge re-enters the memory zone.
  [[nodiscard]] int exitJunction() const { return exitJunction_; }

  [[nodiscard]] int segmentCount() const {
    return static_cast<int>(segments_.size());
  }
  [[nodiscard]] const Segment& segment(int id) const { return segments_[id]; }

  /// Edge ids incident to a node, ascending.
  [[nodiscard]] const std::vector<int>& edgesAt(int nodeId) const {
    return edgesAt_[nodeId];
  }
  /// Shared node of two distinct edges, or -1 if not adjacent.
  [[nodiscard]] int sharedNode(int e1, int e2) const;

  /// First edge across junction `j` in the given direction (the edge of the
  /// adjacent segment that touches `j`), or -1 if the grid ends there.
  [[nodiscard]] int edgeAcross(int j, Direction dir) const;

  /// Inverse of edgeAcross: the direction in which `edge` lies across
  /// junction `j`. Throws std::invalid_argument if it does not touch `j`.
  [[nodiscard]] Direction directionAcross(int j, int edge) const;

  /// True if a chain may move from edge `from` to edge `to` in one hop.
  /// Adjacency plus the one-way interface discipline: memory->entry (at the
  /// entry junction), entry->processing, processing->exit, exit->memory only.
  [[nodiscard]] bool legalHop(int from, int to) const;

  /// Per-edge junction-crossing distance to the entry edge (undirected).
  [[nodiscard]] const std::vector<int>& distanceToEntry() const {
    return distToEntry_;
  }

  /// Per-edge hop distance (adjacency steps, minor and major alike) to the
  /// entry edge (undirected). Refines distanceToEntry within segments: edges
  /// of one segment share a crossing count but differ in hops.
  [[nodiscard]] const std::vector<int>& hopsToEntry() const {
    return hopsToEntry_;
  }

  /// Largest junction distance between any two memory edges.
  [[nodiscard]] int diameter() const { return diameter_; }

  /// Major node whose incident memory edges are farthest from the entry edge
  /// (max over junctions of min incident distance, lowest id on ties); the
  /// far-corner start for parking searches.
  [[nodiscard]] int farthestJunction() const { return farthestJunction_; }

  [[nodiscard]] std::string toDot() const;

private:
  GridSpec spec_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Segment> segments_;
  std::vector<std::vector<int>> edgesAt_;
  std::vector<int> distToEntry_;
  std::vector<int> hopsToEntry_;
  int memoryEdges_ = 0;
  int entryJunction_ = -1;
  int exitJunction_ = -1;
  int diameter_ = 0;
  int farthestJunction_ = -1;
};

/// Minimum number of junction crossings on any path between two edges,
/// treating every adjacency as traversable in both directions. A metric on
/// edges; zero exactly for edges reachable through minor nodes alone.
int junctionDistance(const ArchGraph& g, int fromEdge, int toEdge);

/// Minimum number of adjacency steps between two edges, counting each step
/// as 1 whether it passes a minor or a major node. The hop analogue of
/// junctionDistance, used as its tie-breaker in chain-ranking metrics.
int hopDistance(const ArchGraph& g, int fromEdge, int toEdge);

/// Shortest legal path (respecting the one-way interface) from `fromEdge` to
/// `toEdge`, minimizing junction crossings, then hop count, with deterministic
/// tie-breaking by edge id. Returns the edge sequence including both
/// endpoints. Throws std::invalid_argument if no legal path exists.
std::vector<int> shortestPathEdges(const ArchGraph& g, int fromEdge, int toEdge);

/// Builds the conflict-resolution cycle for a mover that wants to advance
/// toward/through `blockedJunction` heading in `heading` but finds its next
/// edge occupied.
///
/// If the mover sits adjacent to the junction: a turning crossing (mover edge
/// perpendicular to the target edge) yields the single grid rectangle
/// containing both edges (2v+2h memory edges); a straight crossing yields the
/// two-rectangle loop containing both (4h+2v or 4v+2h edges). If the mover is
/// still inside its segment, the single rectangle containing that segment is
/// returned. Where a lateral choice exists, the rectangle toward the entry
/// corner is preferred, falling back to the grid-interior side at boundaries.
/// The edge list is ordered so that one rotation moves the mover one step
/// along its heading; it never contains interface edges.
Cycle findCycle(const ArchGraph& g, int moverEdge, int blockedJunction,
                Direction heading);

/// Nearest unoccupied memory edge from `startNode` by junction-crossing
/// breadth-first order (ties: farthest from the entry edge by crossings then
/// hops, then lowest edge id, so parked chains keep out of the inbound
/// lanes). `occupied[e]` marks edges that currently hold a chain. Throws
/// SaturationError if no memory edge is free.
int freeEdgeSearch(const ArchGraph& g, const std::vector<bool>& occupied,
                   int startNode);

}  // namespace qccd
