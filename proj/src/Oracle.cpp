#include "qccd/Oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qccd {
namespace {

using U64 = std::uint64_t;

// Packing limits. A state stores two bits per memory edge plus a fixed
// interface block, so 24 memory edges fill 62 of the 64 bits.
constexpr int kMaxMemEdges = 24;
constexpr int kMaxSegs = kMaxMemEdges;
constexpr int kMaxCap = 7;        // processing-edge counter width (3 bits)
constexpr int kMaxDuration = 15;  // gate timer width (4 bits)

constexpr std::uint8_t kU = 1;  // chain still waiting for its gate
constexpr std::uint8_t kP = 2;  // chain already processed

struct SegEndRef {
  int seg = -1;    // compact memory-segment index
  bool atB = false;  // end on the junctionB side
};

/// Topology digested for the search: memory segments as ordered edge lists,
/// the segment ends meeting at each junction, and the state bit layout.
struct OracleModel {
  const ArchGraph* g = nullptr;
  int memEdges = 0;
  int cap = 2;
  int duration = 1;
  int chains = 0;

  int segCount = 0;
  std::array<std::vector<int>, kMaxSegs> segEdges;  // ordered junctionA -> B
  std::array<int, kMaxSegs> segLen{};
  std::array<int, kMaxSegs> segJA{};  // junction at the A end
  std::array<int, kMaxSegs> segJB{};
  int entryJ = -1;
  int exitJ = -1;
  int majorCount = 0;  // major junctions are node ids [0, majorCount)
  std::vector<std::vector<SegEndRef>> endsAtMajor;

  int bP0 = 0;   // shift of the processed-occupancy mask
  int bIfc = 0;  // shift of the interface block

  [[nodiscard]] int endEdge(SegEndRef e) const {
    return e.atB ? segEdges[e.seg].back() : segEdges[e.seg].front();
  }
};

/// Interface block: entry / exit occupant status (0 empty), processing-edge
/// occupant counts by status, and the running gate's remaining steps.
struct Ifc {
  int entry = 0;
  int exit = 0;
  int uProc = 0;
  int pProc = 0;
  int timer = 0;
};

U64 packIfc(const OracleModel& md, const Ifc& f) {
  U64 block = static_cast<U64>(f.entry) | static_cast<U64>(f.exit) << 2 |
              static_cast<U64>(f.uProc) << 4 | static_cast<U64>(f.pProc) << 7 |
              static_cast<U64>(f.timer) << 10;
  return block << md.bIfc;
}

Ifc unpackIfc(const OracleModel& md, U64 s) {
  U64 block = s >> md.bIfc;
  Ifc f;
  f.entry = static_cast<int>(block & 3);
  f.exit = static_cast<int>(block >> 2 & 3);
  f.uProc = static_cast<int>(block >> 4 & 7);
  f.pProc = static_cast<int>(block >> 7 & 7);
  f.timer = static_cast<int>(block >> 10 & 15);
  return f;
}

OracleModel buildModel(const ArchGraph& g, int chains,
                       const OracleConfig& cfg) {
  OracleModel md;
  md.g = &g;
  md.memEdges = g.memoryEdgeCount();
  if (md.memEdges > kMaxMemEdges)
    throw std::invalid_argument(
        "exact search packs states into 64 bits and supports at most " +
        std::to_string(kMaxMemEdges) + " memory edges, the graph has " +
        std::to_string(md.memEdges));
  md.cap = g.spec().pzCapacity;
  if (md.cap > kMaxCap)
    throw std::invalid_argument(
        "exact search supports processing-zone capacity up to " +
        std::to_string(kMaxCap));
  if (cfg.duration1q < 1 || cfg.duration1q > kMaxDuration)
    throw std::invalid_argument("gate duration must be in [1, " +
                                std::to_string(kMaxDuration) + "]");
  if (cfg.stateBudget < 1)
    throw std::invalid_argument("state budget must be positive");
  md.duration = cfg.duration1q;
  md.chains = chains;
  md.entryJ = g.entryJunction();
  md.exitJ = g.exitJunction();
  md.majorCount = g.spec().m * g.spec().n;
  md.endsAtMajor.resize(md.majorCount);
  for (int sid = 0; sid < g.segmentCount(); ++sid) {
    const Segment& s = g.segment(sid);
    if (s.edges.empty() || g.edge(s.edges.front()).tag != EdgeTag::Memory)
      continue;
    const int idx = md.segCount++;
    md.segEdges[idx] = s.edges;
    md.segLen[idx] = static_cast<int>(s.edges.size());
    md.segJA[idx] = s.junctionA;
    md.segJB[idx] = s.junctionB;
    md.endsAtMajor[s.junctionA].push_back({idx, false});
    md.endsAtMajor[s.junctionB].push_back({idx, true});
  }
  md.bP0 = md.memEdges;
  md.bIfc = 2 * md.memEdges;
  return md;
}

U64 packInitial(const OracleModel& md, const IonPlacement& placement) {
  U64 s = 0;
  Ifc f;
  for (int c = 0; c < placement.chainCount(); ++c) {
    const int e = placement.edgeOf(c);
    if (e < md.memEdges)
      s |= U64{1} << e;  // every chain starts unprocessed
    else if (e == md.g->entryEdge())
      f.entry = kU;
    else if (e == md.g->processingEdge())
      ++f.uProc;
    else
      f.exit = kU;
  }
  return s | packIfc(md, f);
}

/// Everything one time step did, in quotient terms: which segment ends sent
/// or received a chain, what moved through the interface, and the gate
/// bookkeeping. Segment ends are coded as seg * 2 + atB.
struct StepTrace {
  int exitDst = -1;       // exit chain crossed out to this segment end
  int passDst = -1;       // processing -> exit -> memory landing end
  std::uint8_t passStatus = 0;
  std::uint8_t evictStatus = 0;  // 0: nobody moved processing -> exit to stay
  bool admit = false;            // entry -> processing
  int enterSrc = -1;             // memory -> entry source end
  int enterPassSrc = -1;         // memory -> entry -> processing source end
  struct Xing {
    std::uint8_t src = 0;
    std::uint8_t dst = 0;
  };
  std::array<Xing, 32> xs{};
  int nx = 0;
  bool start = false;
  bool finish = false;
};

/// Occupants of one segment during enumeration, as a status sequence ordered
/// from the junctionA end. Margins allow one pending entrant per end before
/// the final length check runs.
struct SegBuf {
  std::array<std::uint8_t, 28> st{};
  int head = 2;
  int n = 0;
  int len = 0;
  [[nodiscard]] std::uint8_t front() const { return st[head]; }
  [[nodiscard]] std::uint8_t back() const { return st[head + n - 1]; }
};

/// Enumerates every successor of one packed state: all distinct combinations
/// of interface traffic and junction crossings that the movement rules allow
/// in a single time step, followed by the forced gate bookkeeping. Chains are
/// interchangeable within a status, so segments evolve as status sequences:
/// an end either keeps, sends, or receives one chain per step, and free
/// intra-segment slides make in-segment positions irrelevant.
template <class Emit>
class StepEnum {
 public:
  StepEnum(const OracleModel& md, Emit& emit) : md_(md), emit_(emit) {}

  void run(U64 s) {
    unpack(s);
    stageExit();
  }

 private:
  void unpack(U64 s) {
    memPacked_ = 0;
    for (int i = 0; i < md_.segCount; ++i) {
      SegBuf& sb = segs_[i];
      sb.head = 2;
      sb.n = 0;
      sb.len = md_.segLen[i];
      for (int e : md_.segEdges[i]) {
        if (s >> e & 1)
          sb.st[sb.head + sb.n++] = kU;
        else if (s >> (md_.bP0 + e) & 1)
          sb.st[sb.head + sb.n++] = kP;
      }
      n0_[i] = sb.n;
      sentA_[i] = sentB_[i] = entA_[i] = entB_[i] = 0;
      segPacked_[i] = packSeg(i);
      memPacked_ |= segPacked_[i];
    }
    f0_ = unpackIfc(md_, s);
    entryNow_ = f0_.entry;
    exitNow_ = f0_.exit;
    uProcNow_ = f0_.uProc;
    pProcNow_ = f0_.pProc;
    uDep_ = 0;
    over_ = 0;
    procIns_ = 0;
    admittedU_ = false;
    entryJUsed_ = exitJUsed_ = false;
    tr_ = StepTrace{};
  }

  [[nodiscard]] static int code(SegEndRef e) {
    return e.seg * 2 + (e.atB ? 1 : 0);
  }

  [[nodiscard]] bool canReceive(SegEndRef e) const {
    return !(e.atB ? entB_[e.seg] : entA_[e.seg]);
  }

  /// A chain can leave through this end iff the end has not acted yet and the
  /// end-most occupant is not a chain that entered the segment this step.
  [[nodiscard]] bool canSend(SegEndRef e) const {
    const SegBuf& sb = segs_[e.seg];
    if (sb.n < 1) return false;
    if (e.atB ? sentB_[e.seg] : sentA_[e.seg]) return false;
    if (e.atB ? entB_[e.seg] : entA_[e.seg]) return false;
    if (sb.n == 1 && (entA_[e.seg] || entB_[e.seg])) return false;
    return true;
  }

  [[nodiscard]] std::uint8_t peek(SegEndRef e) const {
    return e.atB ? segs_[e.seg].back() : segs_[e.seg].front();
  }

  [[nodiscard]] U64 packSeg(int i) const {
    const SegBuf& sb = segs_[i];
    U64 x = 0;
    const int cap = std::min(sb.n, sb.len);
    for (int k = 0; k < cap; ++k) {
      const int e = md_.segEdges[i][k];
      x |= U64{1} << (sb.st[sb.head + k] == kU ? e : md_.bP0 + e);
    }
    return x;
  }

  void repack(int seg) {
    memPacked_ ^= segPacked_[seg];
    segPacked_[seg] = packSeg(seg);
    memPacked_ ^= segPacked_[seg];
  }

  void send(SegEndRef e) {
    SegBuf& sb = segs_[e.seg];
    over_ -= sb.n > sb.len ? 1 : 0;
    if (e.atB) {
      --sb.n;
      sentB_[e.seg] = 1;
    } else {
      ++sb.head;
      --sb.n;
      sentA_[e.seg] = 1;
    }
    repack(e.seg);
  }

  void unsend(SegEndRef e, std::uint8_t v) {
    SegBuf& sb = segs_[e.seg];
    if (e.atB) {
      sb.st[sb.head + sb.n++] = v;
      sentB_[e.seg] = 0;
    } else {
      sb.st[--sb.head] = v;
      ++sb.n;
      sentA_[e.seg] = 0;
    }
    over_ += sb.n > sb.len ? 1 : 0;
    repack(e.seg);
  }

  void receive(SegEndRef e, std::uint8_t v) {
    SegBuf& sb = segs_[e.seg];
    if (e.atB) {
      sb.st[sb.head + sb.n++] = v;
      entB_[e.seg] = 1;
    } else {
      sb.st[--sb.head] = v;
      ++sb.n;
      entA_[e.seg] = 1;
    }
    over_ += sb.n > sb.len ? 1 : 0;
    repack(e.seg);
  }

  void unreceive(SegEndRef e) {
    SegBuf& sb = segs_[e.seg];
    over_ -= sb.n > sb.len ? 1 : 0;
    if (e.atB) {
      --sb.n;
      entB_[e.seg] = 0;
    } else {
      ++sb.head;
      --sb.n;
      entA_[e.seg] = 0;
    }
    repack(e.seg);
  }

  /// After landing on a full segment, the step stays feasible only if the
  /// segment can still lose a chain later this step: through its other end,
  /// at a junction not yet decided and not already claimed.
  [[nodiscard]] bool canShedLater(SegEndRef d, int j) const {
    const int seg = d.seg;
    const bool oB = !d.atB;
    if (oB ? sentB_[seg] : sentA_[seg]) return false;
    if (oB ? entB_[seg] : entA_[seg]) return false;
    const int jo = oB ? md_.segJB[seg] : md_.segJA[seg];
    if (jo <= j) return false;
    if (jo == md_.entryJ && entryJUsed_) return false;
    if (jo == md_.exitJ && exitJUsed_) return false;
    return true;
  }

  [[nodiscard]] bool canDepartProc(int v) const {
    if (v == kU)
      // While a gate runs, its operand must stay, so one unprocessed chain is
      // pinned to the processing edge.
      return uProcNow_ >= 1 && (f0_.timer == 0 || uProcNow_ >= 2);
    return pProcNow_ >= 1;
  }

  void departProc(int v) {
    if (v == kU) {
      --uProcNow_;
      ++uDep_;
    } else {
      --pProcNow_;
    }
  }

  void undepartProc(int v) {
    if (v == kU) {
      ++uProcNow_;
      --uDep_;
    } else {
      ++pProcNow_;
    }
  }

  // Stage 1: the exit chain stays or crosses the exit junction into memory.
  void stageExit() {
    stagePass();
    if (f0_.exit == 0) return;
    for (const SegEndRef& d : md_.endsAtMajor[md_.exitJ]) {
      exitJUsed_ = true;
      exitNow_ = 0;
      receive(d, static_cast<std::uint8_t>(f0_.exit));
      tr_.exitDst = code(d);
      stagePass();
      tr_.exitDst = -1;
      unreceive(d);
      exitNow_ = f0_.exit;
      exitJUsed_ = false;
    }
  }

  // Stage 2: one processing-edge chain may ride through the exit edge into
  // memory. The exit edge must be free for the whole transit, so this exists
  // only when it started the step empty.
  void stagePass() {
    stageEvict();
    if (f0_.exit != 0 || exitJUsed_) return;
    for (std::uint8_t v = kU; v <= kP; ++v) {
      if (!canDepartProc(v)) continue;
      for (const SegEndRef& d : md_.endsAtMajor[md_.exitJ]) {
        if (!canReceive(d)) continue;
        exitJUsed_ = true;
        departProc(v);
        receive(d, v);
        tr_.passDst = code(d);
        tr_.passStatus = v;
        stageEvict();
        tr_.passDst = -1;
        tr_.passStatus = 0;
        unreceive(d);
        undepartProc(v);
        exitJUsed_ = false;
      }
    }
  }

  // Stage 3: one processing-edge chain may step onto the exit edge and stay,
  // once the exit edge is known to end the step free.
  void stageEvict() {
    stageAdmit();
    if (exitNow_ != 0) return;
    for (std::uint8_t v = kU; v <= kP; ++v) {
      if (!canDepartProc(v)) continue;
      departProc(v);
      exitNow_ = v;
      tr_.evictStatus = v;
      stageAdmit();
      tr_.evictStatus = 0;
      exitNow_ = 0;
      undepartProc(v);
    }
  }

  // Stage 4: the entry chain may advance onto the processing edge. This hop
  // crosses no junction, so an unprocessed chain admitted here can still run
  // its gate at the end of the same step.
  void stageAdmit() {
    stageRefill();
    if (entryNow_ == 0 || uProcNow_ + pProcNow_ >= md_.cap) return;
    const int v = entryNow_;
    entryNow_ = 0;
    ++(v == kU ? uProcNow_ : pProcNow_);
    admittedU_ = (v == kU);
    ++procIns_;
    tr_.admit = true;
    stageRefill();
    tr_.admit = false;
    --procIns_;
    admittedU_ = false;
    --(v == kU ? uProcNow_ : pProcNow_);
    entryNow_ = v;
  }

  // Stage 5: a memory chain adjacent to the entry junction may cross onto the
  // entry edge, or ride straight through onto the processing edge. The
  // through-ride crosses the entry junction, so it cannot run a gate this
  // step.
  void stageRefill() {
    stageCross(0);
    if (entryNow_ != 0 || entryJUsed_) return;
    for (const SegEndRef& sref : md_.endsAtMajor[md_.entryJ]) {
      if (!canSend(sref)) continue;
      const std::uint8_t v = peek(sref);
      send(sref);
      entryNow_ = v;
      entryJUsed_ = true;
      tr_.enterSrc = code(sref);
      stageCross(0);
      tr_.enterSrc = -1;
      entryJUsed_ = false;
      entryNow_ = 0;
      unsend(sref, v);
      if (uProcNow_ + pProcNow_ < md_.cap) {
        send(sref);
        ++(v == kU ? uProcNow_ : pProcNow_);
        entryJUsed_ = true;
        ++procIns_;
        tr_.enterPassSrc = code(sref);
        stageCross(0);
        tr_.enterPassSrc = -1;
        --procIns_;
        entryJUsed_ = false;
        --(v == kU ? uProcNow_ : pProcNow_);
        unsend(sref, v);
      }
    }
  }

  // Stage 6: memory-to-memory crossings, one per junction. Only the end-most
  // chain of a segment can reach and cross the adjacent junction; it lands on
  // the first edge of a neighbouring segment.
  void stageCross(int j) {
    if (j == md_.majorCount) {
      finishStep();
      return;
    }
    stageCross(j + 1);
    if ((j == md_.entryJ && entryJUsed_) || (j == md_.exitJ && exitJUsed_))
      return;
    const std::vector<SegEndRef>& ee = md_.endsAtMajor[j];
    const int k = static_cast<int>(ee.size());
    for (int si = 0; si < k; ++si) {
      if (!canSend(ee[si])) continue;
      const std::uint8_t v = peek(ee[si]);
      send(ee[si]);
      for (int di = 0; di < k; ++di) {
        if (di == si || !canReceive(ee[di])) continue;
        const SegBuf& db = segs_[ee[di].seg];
        if (db.n >= db.len && !canShedLater(ee[di], j)) continue;
        receive(ee[di], v);
        tr_.xs[tr_.nx].src = static_cast<std::uint8_t>(code(ee[si]));
        tr_.xs[tr_.nx].dst = static_cast<std::uint8_t>(code(ee[di]));
        ++tr_.nx;
        stageCross(j + 1);
        --tr_.nx;
        unreceive(ee[di]);
      }
      unsend(ee[si], v);
    }
  }

  // Feasibility of the chosen move set as one sequential-replay time step.
  // Slot pools: a segment absorbs entrants as long as it has spare edges, an
  // occupied slot frees only when its departure fires. Blocked hops that form
  // a ring are fine (an atomic rotation realizes them) unless the ring runs
  // through a processing edge holding more than one chain: rotations move
  // whole-edge occupants, so such a step has no legal encoding.
  [[nodiscard]] bool encodable() {
    struct Sub {
      std::int8_t src;
      std::int8_t dst;
      std::int8_t pred;
    };
    constexpr int kProcSlot = 0;
    constexpr int kEntrySlot = 1;
    constexpr int kExitSlot = 2;
    Sub subs[40];  // only [0, ns) is ever written or read
    int ns = 0;
    auto slotOfEnd = [](int endCode) {
      return static_cast<std::int8_t>(3 + endCode / 2);
    };
    if (tr_.admit) subs[ns++] = {kEntrySlot, kProcSlot, -1};
    if (tr_.enterSrc >= 0) subs[ns++] = {slotOfEnd(tr_.enterSrc), kEntrySlot, -1};
    if (tr_.enterPassSrc >= 0) {
      subs[ns] = {slotOfEnd(tr_.enterPassSrc), kEntrySlot, -1};
      subs[ns + 1] = {kEntrySlot, kProcSlot, static_cast<std::int8_t>(ns)};
      ns += 2;
    }
    // The pass-through rides the exit edge before the evicted chain settles
    // on it, so its hops must come first: firing scans in array order.
    if (tr_.passDst >= 0) {
      subs[ns] = {kProcSlot, kExitSlot, -1};
      subs[ns + 1] = {kExitSlot, slotOfEnd(tr_.passDst),
                      static_cast<std::int8_t>(ns)};
      ns += 2;
    }
    if (tr_.evictStatus != 0) subs[ns++] = {kProcSlot, kExitSlot, -1};
    if (tr_.exitDst >= 0) subs[ns++] = {kExitSlot, slotOfEnd(tr_.exitDst), -1};
    for (int i = 0; i < tr_.nx; ++i)
      subs[ns++] = {slotOfEnd(tr_.xs[i].src), slotOfEnd(tr_.xs[i].dst), -1};
    if (ns == 0) return true;

    int pool[3 + kMaxSegs];
    pool[kProcSlot] = md_.cap - f0_.uProc - f0_.pProc;
    pool[kEntrySlot] = f0_.entry == 0 ? 1 : 0;
    pool[kExitSlot] = f0_.exit == 0 ? 1 : 0;
    for (int i = 0; i < md_.segCount; ++i)
      pool[3 + i] = md_.segLen[i] - n0_[i];

    std::uint64_t fired = 0;
    int remaining = ns;
    int procOut = 0;  // fired departures off the processing edge
    auto ready = [&](int i) {
      return !(fired >> i & 1) &&
             (subs[i].pred < 0 || (fired >> subs[i].pred & 1));
    };
    auto fire = [&](int i) {
      --pool[subs[i].dst];
      ++pool[subs[i].src];
      fired |= std::uint64_t{1} << i;
      --remaining;
      if (subs[i].src == kProcSlot) ++procOut;
    };
    while (remaining > 0) {
      bool progress = true;
      while (progress) {
        progress = false;
        for (int i = 0; i < ns; ++i)
          if (ready(i) && pool[subs[i].dst] >= 1) {
            fire(i);
            progress = true;
          }
      }
      if (remaining == 0) break;
      // Every ready hop is blocked; follow who frees whom to find the ring.
      int start = -1;
      for (int i = 0; i < ns && start < 0; ++i)
        if (ready(i)) start = i;
      if (start < 0)
        throw std::logic_error("stalled move set has no ready hop");
      std::uint64_t seen = 0;
      std::int8_t order[40];
      int depth = 0;
      int cur = start;
      while (!(seen >> cur & 1)) {
        seen |= std::uint64_t{1} << cur;
        order[depth++] = static_cast<std::int8_t>(cur);
        // The releaser of the blocking slot is the pending departure of the
        // chain sitting there now, i.e. one whose prerequisite already fired.
        int next = -1;
        for (int i = 0; i < ns && next < 0; ++i)
          if (ready(i) && subs[i].src == subs[cur].dst) next = i;
        if (next < 0)
          throw std::logic_error("blocked hop has no pending releaser");
        cur = next;
      }
      int from = 0;
      while (order[from] != cur) ++from;
      bool throughProc = false;
      for (int i = from; i < depth; ++i)
        if (subs[order[i]].dst == kProcSlot) throughProc = true;
      if (throughProc && f0_.uProc + f0_.pProc - procOut >= 2) return false;
      for (int i = from; i < depth; ++i) fire(order[i]);
    }
    return true;
  }

  // End of step: per-segment length check, move-set feasibility, then the
  // gate bookkeeping. A gate may start only when none is running, on a chain
  // that sits on the processing edge without having crossed a junction this
  // step; it finishes after exactly `duration` steps, turning one unprocessed
  // occupant into a processed one.
  void finishStep() {
    if (over_ != 0) return;  // some segment kept more chains than edges
    // The replay simulation rejects exactly one thing: a blocked ring through
    // the processing edge while it holds two or more chains. Only admit and
    // the through-ride hop onto the processing edge can ever sit in such a
    // ring, and neither can block when the edge's spare room at step start
    // covers every chosen entrance, so the simulation is run only when it
    // does not.
    if (procIns_ > md_.cap - f0_.uProc - f0_.pProc && !encodable()) return;
    if (f0_.timer > 0) {
      const int t2 = f0_.timer - 1;
      const bool fin = t2 == 0;
      emitState(t2, uProcNow_ - (fin ? 1 : 0), pProcNow_ + (fin ? 1 : 0), false,
                fin);
      return;
    }
    const int eligible = (f0_.uProc - uDep_) + (admittedU_ ? 1 : 0);
    if (eligible > 0) {
      const int t2 = md_.duration - 1;
      const bool fin = t2 == 0;
      emitState(t2, uProcNow_ - (fin ? 1 : 0), pProcNow_ + (fin ? 1 : 0), true,
                fin);
      // Starting immediately is never worse when the gate completes within
      // the step; longer gates pin their operand, so deferring is a real
      // alternative and both branches are explored.
      if (md_.duration > 1) emitState(0, uProcNow_, pProcNow_, false, false);
      return;
    }
    emitState(0, uProcNow_, pProcNow_, false, false);
  }

  void emitState(int timer, int uProc, int pProc, bool started, bool finished) {
    U64 out = memPacked_;
    Ifc f;
    f.entry = entryNow_;
    f.exit = exitNow_;
    f.uProc = uProc;
    f.pProc = pProc;
    f.timer = timer;
    out |= packIfc(md_, f);
    tr_.start = started;
    tr_.finish = finished;
    emit_(out, tr_);
  }

  const OracleModel& md_;
  Emit& emit_;
  std::array<SegBuf, kMaxSegs> segs_;
  std::array<int, kMaxSegs> n0_{};
  std::array<U64, kMaxSegs> segPacked_{};
  U64 memPacked_ = 0;
  std::array<std::uint8_t, kMaxSegs> sentA_{}, sentB_{}, entA_{}, entB_{};
  Ifc f0_;
  int entryNow_ = 0, exitNow_ = 0, uProcNow_ = 0, pProcNow_ = 0;
  int uDep_ = 0;
  int procIns_ = 0;  // chosen hops onto the processing edge this step
  int over_ = 0;     // total excess of segment occupancy over segment length
  bool admittedU_ = false;
  bool entryJUsed_ = false, exitJUsed_ = false;
  StepTrace tr_;
};

[[nodiscard]] U64 mix(U64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// States never set bits 62/63, so an all-ones key can mark empty slots.
constexpr U64 kNoKey = ~U64{0};

/// Open-addressing state -> parent map; the hot path of the search is a probe
/// per emitted successor, which linear probing keeps on one cache line.
class ParentMap {
 public:
  explicit ParentMap(std::size_t pow2 = std::size_t{1} << 16) { init(pow2); }

  /// Inserts if absent; returns whether the key was new. `h` must be mix(k),
  /// passed in so hot callers hash once for both the filter and the table.
  bool emplace(U64 k, U64 h, U64 v) {
    std::size_t i = static_cast<std::size_t>(h) & mask_;
    while (keys_[i] != kNoKey) {
      if (keys_[i] == k) return false;
      i = (i + 1) & mask_;
    }
    keys_[i] = k;
    vals_[i] = v;
    if (++size_ > growAt_) grow();
    return true;
  }

  bool emplace(U64 k, U64 v) { return emplace(k, mix(k), v); }

  [[nodiscard]] bool contains(U64 k, U64 h) const {
    std::size_t i = static_cast<std::size_t>(h) & mask_;
    while (keys_[i] != kNoKey) {
      if (keys_[i] == k) return true;
      i = (i + 1) & mask_;
    }
    return false;
  }

  [[nodiscard]] bool contains(U64 k) const { return contains(k, mix(k)); }

  [[nodiscard]] U64 at(U64 k) const {
    std::size_t i = static_cast<std::size_t>(mix(k)) & mask_;
    while (keys_[i] != k) {
      if (keys_[i] == kNoKey) throw std::logic_error("state has no parent");
      i = (i + 1) & mask_;
    }
    return vals_[i];
  }

  [[nodiscard]] std::size_t size() const { return size_; }

 private:
  void init(std::size_t cap) {
    keys_.assign(cap, kNoKey);
    vals_.assign(cap, 0);
    mask_ = cap - 1;
    growAt_ = cap - cap / 4;  // resize at 75% load
    size_ = 0;
  }

  void grow() {
    std::vector<U64> oldK = std::move(keys_);
    std::vector<U64> oldV = std::move(vals_);
    init(oldK.size() * 2);
    for (std::size_t i = 0; i < oldK.size(); ++i)
      if (oldK[i] != kNoKey) {
        std::size_t j = static_cast<std::size_t>(mix(oldK[i])) & mask_;
        while (keys_[j] != kNoKey) j = (j + 1) & mask_;
        keys_[j] = oldK[i];
        vals_[j] = oldV[i];
        ++size_;
      }
  }

  std::vector<U64> keys_, vals_;
  std::size_t mask_ = 0, size_ = 0, growAt_ = 0;
};

/// Same table without values, for per-chunk successor deduplication.
class FlatSet {
 public:
  explicit FlatSet(std::size_t pow2 = std::size_t{1} << 10) {
    keys_.assign(pow2, kNoKey);
    mask_ = pow2 - 1;
    growAt_ = pow2 - pow2 / 4;
  }

  bool insert(U64 k, U64 h) {
    std::size_t i = static_cast<std::size_t>(h) & mask_;
    while (keys_[i] != kNoKey) {
      if (keys_[i] == k) return false;
      i = (i + 1) & mask_;
    }
    keys_[i] = k;
    if (++size_ > growAt_) grow();
    return true;
  }

 private:
  void grow() {
    std::vector<U64> old = std::move(keys_);
    keys_.assign(old.size() * 2, kNoKey);
    mask_ = keys_.size() - 1;
    growAt_ = keys_.size() - keys_.size() / 4;
    for (U64 k : old)
      if (k != kNoKey) {
        std::size_t i = static_cast<std::size_t>(mix(k)) & mask_;
        while (keys_[i] != kNoKey) i = (i + 1) & mask_;
        keys_[i] = k;
      }
  }

  std::vector<U64> keys_;
  std::size_t mask_ = 0, size_ = 0, growAt_ = 0;
};

[[nodiscard]] bool isGoal(const OracleModel& md, U64 s) {
  const U64 uMask = s & ((U64{1} << md.memEdges) - 1);
  const Ifc f = unpackIfc(md, s);
  return uMask == 0 && f.entry != kU && f.exit != kU && f.uProc == 0 &&
         f.timer == 0;
}

// Sibling move sets mostly re-emit states seen moments ago, so a small
// direct-mapped table of recent keys absorbs them before they probe the much
// larger visited table. A hit only ever skips keys already recorded.
constexpr std::size_t kFilterSize = std::size_t{1} << 14;

/// Straightforward single-threaded frontier expansion kept as the reference
/// implementation: enumerate each frontier state in order and record the
/// first parent of every newly seen successor.
void expandSerial(const OracleModel& md, const std::vector<U64>& frontier,
                  ParentMap& parent, std::vector<U64>& next,
                  std::vector<U64>& filter) {
  for (U64 s : frontier) {
    auto emit = [&](U64 c, const StepTrace&) {
      if (c == s) return;
      const U64 h = mix(c);
      const std::size_t fi = static_cast<std::size_t>(h) & (kFilterSize - 1);
      if (filter[fi] == c) return;
      filter[fi] = c;
      if (parent.emplace(c, h, s)) next.push_back(c);
    };
    StepEnum<decltype(emit)> en(md, emit);
    en.run(s);
  }
}

/// Chunked expansion: threads enumerate disjoint frontier chunks against the
/// read-only visited set, then buffers merge serially in chunk order. The
/// result (states, parents, ordering) is identical to the serial reference
/// for any thread count.
void expandParallel(const OracleModel& md, const std::vector<U64>& frontier,
                    ParentMap& parent, std::vector<U64>& next) {
  constexpr int kChunk = 64;
  const int n = static_cast<int>(frontier.size());
  const int chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<std::pair<U64, U64>>> found(chunks);
  std::exception_ptr firstError = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int ci = 0; ci < chunks; ++ci) {
    try {
      FlatSet local;
      // Per-chunk recent-key filter: a hit means the key was already routed
      // through `parent.contains` + `local` within this chunk, so skipping it
      // changes nothing and the merge stays order-independent.
      std::vector<U64> filter(kFilterSize, kNoKey);
      const int lo = ci * kChunk;
      const int hi = std::min(n, lo + kChunk);
      for (int i = lo; i < hi; ++i) {
        const U64 s = frontier[i];
        auto emit = [&](U64 c, const StepTrace&) {
          if (c == s) return;
          const U64 h = mix(c);
          const std::size_t fi = static_cast<std::size_t>(h) & (kFilterSize - 1);
          if (filter[fi] == c) return;
          filter[fi] = c;
          if (parent.contains(c, h)) return;
          if (local.insert(c, h)) found[ci].emplace_back(c, s);
        };
        StepEnum<decltype(emit)> en(md, emit);
        en.run(s);
      }
    } catch (...) {
      // Exceptions cannot unwind out of the worker loop; surface the first
      // one after the join.
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!firstError) firstError = std::current_exception();
    }
  }
  if (firstError) std::rethrow_exception(firstError);
  for (int ci = 0; ci < chunks; ++ci)
    for (const auto& [c, s] : found[ci])
      if (parent.emplace(c, s)) next.push_back(c);
}

struct SearchOutcome {
  int depth = 0;
  U64 goal = 0;
  long long explored = 0;
};

SearchOutcome bfs(const OracleModel& md, U64 root, const OracleConfig& cfg,
                  ParentMap& parent) {
  parent.emplace(root, root);
  if (isGoal(md, root)) return {0, root, 1};
  std::vector<U64> frontier{root};
  std::vector<U64> next;
  std::vector<U64> filter(kFilterSize, kNoKey);
  for (int depth = 1;; ++depth) {
    next.clear();
    if (cfg.parallel)
      expandParallel(md, frontier, parent, next);
    else
      expandSerial(md, frontier, parent, next, filter);
    if (next.empty())
      throw SaturationError(
          "full register access is unreachable from this placement");
    std::sort(next.begin(), next.end());
    for (U64 s : next)
      if (isGoal(md, s))
        return {depth, s, static_cast<long long>(parent.size())};
    if (static_cast<long long>(parent.size()) > cfg.stateBudget)
      throw OracleBudgetError(
          "state budget of " + std::to_string(cfg.stateBudget) +
              " exhausted at depth " + std::to_string(depth) + " with " +
              std::to_string(parent.size()) + " states",
          static_cast<long long>(parent.size()),
          static_cast<long long>(next.size()), depth);
    frontier.swap(next);
  }
}

/// Replays the abstract state path on a concrete placement and writes the
/// schedule: chains are assigned to quotient roles deterministically (end
/// chains of a segment send, lowest ids break ties on the processing edge),
/// in-segment slides keep the occupant order, and hops are emitted in an
/// order that sequential replay accepts, with blocked rings emitted as
/// atomic cycle rotations.
class WitnessBuilder {
 public:
  WitnessBuilder(const OracleModel& md, const IonPlacement& initial)
      : md_(md),
        g_(*md.g),
        place_(initial),
        status_(initial.chainCount(), kU),
        crossings_(initial.chainCount(), 0) {}

  Schedule build(const std::vector<U64>& states) {
    Schedule out;
    for (std::size_t t = 0; t + 1 < states.size(); ++t)
      out.steps.push_back(
          realize(static_cast<int>(t), states[t], states[t + 1]));
    out.gatesExecuted = static_cast<int>(status_.size());
    out.chainCrossings = crossings_;
    return out;
  }

 private:
  struct Plan {
    int chain = -1;
    std::vector<int> edges;  // consecutive edges, edges[0] is the start
    std::size_t at = 0;      // progress: current edge index
  };

  [[nodiscard]] StepTrace deriveTrace(U64 from, U64 to) const {
    StepTrace out;
    bool found = false;
    auto emit = [&](U64 c, const StepTrace& tr) {
      if (!found && c == to) {
        out = tr;
        found = true;
      }
    };
    StepEnum<decltype(emit)> en(md_, emit);
    en.run(from);
    if (!found)
      throw std::logic_error("no transition connects consecutive states");
    return out;
  }

  [[nodiscard]] int pickProc(std::uint8_t v, int exclude) const {
    for (int c = 0; c < place_.chainCount(); ++c)
      if (place_.edgeOf(c) == g_.processingEdge() && status_[c] == v &&
          c != activeChain_ && c != exclude)
        return c;
    throw std::logic_error("no processing-edge chain matches the trace");
  }

  [[nodiscard]] std::vector<int> segSlide(int seg, int fromPos,
                                          int toPos) const {
    std::vector<int> path;
    const int step = toPos >= fromPos ? 1 : -1;
    for (int p = fromPos;; p += step) {
      path.push_back(md_.segEdges[seg][p]);
      if (p == toPos) break;
    }
    return path;
  }

  TimeStep realize(int idx, U64 from, U64 to) {
    const StepTrace tr = deriveTrace(from, to);

    // Boundary occupants per segment, ordered by position.
    std::vector<std::vector<std::pair<int, int>>> occ(md_.segCount);
    for (int i = 0; i < md_.segCount; ++i)
      for (int p = 0; p < md_.segLen[i]; ++p) {
        const int c = place_.chainAt(md_.segEdges[i][p]);
        if (c >= 0) occ[i].emplace_back(c, p);
      }
    std::vector<int> takenLo(md_.segCount, 0), takenHi(md_.segCount, 0);
    auto takeEnd = [&](int endCode) {
      const int seg = endCode / 2;
      auto& list = occ[seg];
      const int live = static_cast<int>(list.size()) - takenLo[seg] -
                       takenHi[seg];
      if (live <= 0) throw std::logic_error("segment end has no chain to send");
      return endCode % 2 ? list[list.size() - 1 - takenHi[seg]++]
                         : list[takenLo[seg]++];
    };

    std::vector<Plan> plans;
    std::vector<int> entLo(md_.segCount, -1), entHi(md_.segCount, -1);
    auto landing = [&](int endCode, int chain) {
      (endCode % 2 ? entHi : entLo)[endCode / 2] = chain;
      return md_.endEdge({endCode / 2, endCode % 2 != 0});
    };

    if (tr.exitDst >= 0) {
      const int c = place_.chainAt(g_.exitEdge());
      plans.push_back({c, {g_.exitEdge(), landing(tr.exitDst, c)}, 0});
    }
    int passChain = -1;
    if (tr.passDst >= 0) {
      passChain = pickProc(tr.passStatus, -1);
      plans.push_back({passChain,
                       {g_.processingEdge(), g_.exitEdge(),
                        landing(tr.passDst, passChain)},
                       0});
    }
    if (tr.evictStatus != 0) {
      const int c = pickProc(tr.evictStatus, passChain);
      plans.push_back({c, {g_.processingEdge(), g_.exitEdge()}, 0});
    }
    int admitChain = -1;
    if (tr.admit) {
      admitChain = place_.chainAt(g_.entryEdge());
      plans.push_back({admitChain, {g_.entryEdge(), g_.processingEdge()}, 0});
    }
    for (int variant = 0; variant < 2; ++variant) {
      const int src = variant == 0 ? tr.enterSrc : tr.enterPassSrc;
      if (src < 0) continue;
      const auto [c, pos] = takeEnd(src);
      const int endPos = src % 2 ? md_.segLen[src / 2] - 1 : 0;
      std::vector<int> path = segSlide(src / 2, pos, endPos);
      path.push_back(g_.entryEdge());
      if (variant == 1) path.push_back(g_.processingEdge());
      plans.push_back({c, std::move(path), 0});
    }
    for (int x = 0; x < tr.nx; ++x) {
      const auto [c, pos] = takeEnd(tr.xs[x].src);
      const int srcSeg = tr.xs[x].src / 2;
      const int endPos = tr.xs[x].src % 2 ? md_.segLen[srcSeg] - 1 : 0;
      std::vector<int> path = segSlide(srcSeg, pos, endPos);
      path.push_back(landing(tr.xs[x].dst, c));
      plans.push_back({c, std::move(path), 0});
    }

    // Remaining occupants shift just enough to clear entrant end edges while
    // keeping their order; positions clamp into the feasible band.
    for (int i = 0; i < md_.segCount; ++i) {
      const int k = static_cast<int>(occ[i].size()) - takenLo[i] - takenHi[i];
      const int lo0 = entLo[i] >= 0 ? 1 : 0;
      const int hi0 = md_.segLen[i] - 1 - (entHi[i] >= 0 ? 1 : 0);
      for (int r = 0; r < k; ++r) {
        const auto [c, pos] = occ[i][takenLo[i] + r];
        const int np =
            std::clamp(pos, lo0 + r, hi0 - (k - 1 - r));
        if (np != pos) plans.push_back({c, segSlide(i, pos, np), 0});
      }
    }

    TimeStep ts;
    ts.index = idx;
    emitHops(ts, plans);

    // Gate bookkeeping mirrors the abstract rule: lowest-id unprocessed chain
    // that sits on the processing edge and crossed no junction this step.
    if (tr.start) {
      int pick = -1;
      for (int c = 0; c < place_.chainCount() && pick < 0; ++c)
        if (place_.edgeOf(c) == g_.processingEdge() && status_[c] == kU &&
            !crossed_[c])
          pick = c;
      if (pick < 0) throw std::logic_error("gate started without an operand");
      ts.gatesStarted.push_back(pick);  // full-access gate i acts on chain i
      activeChain_ = pick;
      remaining_ = md_.duration;
    }
    if (activeChain_ >= 0 && --remaining_ == 0) {
      ts.gatesFinished.push_back(activeChain_);
      status_[activeChain_] = kP;
      activeChain_ = -1;
    }
    if ((tr.finish && ts.gatesFinished.empty()) ||
        (!tr.finish && !ts.gatesFinished.empty()))
      throw std::logic_error("gate bookkeeping diverged from the search");

    if (packConcrete() != to)
      throw std::logic_error("replayed step diverged from the search state");
    return ts;
  }

  /// Emits every planned hop in an order sequential replay accepts: hops onto
  /// free edges go first, and when only blocked hops remain they must form a
  /// ring, which is emitted as one atomic rotation.
  void emitHops(TimeStep& ts, std::vector<Plan>& plans) {
    crossed_.assign(place_.chainCount(), 0);
    auto capacity = [&](int e) {
      return e == g_.processingEdge() ? md_.cap : 1;
    };
    auto noteCross = [&](int chain, int a, int b) {
      if (g_.isMajor(g_.sharedNode(a, b))) {
        ++crossings_[chain];
        crossed_[chain] = 1;
      }
    };
    std::size_t pendingCount = plans.size();
    while (pendingCount > 0) {
      bool progress = true;
      while (progress) {
        progress = false;
        for (Plan& pl : plans) {
          while (pl.at + 1 < pl.edges.size() &&
                 place_.occupancy(pl.edges[pl.at + 1]) <
                     capacity(pl.edges[pl.at + 1])) {
            const int a = pl.edges[pl.at], b = pl.edges[pl.at + 1];
            place_.moveChain(g_, pl.chain, b);
            ts.moves.push_back({pl.chain, a, b});
            noteCross(pl.chain, a, b);
            ++pl.at;
            progress = true;
          }
          if (pl.at + 1 == pl.edges.size() && pl.chain >= 0) {
            pl.chain = -1;  // done
            --pendingCount;
          }
        }
      }
      if (pendingCount == 0) break;
      // Ring: walk blocked hops by their blocking occupant until one repeats.
      std::vector<int> walk;
      std::vector<std::uint8_t> inWalk(plans.size(), 0);
      int cur = -1;
      for (std::size_t i = 0; i < plans.size() && cur < 0; ++i)
        if (plans[i].chain >= 0) cur = static_cast<int>(i);
      while (cur >= 0 && !inWalk[cur]) {
        inWalk[cur] = 1;
        walk.push_back(cur);
        const int target = plans[cur].edges[plans[cur].at + 1];
        int next = -1;
        for (std::size_t i = 0; i < plans.size() && next < 0; ++i)
          if (plans[i].chain >= 0 &&
              plans[i].edges[plans[i].at] == target)
            next = static_cast<int>(i);
        if (next < 0)
          throw std::logic_error("blocked hop is not part of a ring");
        cur = next;
      }
      std::size_t fromIdx = 0;
      while (walk[fromIdx] != cur) ++fromIdx;
      Cycle cy;
      for (std::size_t i = fromIdx; i < walk.size(); ++i) {
        Plan& pl = plans[walk[i]];
        if (place_.occupancy(pl.edges[pl.at]) != 1)
          throw std::logic_error("rotation through a multi-occupant edge");
        cy.edges.push_back(pl.edges[pl.at]);
      }
      cy.chain = plans[walk[fromIdx]].chain;
      place_.rotate(cy);
      ts.cycles.push_back(cy);
      for (std::size_t i = fromIdx; i < walk.size(); ++i) {
        Plan& pl = plans[walk[i]];
        noteCross(pl.chain, pl.edges[pl.at], pl.edges[pl.at + 1]);
        ++pl.at;
        if (pl.at + 1 == pl.edges.size()) {
          pl.chain = -1;
          --pendingCount;
        }
      }
    }
  }

  [[nodiscard]] U64 packConcrete() const {
    U64 out = 0;
    Ifc f;
    for (int i = 0; i < md_.segCount; ++i) {
      int slot = 0;
      for (int p = 0; p < md_.segLen[i]; ++p) {
        const int c = place_.chainAt(md_.segEdges[i][p]);
        if (c < 0) continue;
        const int e = md_.segEdges[i][slot++];
        out |= U64{1} << (status_[c] == kU ? e : md_.bP0 + e);
      }
    }
    for (int c = 0; c < place_.chainCount(); ++c) {
      const int e = place_.edgeOf(c);
      if (e == g_.entryEdge())
        f.entry = status_[c];
      else if (e == g_.exitEdge())
        f.exit = status_[c];
      else if (e == g_.processingEdge())
        ++(status_[c] == kU ? f.uProc : f.pProc);
    }
    f.timer = activeChain_ >= 0 ? remaining_ : 0;
    return out | packIfc(md_, f);
  }

  const OracleModel& md_;
  const ArchGraph& g_;
  IonPlacement place_;
  std::vector<std::uint8_t> status_;
  std::vector<long long> crossings_;
  std::vector<std::uint8_t> crossed_;
  int activeChain_ = -1;
  int remaining_ = 0;
};

}  // namespace

OracleResult optimalScheduleLength(const ArchGraph& g,
                                   const IonPlacement& initial,
                                   const OracleConfig& cfg) {
  const OracleModel md = buildModel(g, initial.chainCount(), cfg);
  const U64 root = packInitial(md, initial);
  ParentMap parent;
  const SearchOutcome got = bfs(md, root, cfg, parent);

  std::vector<U64> states;
  for (U64 s = got.goal;; s = parent.at(s)) {
    states.push_back(s);
    if (parent.at(s) == s) break;
  }
  std::reverse(states.begin(), states.end());

  OracleResult res;
  res.tMin = got.depth;
  res.statesExplored = got.explored;
  WitnessBuilder wb(md, initial);
  res.witness = wb.build(states);
  return res;
}

IonPlacement randomPlacement(const ArchGraph& g, int chainCount,
                             std::uint64_t seed) {
  const int mem = g.memoryEdgeCount();
  if (chainCount < 0 || chainCount > mem)
    throw std::invalid_argument(
        "placement wants " + std::to_string(chainCount) +
        " chains but the memory zone has " + std::to_string(mem) + " edges");
  std::vector<int> pool(mem);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<int> edges(chainCount);
  for (int i = 0; i < chainCount; ++i) {
    std::uniform_int_distribution<int> pick(i, mem - 1);
    std::swap(pool[i], pool[pick(rng)]);
    edges[i] = pool[i];
  }
  return IonPlacement(g, edges);
}

}  // namespace qccd
