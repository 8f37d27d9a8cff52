#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace verisim {

enum class StepOp : std::uint8_t { LeafInput, Shift, Add };

const char* to_string(StepOp op);

/// Position of a step in the tree: level 0 is the root, index counts
/// left-to-right within a level.
struct StepId {
  std::uint32_t level{};
  std::uint32_t index{};

  friend bool operator==(StepId, StepId) = default;
};

/// One judge-checkable elementary step. LeafInput has no children, Shift has
/// one child plus a constant shift amount, Add has exactly two children.
struct Step {
  StepOp op{StepOp::LeafInput};
  std::uint64_t claimed_output{0};
  std::int32_t left{-1};
  std::int32_t right{-1};
  std::uint32_t shift{0};
  StepId id{};
};

/// Wrapping evaluation of one elementary op over its children's claims.
/// Honest trees never wrap (decompose checks a*b for overflow up front);
/// wrapping keeps evaluation total on corrupted claims.
std::uint64_t eval_step(StepOp op, std::uint64_t left, std::uint64_t right,
                        std::uint32_t shift);

using NodeHasher = std::function<std::uint64_t(
    StepOp op, std::uint32_t shift, std::uint64_t left_hash,
    std::uint64_t right_hash, std::uint64_t claimed_output)>;

/// Default 64-bit FNV-1a node hash. Not collision resistant against an
/// adversary; the interface accepts a replacement where that matters.
std::uint64_t fnv_node_hash(StepOp op, std::uint32_t shift,
                            std::uint64_t left_hash, std::uint64_t right_hash,
                            std::uint64_t claimed_output);

/// Merkleized computation trace of one integer multiplication. Steps are
/// stored in breadth-first order with the root at index 0, so children always
/// follow their parent. Immutable after construction; safe to share
/// read-only across runs.
struct TraceTree {
  std::uint64_t a{0};
  std::uint64_t b{0};
  std::vector<Step> steps;
  std::vector<std::uint64_t> hashes;  // parallel to steps
  std::uint64_t root_hash{0};

  std::uint64_t root_value() const { return steps.front().claimed_output; }
  std::uint32_t depth() const { return steps.back().id.level; }
  std::size_t size() const { return steps.size(); }
  bool is_leaf(std::size_t node) const { return steps[node].left < 0; }

  /// Indices of all non-leaf steps (the forgeable ones), BFS order.
  std::vector<std::size_t> internal_steps() const;
};

/// Shift-add decomposition of a*b: one Shift partial product per set bit of
/// b over a leaf holding a, combined by a balanced Add tree. b == 0 yields a
/// degenerate single-leaf tree. Throws std::invalid_argument if a*b
/// overflows 64 bits.
TraceTree decompose(std::uint64_t a, std::uint64_t b);

/// Recompute all node hashes (and root_hash) in place.
void rehash(TraceTree& tree, const NodeHasher& hasher = fnv_node_hash);

std::uint64_t merkle_root(const TraceTree& tree);

/// Returns a copy of `tree` with the target step's claimed output replaced
/// by honest+1 (wrapping) and every ancestor re-evaluated from the corrupted
/// value, so the false trace is internally consistent above the corruption.
/// `target` indexes into tree.steps and must be a non-leaf step.
TraceTree corrupt(const TraceTree& tree, std::size_t target);

std::size_t root_step(const TraceTree& tree);

/// Outcome of the binary search: the unique step where the parties' claims
/// differ while all child claims agree, plus everything the judge needs to
/// re-run that one step.
struct Disagreement {
  StepId step_id{};
  StepOp op{StepOp::LeafInput};
  std::uint32_t shift{0};
  std::vector<std::uint64_t> child_claims;  // agreed across both parties
  std::vector<bool> child_is_leaf;
  std::uint64_t solver_claim{0};
  std::uint64_t challenger_claim{0};
  std::uint32_t judge_queries{0};  // nodes inspected during the descent
};

/// Binary search over two conflicting traces of identical shape. Descends
/// from the root into the leftmost differing child until all children agree.
/// Throws std::invalid_argument on equal roots or shape mismatch.
Disagreement bisect(const TraceTree& solver, const TraceTree& challenger);

enum class Decision : std::uint8_t { SolverCorrect, SolverFalse };

struct Verdict {
  Decision decision{Decision::SolverCorrect};
  StepId checked_step{};
};

/// Exact re-evaluation of the single isolated step. Leaf children are
/// replaced by the public input a rather than trusted claims.
Verdict judge_step(const Disagreement& disagreement, std::uint64_t a,
                   std::uint64_t b);

/// One `level,index,op,claimed_output,hash-prefix` line per node, BFS order.
void dump_trace(const TraceTree& tree, std::ostream& out);

}  // namespace verisim
