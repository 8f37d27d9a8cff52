#include "verisim/trace.hpp"

#include <bit>
#include <deque>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace verisim {

const char* to_string(StepOp op) {
  switch (op) {
    case StepOp::LeafInput: return "leaf";
    case StepOp::Shift: return "shift";
    case StepOp::Add: return "add";
  }
  throw std::logic_error("unknown step op");
}

std::uint64_t eval_step(StepOp op, std::uint64_t left, std::uint64_t right,
                        std::uint32_t shift) {
  switch (op) {
    case StepOp::Add:
      return left + right;  // wraps
    case StepOp::Shift:
      if (shift >= 64) throw std::logic_error("eval_step: shift out of range");
      return left << shift;
    case StepOp::LeafInput:
      break;
  }
  throw std::logic_error("eval_step: leaves are inputs, not evaluations");
}

std::uint64_t fnv_node_hash(StepOp op, std::uint32_t shift,
                            std::uint64_t left_hash, std::uint64_t right_hash,
                            std::uint64_t claimed_output) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(op));
  mix(shift);
  mix(left_hash);
  mix(right_hash);
  mix(claimed_output);
  return h;
}

std::vector<std::size_t> TraceTree::internal_steps() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!is_leaf(i)) out.push_back(i);
  }
  return out;
}

namespace {

struct TmpNode {
  StepOp op;
  std::uint64_t out;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t shift = 0;
};

/// Renumber into BFS order so the root lands at index 0 and children always
/// follow their parent; assigns (level, index) positions along the way.
void bfs_pack(const std::vector<TmpNode>& tmp, std::int32_t root, TraceTree& tree) {
  std::vector<std::int32_t> order;
  order.reserve(tmp.size());
  std::vector<std::uint32_t> level(tmp.size(), 0);
  std::deque<std::int32_t> queue{root};
  while (!queue.empty()) {
    const std::int32_t cur = queue.front();
    queue.pop_front();
    order.push_back(cur);
    for (std::int32_t child : {tmp[cur].left, tmp[cur].right}) {
      if (child >= 0) {
        level[child] = level[cur] + 1;
        queue.push_back(child);
      }
    }
  }

  std::vector<std::int32_t> new_index(tmp.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_index[order[i]] = static_cast<std::int32_t>(i);

  tree.steps.resize(order.size());
  std::uint32_t cur_level = 0;
  std::uint32_t index_in_level = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const TmpNode& src = tmp[order[i]];
    if (level[order[i]] != cur_level) {
      cur_level = level[order[i]];
      index_in_level = 0;
    }
    Step& dst = tree.steps[i];
    dst.op = src.op;
    dst.claimed_output = src.out;
    dst.left = src.left >= 0 ? new_index[src.left] : -1;
    dst.right = src.right >= 0 ? new_index[src.right] : -1;
    dst.shift = src.shift;
    dst.id = StepId{cur_level, index_in_level++};
  }
}

}  // namespace

TraceTree decompose(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b != 0) {
    unsigned long long product = 0;
    if (__builtin_mul_overflow(a, b, &product)) {
      throw std::invalid_argument("decompose: a*b overflows the 64-bit word width");
    }
  }

  TraceTree tree;
  tree.a = a;
  tree.b = b;

  std::vector<TmpNode> tmp;
  std::int32_t root = -1;

  if (b == 0) {
    tmp.push_back(TmpNode{StepOp::LeafInput, 0});
    root = 0;
  } else {
    std::vector<std::int32_t> partials;
    for (std::uint32_t bit = 0; bit < 64; ++bit) {
      if ((b >> bit) & 1U) {
        tmp.push_back(TmpNode{StepOp::LeafInput, a});
        const auto leaf = static_cast<std::int32_t>(tmp.size() - 1);
        tmp.push_back(TmpNode{StepOp::Shift, a << bit, leaf, -1, bit});
        partials.push_back(static_cast<std::int32_t>(tmp.size() - 1));
      }
    }
    // Balanced Add tree over the partial products, larger half on the left.
    std::function<std::int32_t(std::size_t, std::size_t)> combine =
        [&](std::size_t lo, std::size_t hi) -> std::int32_t {
      if (hi - lo == 1) return partials[lo];
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      const std::int32_t left = combine(lo, mid);
      const std::int32_t right = combine(mid, hi);
      tmp.push_back(TmpNode{StepOp::Add, tmp[left].out + tmp[right].out, left, right});
      return static_cast<std::int32_t>(tmp.size() - 1);
    };
    root = combine(0, partials.size());
  }

  bfs_pack(tmp, root, tree);
  rehash(tree);
  return tree;
}

void rehash(TraceTree& tree, const NodeHasher& hasher) {
  tree.hashes.assign(tree.size(), 0);
  for (std::size_t i = tree.size(); i-- > 0;) {
    const Step& s = tree.steps[i];
    const std::uint64_t lh = s.left >= 0 ? tree.hashes[s.left] : 0;
    const std::uint64_t rh = s.right >= 0 ? tree.hashes[s.right] : 0;
    tree.hashes[i] = hasher(s.op, s.shift, lh, rh, s.claimed_output);
  }
  tree.root_hash = tree.hashes.front();
}

std::uint64_t merkle_root(const TraceTree& tree) { return tree.root_hash; }

std::size_t root_step(const TraceTree& tree) {
  if (tree.steps.empty()) throw std::invalid_argument("empty trace");
  return 0;
}

TraceTree corrupt(const TraceTree& tree, std::size_t target) {
  if (target >= tree.size()) throw std::invalid_argument("corrupt: bad target");
  if (tree.is_leaf(target)) {
    throw std::invalid_argument("corrupt: inputs are public, leaves cannot be forged");
  }

  TraceTree forged = tree;
  forged.steps[target].claimed_output += 1;  // wraps at the word width

  std::vector<std::int32_t> parent(forged.size(), -1);
  for (std::size_t i = 0; i < forged.size(); ++i) {
    if (forged.steps[i].left >= 0) parent[forged.steps[i].left] = static_cast<std::int32_t>(i);
    if (forged.steps[i].right >= 0) parent[forged.steps[i].right] = static_cast<std::int32_t>(i);
  }
  for (std::int32_t cur = parent[target]; cur >= 0; cur = parent[cur]) {
    Step& s = forged.steps[cur];
    const std::uint64_t left = forged.steps[s.left].claimed_output;
    const std::uint64_t right = s.right >= 0 ? forged.steps[s.right].claimed_output : 0;
    s.claimed_output = eval_step(s.op, left, right, s.shift);
  }

  rehash(forged);
  return forged;
}

namespace {

bool same_shape(const TraceTree& x, const TraceTree& y) {
  if (x.a != y.a || x.b != y.b || x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Step& s = x.steps[i];
    const Step& t = y.steps[i];
    if (s.op != t.op || s.left != t.left || s.right != t.right || s.shift != t.shift) {
      return false;
    }
    if (s.op == StepOp::LeafInput && s.claimed_output != t.claimed_output) {
      return false;  // leaves are public inputs and must agree
    }
  }
  return true;
}

}  // namespace

Disagreement bisect(const TraceTree& solver, const TraceTree& challenger) {
  if (!same_shape(solver, challenger)) {
    throw std::invalid_argument("bisect: traces must share shape and inputs");
  }
  if (solver.root_value() == challenger.root_value()) {
    throw std::invalid_argument("bisect: equal roots, no dispute exists");
  }

  std::size_t cur = 0;
  std::uint32_t queries = 0;
  for (;;) {
    ++queries;
    const Step& s = solver.steps[cur];
    std::int32_t differing_child = -1;
    for (std::int32_t child : {s.left, s.right}) {
      if (child >= 0 && solver.steps[child].claimed_output !=
                            challenger.steps[child].claimed_output) {
        differing_child = child;
        break;
      }
    }
    if (differing_child < 0) {
      Disagreement d;
      d.step_id = s.id;
      d.op = s.op;
      d.shift = s.shift;
      for (std::int32_t child : {s.left, s.right}) {
        if (child >= 0) {
          d.child_claims.push_back(solver.steps[child].claimed_output);
          d.child_is_leaf.push_back(solver.is_leaf(child));
        }
      }
      d.solver_claim = s.claimed_output;
      d.challenger_claim = challenger.steps[cur].claimed_output;
      d.judge_queries = queries;
      return d;
    }
    cur = static_cast<std::size_t>(differing_child);
  }
}

Verdict judge_step(const Disagreement& disagreement, std::uint64_t a,
                   std::uint64_t b) {
  (void)b;  // part of the public request; only a appears below leaves
  if (disagreement.op == StepOp::LeafInput) {
    throw std::logic_error("judge_step: leaf claims are public inputs");
  }
  const std::size_t arity = disagreement.op == StepOp::Add ? 2 : 1;
  if (disagreement.child_claims.size() != arity ||
      disagreement.child_is_leaf.size() != arity) {
    throw std::invalid_argument("judge_step: malformed disagreement");
  }
  auto input = [&](std::size_t i) {
    // Leaf children are public: the judge substitutes the operand itself.
    return disagreement.child_is_leaf[i] ? a : disagreement.child_claims[i];
  };
  const std::uint64_t left = input(0);
  const std::uint64_t right =
      disagreement.child_claims.size() > 1 ? input(1) : 0;
  const std::uint64_t exact = eval_step(disagreement.op, left, right, disagreement.shift);
  Verdict verdict;
  verdict.decision = disagreement.solver_claim == exact ? Decision::SolverCorrect
                                                        : Decision::SolverFalse;
  verdict.checked_step = disagreement.step_id;
  return verdict;
}

void dump_trace(const TraceTree& tree, std::ostream& out) {
  const auto flags = out.flags();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const Step& s = tree.steps[i];
    out << s.id.level << ',' << s.id.index << ',' << to_string(s.op) << ','
        << std::dec << s.claimed_output << ',' << std::hex << std::setw(8)
        << std::setfill('0') << (tree.hashes[i] >> 32) << std::dec << '\n';
  }
  out.flags(flags);
}

}  // namespace verisim
