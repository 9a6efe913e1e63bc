#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hspec {

using Symbol = std::uint8_t;

// Finite word over {0..n-1}. std::vector ordering is the canonical
// lexicographic order used throughout.
using Word = std::vector<Symbol>;

using TransitionMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

std::string to_string(const Word& word);

// Radix-n integer code of a word; nullopt when n^k does not fit in 64 bits.
std::optional<std::uint64_t> word_code(const Word& word, int alphabet_size);

Word reversed(Word word);

struct TrimResult;

/// Subshift of finite type with every symbol bi-infinitely extendable.
/// Only produced by validate_sft() or the named constructors, which trim.
class Sft {
 public:
  static Sft full_shift(int n);
  // Two symbols, word 11 forbidden.
  static Sft golden_mean();

  int size() const { return static_cast<int>(transitions_.rows()); }
  const TransitionMatrix& transitions() const { return transitions_; }
  bool allows(Symbol a, Symbol b) const { return transitions_(a, b) != 0; }
  bool admissible(const Word& word) const;

  // Same system read backwards in time (transposed transitions).
  Sft reversed() const;

  bool operator==(const Sft& other) const { return transitions_ == other.transitions_; }

 private:
  explicit Sft(TransitionMatrix transitions) : transitions_(std::move(transitions)) {}
  friend TrimResult trim_transitions(const TransitionMatrix&);

  TransitionMatrix transitions_;
};

struct TrimResult {
  Sft sft;
  std::vector<int> kept;     // original labels of surviving symbols, in order
  std::vector<int> deleted;  // original labels of trimmed symbols
};

TrimResult trim_transitions(const TransitionMatrix& matrix);

// Checks 0/1 entries, trims to a fixpoint and relabels surviving symbols
// 0..n'-1. Throws EmptySystem if nothing survives, DomainError on bad input.
TrimResult validate_sft(const TransitionMatrix& matrix);

// All admissible words of length k in lexicographic order.
std::vector<Word> enumerate_words(const Sft& sft, int k);

struct PeriodicOrbit {
  Word cycle;  // least rotation
  bool primitive = true;

  int period() const { return static_cast<int>(cycle.size()); }
  bool operator==(const PeriodicOrbit&) const = default;
};

// Least rotation of a cycle.
Word canonical_rotation(const Word& cycle);
bool is_primitive(const Word& cycle);

// Primitive cycles of period <= max_period, one per rotation class,
// ordered by period then lexicographically.
std::vector<PeriodicOrbit> periodic_orbits(const Sft& sft, int max_period);

/// Higher-block presentation: vertices are admissible words of length
/// `width`, u -> v when u and v overlap in width-1 symbols.
struct BlockGraph {
  int width = 1;
  int alphabet_size = 0;
  std::vector<Word> vertices;  // lexicographic
  std::vector<std::vector<int>> successors;
  std::vector<std::vector<int>> predecessors;

  int size() const { return static_cast<int>(vertices.size()); }
  std::size_t edge_count() const;
  // -1 when absent.
  int index_of(const Word& word) const;
};

BlockGraph higher_block(const Sft& sft, int width);

using VertexMask = std::vector<bool>;

VertexMask full_mask(const BlockGraph& graph);
VertexMask mask_of(const BlockGraph& graph, const std::vector<int>& vertices);
std::size_t mask_count(const VertexMask& mask);

// Removes masked vertices lacking a masked successor or predecessor until
// the fixpoint, leaving the bi-infinitely extendable part.
VertexMask trim_mask(const BlockGraph& graph, VertexMask mask);

struct Component {
  std::vector<int> vertices;  // ascending
  bool nontrivial = false;    // contains a cycle
};

// Strongly connected components of the masked subgraph, ordered by least
// contained vertex.
std::vector<Component> scc_decompose(const BlockGraph& graph, const VertexMask& mask);

}  // namespace hspec
