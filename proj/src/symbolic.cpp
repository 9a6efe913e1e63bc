#include "hspec/symbolic.hpp"

#include "hspec/errors.hpp"

#include <algorithm>
#include <limits>
#include <stack>

namespace hspec {

std::string to_string(const Word& word) {
  // Comma-separated only when some symbol needs two digits.
  const bool wide = std::any_of(word.begin(), word.end(), [](Symbol s) { return s >= 10; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (wide && i > 0) out += ',';
    out += std::to_string(static_cast<int>(word[i]));
  }
  return out;
}

std::optional<std::uint64_t> word_code(const Word& word, int alphabet_size) {
  std::uint64_t code = 0;
  const auto n = static_cast<std::uint64_t>(alphabet_size);
  for (Symbol s : word) {
    if (code > (std::numeric_limits<std::uint64_t>::max() - s) / n) return std::nullopt;
    code = code * n + s;
  }
  return code;
}

Word reversed(Word word) {
  std::reverse(word.begin(), word.end());
  return word;
}

Sft Sft::full_shift(int n) {
  if (n < 1 || n > 255) throw DomainError("full_shift: alphabet size must be in [1, 255]");
  return Sft(TransitionMatrix::Ones(n, n));
}

Sft Sft::golden_mean() {
  TransitionMatrix b(2, 2);
  b << 1, 1, 1, 0;
  return Sft(b);
}

bool Sft::admissible(const Word& word) const {
  for (Symbol s : word)
    if (s >= size()) return false;
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (!allows(word[i], word[i + 1])) return false;
  return true;
}

Sft Sft::reversed() const { return Sft(transitions_.transpose()); }

TrimResult trim_transitions(const TransitionMatrix& matrix) {
  const int n = static_cast<int>(matrix.rows());
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      bool has_out = false;
      bool has_in = false;
      for (int b = 0; b < n; ++b) {
        if (!alive[b]) continue;
        has_out = has_out || matrix(a, b) != 0;
        has_in = has_in || matrix(b, a) != 0;
      }
      if (!has_out || !has_in) {
        alive[a] = false;
        changed = true;
      }
    }
  }
  std::vector<int> kept;
  std::vector<int> deleted;
  for (int a = 0; a < n; ++a) (alive[a] ? kept : deleted).push_back(a);
  if (kept.empty()) throw EmptySystem("validate_sft: trimming deleted every symbol");

  const int m = static_cast<int>(kept.size());
  TransitionMatrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = matrix(kept[i], kept[j]);
  return TrimResult{Sft(std::move(out)), std::move(kept), std::move(deleted)};
}

TrimResult validate_sft(const TransitionMatrix& matrix) {
  if (matrix.rows() < 1) throw DomainError("validate_sft: empty alphabet");
  if (matrix.rows() != matrix.cols()) throw DomainError("validate_sft: transition matrix must be square");
  if (matrix.rows() > 255) throw DomainError("validate_sft: at most 255 symbols");
  if (((matrix.array() != 0) && (matrix.array() != 1)).any())
    throw DomainError("validate_sft: entries must be 0 or 1");
  return trim_transitions(matrix);
}

std::vector<Word> enumerate_words(const Sft& sft, int k) {
  if (k < 1) throw DomainError("enumerate_words: length must be >= 1");
  std::vector<Word> out;
  Word current;
  current.reserve(k);
  // Depth-first in symbol order yields lexicographic output.
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == k) {
      out.push_back(current);
      return;
    }
    for (int b = 0; b < sft.size(); ++b) {
      if (!current.empty() && !sft.allows(current.back(), static_cast<Symbol>(b))) continue;
      current.push_back(static_cast<Symbol>(b));
      self(self);
      current.pop_back();
    }
  };
  extend(extend);
  return out;
}

Word canonical_rotation(const Word& cycle) {
  Word best = cycle;
  Word rotated = cycle;
  for (std::size_t i = 1; i < cycle.size(); ++i) {
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    if (rotated < best) best = rotated;
  }
  return best;
}

bool is_primitive(const Word& cycle) {
  const std::size_t p = cycle.size();
  for (std::size_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    bool power = true;
    for (std::size_t i = d; i < p && power; ++i) power = cycle[i] == cycle[i - d];
    if (power) return false;
  }
  return true;
}

std::vector<PeriodicOrbit> periodic_orbits(const Sft& sft, int max_period) {
  if (max_period < 1) throw DomainError("periodic_orbits: max_period must be >= 1");
  std::vector<PeriodicOrbit> out;
  for (int p = 1; p <= max_period; ++p) {
    for (const Word& w : enumerate_words(sft, p)) {
      if (!sft.allows(w.back(), w.front())) continue;
      if (!is_primitive(w)) continue;
      if (canonical_rotation(w) != w) continue;
      out.push_back(PeriodicOrbit{w, true});
    }
  }
  return out;
}

std::size_t BlockGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : successors) n += s.size();
  return n;
}

int BlockGraph::index_of(const Word& word) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), word);
  if (it == vertices.end() || *it != word) return -1;
  return static_cast<int>(it - vertices.begin());
}

BlockGraph higher_block(const Sft& sft, int width) {
  if (width < 1) throw DomainError("higher_block: width must be >= 1");
  BlockGraph g;
  g.width = width;
  g.alphabet_size = sft.size();
  g.vertices = enumerate_words(sft, width);
  g.successors.resize(g.vertices.size());
  g.predecessors.resize(g.vertices.size());
  Word next;
  for (int u = 0; u < g.size(); ++u) {
    const Word& word = g.vertices[u];
    next.assign(word.begin() + 1, word.end());
    next.push_back(0);
    for (int b = 0; b < sft.size(); ++b) {
      if (!sft.allows(word.back(), static_cast<Symbol>(b))) continue;
      next.back() = static_cast<Symbol>(b);
      const int v = g.index_of(next);
      if (v < 0) continue;
      g.successors[u].push_back(v);
      g.predecessors[v].push_back(u);
    }
  }
  for (auto& p : g.predecessors) std::sort(p.begin(), p.end());
  return g;
}

VertexMask full_mask(const BlockGraph& graph) { return VertexMask(graph.vertices.size(), true); }

VertexMask mask_of(const BlockGraph& graph, const std::vector<int>& vertices) {
  VertexMask mask(graph.vertices.size(), false);
  for (int v : vertices) mask.at(v) = true;
  return mask;
}

std::size_t mask_count(const VertexMask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

VertexMask trim_mask(const BlockGraph& graph, VertexMask mask) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < graph.size(); ++v) {
      if (!mask[v]) continue;
      auto masked = [&](int u) { return mask[u]; };
      const bool out = std::any_of(graph.successors[v].begin(), graph.successors[v].end(), masked);
      const bool in = std::any_of(graph.predecessors[v].begin(), graph.predecessors[v].end(), masked);
      if (!out || !in) {
        mask[v] = false;
        changed = true;
      }
    }
  }
  return mask;
}

std::vector<Component> scc_decompose(const BlockGraph& graph, const VertexMask& mask) {
  // Iterative Tarjan.
  const int n = graph.size();
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<Component> out;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (!mask[root] || index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& succ = graph.successors[f.v];
      if (f.next < succ.size()) {
        const int w = succ[f.next++];
        if (!mask[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] != index[v]) continue;
      Component c;
      int w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        c.vertices.push_back(w);
      } while (w != v);
      std::sort(c.vertices.begin(), c.vertices.end());
      if (c.vertices.size() > 1) {
        c.nontrivial = true;
      } else {
        const auto& s = graph.successors[v];
        c.nontrivial = std::find(s.begin(), s.end(), v) != s.end();
      }
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Component& a, const Component& b) { return a.vertices.front() < b.vertices.front(); });
  return out;
}

}  // namespace hspec
