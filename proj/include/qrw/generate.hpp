#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrw/term.hpp"

namespace qrw {

/// Random well-sorted ground terms. Tensor factors always get disjoint
/// label sets, so generated terms never carry a repeated label.
struct GenConfig {
  std::vector<std::string> labels{"a", "b", "c"};
  int maxDepth = 3;
  /// Probability of stopping at a leaf before maxDepth is reached.
  double leafBias = 0.35;
  /// Emit h, cnot, id and |0⟩/|1⟩ where the space allows it.
  bool gates = true;
};

class TermGenerator {
 public:
  explicit TermGenerator(std::uint64_t seed, GenConfig config = {});

  /// Random sort (kind and label set), then a term of that sort.
  Term any();
  Term ofSort(SortKind kind, const Space& space, int depth);
  Term ofSort(SortKind kind, const Space& space) {
    return ofSort(kind, space, config_.maxDepth);
  }
  /// Non-empty subset of the label pool.
  Space randomSpace(std::size_t max_labels = 0);
  std::mt19937_64& rng() { return rng_; }

 private:
  Term scalar(int depth);
  Term vector(const Space& s, int depth);
  Term op(const Space& s, int depth);
  Term scalarLeaf();
  Term vectorLeaf(const Space& s);
  Term opLeaf(const Space& s);
  std::vector<std::string> shuffledPorts(const Space& s);
  /// Two disjoint non-empty halves; requires s.size() >= 2.
  std::pair<Space, Space> split(const Space& s);
  std::size_t pick(std::size_t n);
  bool coin(double p);

  std::mt19937_64 rng_;
  GenConfig config_;
};

}  // namespace qrw
