#pragma once

#include "qsched/circuit.hpp"
#include "qsched/machine.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qsched {

/// CX multigraph of a circuit: weight[a][b] counts CX gates between a and b.
class Connectivity {
public:
  explicit Connectivity(const Circuit& circuit);
  Connectivity(int numQubits, const std::vector<std::pair<int, int>>& cxEdges);

  [[nodiscard]] int numQubits() const { return numQubits_; }
  [[nodiscard]] int weight(int a, int b) const {
    return weights_[static_cast<std::size_t>(a * numQubits_ + b)];
  }
  /// Number of CX gates crossing the bipartition; bit i of blockB set means
  /// qubit i is in block B.
  [[nodiscard]] int crossing(std::uint32_t blockB) const;

private:
  int numQubits_;
  std::vector<int> weights_;
};

/// One gate-cut bipartition and its sampling cost.
struct CutPlan {
  /// partition[i] == 0 puts qubit i in block A, 1 in block B.
  std::vector<std::uint8_t> partition;
  int crossingGates = 0;
  std::uint64_t kappa = 1;         // 3^k
  std::uint64_t overhead = 1;      // kappa^2 = 9^k
  std::uint64_t variantCount = 1;  // L = 6^k
  std::array<int, 2> fragmentSizes{0, 0};

  bool operator==(const CutPlan&) const = default;
};

/// Integer power with overflow detection (throws ValidationError).
std::uint64_t checkedPow(std::uint64_t base, int exponent);

/// Builds a plan from an explicit bipartition, counting crossings on the
/// circuit. Throws ValidationError when a block is empty or sizes mismatch.
CutPlan planFromPartition(const Connectivity& graph, std::vector<std::uint8_t> partition);

inline constexpr int kMaxBruteForceQubits = 20;

/**
 * Exhaustive search for the bipartition with fewest crossing CX gates among
 * those with |A| <= maxA and |B| <= maxB. Ties go to the smaller |A|, then
 * to the lexicographically smallest partition vector.
 *
 * Throws ValidationError for fewer than 2 or more than 20 qubits and
 * InfeasibleCut when the size constraints admit no bipartition.
 */
CutPlan estimateCut(const Connectivity& graph, int maxA, int maxB);
inline CutPlan estimateCut(const Circuit& circuit, int maxA, int maxB) {
  return estimateCut(Connectivity(circuit), maxA, maxB);
}

/// Fragments of a cut proxy together with the plan that produced them.
struct CutOutcome {
  std::array<CircuitProxy, 2> fragmentProxies;
  CutPlan plan;
};

/**
 * Splits a circuit along a plan. Crossing CX gates become a placeholder on
 * each side; qubits are renumbered in increasing order within each block.
 * Fragments carry ids "<circuit id>.a" / "<circuit id>.b".
 */
std::pair<Circuit, Circuit> applyCutToCircuit(const Circuit& circuit, const CutPlan& plan);

/**
 * Turns a proxy into its two fragment proxies: shots scale by the sampling
 * overhead, time and noise are rescaled by the fragment depth ratio, and
 * user parameters and the root parentId are inherited.
 */
CutOutcome applyCutToProxy(const CircuitProxy& parent, const CutPlan& plan,
                           std::span<const Machine> machines);

struct VariantShots {
  std::uint64_t variant = 0;
  std::uint64_t shots = 0;
};

/// Apportions totalShots * overhead shots over the L variants. The CX
/// decomposition coefficients are taken to have equal magnitude, so the split
/// is even with the remainder assigned to the lowest indices.
std::vector<VariantShots> shotVariantSchedule(const CutPlan& plan, std::uint64_t totalShots);

} // namespace qsched
