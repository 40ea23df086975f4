#include "qsched/cutting.hpp"

#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"

#include <bit>
#include <limits>
#include <memory>

namespace qsched {

Connectivity::Connectivity(const Circuit& circuit)
    : numQubits_(circuit.numQubits()),
      weights_(static_cast<std::size_t>(numQubits_ * numQubits_), 0) {
  for (const auto& gate : circuit.gates()) {
    if (gate.kind != GateKind::CX) {
      continue;
    }
    const int a = gate.qubits[0];
    const int b = gate.qubits[1];
    ++weights_[static_cast<std::size_t>(a * numQubits_ + b)];
    ++weights_[static_cast<std::size_t>(b * numQubits_ + a)];
  }
}

Connectivity::Connectivity(int numQubits, const std::vector<std::pair<int, int>>& cxEdges)
    : numQubits_(numQubits), weights_(static_cast<std::size_t>(numQubits * numQubits), 0) {
  if (numQubits < 1) {
    throw ValidationError("connectivity needs at least one qubit");
  }
  for (const auto& [a, b] : cxEdges) {
    if (a < 0 || b < 0 || a >= numQubits || b >= numQubits || a == b) {
      throw ValidationError("invalid CX edge in connectivity");
    }
    ++weights_[static_cast<std::size_t>(a * numQubits_ + b)];
    ++weights_[static_cast<std::size_t>(b * numQubits_ + a)];
  }
}

int Connectivity::crossing(std::uint32_t blockB) const {
  int total = 0;
  for (int a = 0; a < numQubits_; ++a) {
    const bool sideA = (blockB >> a) & 1U;
    for (int b = a + 1; b < numQubits_; ++b) {
      if (sideA != static_cast<bool>((blockB >> b) & 1U)) {
        total += weight(a, b);
      }
    }
  }
  return total;
}

std::uint64_t checkedPow(std::uint64_t base, int exponent) {
  if (exponent < 0) {
    throw ValidationError("negative exponent");
  }
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::uint64_t>::max() / base) {
      throw ValidationError("cut cost overflows 64 bits (" + std::to_string(exponent) +
                            " crossing gates)");
    }
    result *= base;
  }
  return result;
}

namespace {

CutPlan finishPlan(std::vector<std::uint8_t> partition, int crossing) {
  CutPlan plan;
  int sizeB = 0;
  for (const auto side : partition) {
    sizeB += side;
  }
  plan.fragmentSizes = {static_cast<int>(partition.size()) - sizeB, sizeB};
  plan.partition = std::move(partition);
  plan.crossingGates = crossing;
  plan.kappa = checkedPow(3, crossing);
  plan.overhead = checkedPow(9, crossing);
  plan.variantCount = checkedPow(6, crossing);
  return plan;
}

// a precedes b when, at the lowest qubit where they differ, a puts the qubit in A
bool lexLess(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t diff = a ^ b;
  if (diff == 0) {
    return false;
  }
  const std::uint32_t lowest = diff & (~diff + 1U);
  return (a & lowest) == 0U;
}

} // namespace

CutPlan planFromPartition(const Connectivity& graph, std::vector<std::uint8_t> partition) {
  if (static_cast<int>(partition.size()) != graph.numQubits()) {
    throw ValidationError("partition size does not match the circuit width");
  }
  if (graph.numQubits() > 32) {
    throw ValidationError("partition wider than 32 qubits");
  }
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (partition[i] > 1) {
      throw ValidationError("partition entries must be 0 or 1");
    }
    mask |= static_cast<std::uint32_t>(partition[i]) << i;
  }
  const std::uint32_t full =
      graph.numQubits() == 32 ? 0xffffffffU : ((1U << graph.numQubits()) - 1U);
  if (mask == 0 || mask == full) {
    throw ValidationError("both blocks of a cut must be non-empty");
  }
  return finishPlan(std::move(partition), graph.crossing(mask));
}

CutPlan estimateCut(const Connectivity& graph, int maxA, int maxB) {
  const int n = graph.numQubits();
  if (n < 2) {
    throw ValidationError("cut estimation needs at least two qubits");
  }
  if (n > kMaxBruteForceQubits) {
    throw ValidationError("cut estimation is limited to " + std::to_string(kMaxBruteForceQubits) +
                          " qubits");
  }
  if (maxA < 1 || maxB < 1 || maxA + maxB < n) {
    throw InfeasibleCut("no bipartition of " + std::to_string(n) + " qubits fits blocks (" +
                        std::to_string(maxA) + ", " + std::to_string(maxB) + ")");
  }

  // Walk all masks in Gray-code order; flipping one qubit changes the
  // crossing count by its weight to the same side minus its weight across.
  const std::uint32_t count = 1U << n;
  std::uint32_t mask = 0;
  int crossing = 0;
  int sizeB = 0;
  bool found = false;
  std::uint32_t bestMask = 0;
  int bestCrossing = 0;
  int bestSizeA = 0;
  for (std::uint32_t step = 1; step < count; ++step) {
    const int v = std::countr_zero(step);
    const bool wasB = (mask >> v) & 1U;
    int same = 0;
    int across = 0;
    for (int u = 0; u < n; ++u) {
      if (u == v) {
        continue;
      }
      const int w = graph.weight(u, v);
      if (w == 0) {
        continue;
      }
      if (static_cast<bool>((mask >> u) & 1U) == wasB) {
        same += w;
      } else {
        across += w;
      }
    }
    crossing += same - across;
    mask ^= 1U << v;
    sizeB += wasB ? -1 : 1;
    const int sizeA = n - sizeB;
    if (sizeB == 0 || sizeA == 0 || sizeA > maxA || sizeB > maxB) {
      continue;
    }
    const bool better = !found || crossing < bestCrossing ||
                        (crossing == bestCrossing &&
                         (sizeA < bestSizeA || (sizeA == bestSizeA && lexLess(mask, bestMask))));
    if (better) {
      found = true;
      bestMask = mask;
      bestCrossing = crossing;
      bestSizeA = sizeA;
    }
  }
  if (!found) {
    throw InfeasibleCut("no feasible bipartition");
  }
  std::vector<std::uint8_t> partition(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    partition[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((bestMask >> i) & 1U);
  }
  return finishPlan(std::move(partition), bestCrossing);
}

std::pair<Circuit, Circuit> applyCutToCircuit(const Circuit& circuit, const CutPlan& plan) {
  const int n = circuit.numQubits();
  if (static_cast<int>(plan.partition.size()) != n) {
    throw ValidationError("cut plan does not match circuit " + circuit.id());
  }
  std::vector<int> local(static_cast<std::size_t>(n));
  std::array<int, 2> sizes{0, 0};
  for (int i = 0; i < n; ++i) {
    const auto side = plan.partition[static_cast<std::size_t>(i)];
    if (side > 1) {
      throw ValidationError("partition entries must be 0 or 1");
    }
    local[static_cast<std::size_t>(i)] = sizes[side]++;
  }
  if (sizes != plan.fragmentSizes || sizes[0] == 0 || sizes[1] == 0) {
    throw ValidationError("cut plan block sizes are inconsistent with circuit " + circuit.id());
  }

  std::array<std::vector<Gate>, 2> gates;
  int crossing = 0;
  for (const auto& gate : circuit.gates()) {
    const int a = gate.qubits[0];
    const auto sideA = plan.partition[static_cast<std::size_t>(a)];
    if (gate.kind == GateKind::SingleQubit) {
      gates[sideA].push_back(Gate::single(local[static_cast<std::size_t>(a)]));
      continue;
    }
    const int b = gate.qubits[1];
    const auto sideB = plan.partition[static_cast<std::size_t>(b)];
    if (sideA == sideB) {
      gates[sideA].push_back(
          Gate::cx(local[static_cast<std::size_t>(a)], local[static_cast<std::size_t>(b)]));
    } else {
      ++crossing;
      gates[sideA].push_back(Gate::single(local[static_cast<std::size_t>(a)]));
      gates[sideB].push_back(Gate::single(local[static_cast<std::size_t>(b)]));
    }
  }
  if (crossing != plan.crossingGates) {
    throw ValidationError("cut plan crossing count does not match circuit " + circuit.id());
  }
  if (gates[0].empty() || gates[1].empty()) {
    throw ValidationError("cut of circuit " + circuit.id() + " leaves a fragment without gates");
  }
  return {Circuit(circuit.id() + ".a", sizes[0], std::move(gates[0])),
          Circuit(circuit.id() + ".b", sizes[1], std::move(gates[1]))};
}

CutOutcome applyCutToProxy(const CircuitProxy& parent, const CutPlan& plan,
                           std::span<const Machine> machines) {
  if (!parent.circuit) {
    throw ValidationError("proxy " + parent.id + " has no circuit to cut");
  }
  if (static_cast<int>(plan.partition.size()) != parent.q ||
      plan.fragmentSizes[0] + plan.fragmentSizes[1] != parent.q) {
    throw ValidationError("cut plan does not match proxy " + parent.id);
  }
  auto [left, right] = applyCutToCircuit(*parent.circuit, plan);
  const std::array<std::shared_ptr<const Circuit>, 2> parts{
      std::make_shared<const Circuit>(std::move(left)),
      std::make_shared<const Circuit>(std::move(right))};
  const auto shots = static_cast<std::uint64_t>(parent.shots);
  if (shots > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) / plan.overhead) {
    throw ValidationError("fragment shot budget overflows");
  }

  CutOutcome outcome{{}, plan};
  const char* suffix[2] = {".a", ".b"};
  for (std::size_t k = 0; k < 2; ++k) {
    CircuitProxy& frag = outcome.fragmentProxies[k];
    frag.id = parent.id + suffix[k];
    frag.parentId = parent.parentId;
    frag.q = parts[k]->numQubits();
    frag.d = parts[k]->depth();
    frag.tau = parent.tau;
    frag.sigma = parent.sigma;
    frag.rho = parent.rho;
    frag.shots = static_cast<std::int64_t>(shots * plan.overhead);
    frag.basePTime = scaledProcessingTime(parent, frag.d);
    frag.baseNoise = extrapolatedNoise(parent, frag.d, machines).value;
    frag.circuit = parts[k];
  }
  return outcome;
}

std::vector<VariantShots> shotVariantSchedule(const CutPlan& plan, std::uint64_t totalShots) {
  if (totalShots < 1) {
    throw ValidationError("shotVariantSchedule needs at least one shot");
  }
  if (totalShots > std::numeric_limits<std::uint64_t>::max() / plan.overhead) {
    throw ValidationError("shot total overflows");
  }
  const std::uint64_t total = totalShots * plan.overhead;
  const std::uint64_t variants = plan.variantCount;
  const std::uint64_t base = total / variants;
  const std::uint64_t remainder = total % variants;
  std::vector<VariantShots> out;
  out.reserve(variants);
  for (std::uint64_t v = 0; v < variants; ++v) {
    out.push_back({v, base + (v < remainder ? 1U : 0U)});
  }
  return out;
}

} // namespace qsched
