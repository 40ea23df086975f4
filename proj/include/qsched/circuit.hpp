#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qsched {

enum class GateKind { SingleQubit, CX };

/// Scheduler-level gate: an opaque single-qubit placeholder or a CX.
struct Gate {
  GateKind kind = GateKind::SingleQubit;
  std::array<int, 2> qubits{0, -1};

  static Gate single(int qubit) { return {GateKind::SingleQubit, {qubit, -1}}; }
  static Gate cx(int control, int target) { return {GateKind::CX, {control, target}}; }

  [[nodiscard]] int arity() const { return kind == GateKind::CX ? 2 : 1; }
  bool operator==(const Gate&) const = default;
};

/**
 * A circuit reduced to what scheduling needs: width, gate order and CX
 * connectivity. Immutable once constructed; depth is computed on
 * construction.
 */
class Circuit {
public:
  /// Throws ValidationError when a gate is malformed or the gate list is empty.
  Circuit(std::string id, int numQubits, std::vector<Gate> gates);

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] int numQubits() const { return numQubits_; }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] std::size_t cxCount() const;

  bool operator==(const Circuit& other) const {
    return id_ == other.id_ && numQubits_ == other.numQubits_ && gates_ == other.gates_;
  }

private:
  std::string id_;
  int numQubits_;
  std::vector<Gate> gates_;
  int depth_;
};

/// Length of the longest chain of gates that pairwise share a qubit.
/// Throws ValidationError on an empty gate list.
int computeDepth(int numQubits, const std::vector<Gate>& gates);
inline int computeDepth(const Circuit& circuit) {
  return computeDepth(circuit.numQubits(), circuit.gates());
}

/**
 * Layered random circuit. Every layer touches each qubit exactly once:
 * qubits are shuffled and paired, each pair becomes a CX with probability
 * cxDensity, otherwise two placeholders. The depth therefore equals
 * depthTarget exactly.
 */
Circuit generateRandomCircuit(int numQubits, int depthTarget, double cxDensity,
                              std::uint64_t seed);

/// Deterministic UUID-formatted identifier drawn from the given seed.
std::string makeCircuitId(std::uint64_t seed);

inline constexpr int kMinPriority = 1;
inline constexpr int kMaxPriority = 20;
inline constexpr std::int64_t kDefaultShots = 1024;

/**
 * Lightweight job record the schedulers operate on.
 *
 * Root proxies share their id with the source circuit; fragments produced
 * by cutting get a derived id and keep the root circuit id in parentId.
 */
struct CircuitProxy {
  std::string id;
  std::string parentId;
  int q = 1;
  int d = 1;
  std::optional<std::string> tau;
  double sigma = 0.0;
  int rho = 1;
  std::int64_t shots = kDefaultShots;
  std::optional<double> basePTime;
  std::optional<double> baseNoise;
  std::optional<double> b;
  std::optional<double> c;
  /// The (fragment) circuit this proxy stands for.
  std::shared_ptr<const Circuit> circuit;

  [[nodiscard]] bool isFragment() const { return id != parentId; }
};

struct ProxyEstimates {
  double basePTime = 0.0;
  double baseNoise = 0.0;
};

/// Throws ValidationError when rho is outside [1, 20], sigma disagrees with
/// tau, or shots < 1.
CircuitProxy makeProxy(std::shared_ptr<const Circuit> circuit, std::optional<std::string> tau,
                       double sigma, int rho, std::int64_t shots, ProxyEstimates estimates);

/// Checks the proxy invariants; throws ValidationError on the first violation.
void validateProxy(const CircuitProxy& proxy);

} // namespace qsched
