#include "qsched/circuit.hpp"

#include "qsched/errors.hpp"
#include "qsched/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <utility>

namespace qsched {

namespace {

void validateGate(const Gate& gate, int numQubits) {
  const auto inRange = [numQubits](int q) { return q >= 0 && q < numQubits; };
  if (gate.kind == GateKind::SingleQubit) {
    if (!inRange(gate.qubits[0])) {
      throw ValidationError("single-qubit gate references qubit " +
                            std::to_string(gate.qubits[0]) + " outside [0, " +
                            std::to_string(numQubits) + ")");
    }
    return;
  }
  if (!inRange(gate.qubits[0]) || !inRange(gate.qubits[1])) {
    throw ValidationError("CX gate references a qubit outside [0, " + std::to_string(numQubits) +
                          ")");
  }
  if (gate.qubits[0] == gate.qubits[1]) {
    throw ValidationError("CX gate needs two distinct qubits");
  }
}

} // namespace

Circuit::Circuit(std::string id, int numQubits, std::vector<Gate> gates)
    : id_(std::move(id)), numQubits_(numQubits), gates_(std::move(gates)), depth_(0) {
  if (numQubits_ < 1) {
    throw ValidationError("circuit needs at least one qubit");
  }
  for (auto& gate : gates_) {
    validateGate(gate, numQubits_);
    if (gate.kind == GateKind::SingleQubit) {
      gate.qubits[1] = -1;
    }
  }
  depth_ = computeDepth(numQubits_, gates_);
}

std::size_t Circuit::cxCount() const {
  return static_cast<std::size_t>(std::count_if(
      gates_.begin(), gates_.end(), [](const Gate& g) { return g.kind == GateKind::CX; }));
}

int computeDepth(int numQubits, const std::vector<Gate>& gates) {
  if (gates.empty()) {
    throw ValidationError("circuit has no gates");
  }
  std::vector<int> level(static_cast<std::size_t>(numQubits), 0);
  int depth = 0;
  for (const auto& gate : gates) {
    validateGate(gate, numQubits);
    int layer = level[static_cast<std::size_t>(gate.qubits[0])];
    if (gate.kind == GateKind::CX) {
      layer = std::max(layer, level[static_cast<std::size_t>(gate.qubits[1])]);
    }
    ++layer;
    for (int k = 0; k < gate.arity(); ++k) {
      level[static_cast<std::size_t>(gate.qubits[static_cast<std::size_t>(k)])] = layer;
    }
    depth = std::max(depth, layer);
  }
  return depth;
}

std::string makeCircuitId(std::uint64_t seed) {
  Rng rng(deriveSeed(seed, 0x1d));
  const std::uint64_t hi = rng.next();
  const std::uint64_t lo = rng.next();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xffff),
                static_cast<unsigned>(hi & 0xffff), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return buf;
}

Circuit generateRandomCircuit(int numQubits, int depthTarget, double cxDensity,
                              std::uint64_t seed) {
  if (numQubits < 1) {
    throw ValidationError("generateRandomCircuit: numQubits must be >= 1");
  }
  if (depthTarget < 1) {
    throw ValidationError("generateRandomCircuit: depthTarget must be >= 1");
  }
  if (!(cxDensity >= 0.0 && cxDensity <= 1.0)) {
    throw ValidationError("generateRandomCircuit: cxDensity must lie in [0, 1]");
  }
  if (cxDensity > 0.0 && numQubits < 2) {
    throw ValidationError("generateRandomCircuit: CX gates need at least two qubits");
  }

  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(numQubits));
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(numQubits) * static_cast<std::size_t>(depthTarget));
  for (int layer = 0; layer < depthTarget; ++layer) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::size_t i = 0;
    for (; i + 1 < order.size(); i += 2) {
      if (rng.bernoulli(cxDensity)) {
        gates.push_back(Gate::cx(order[i], order[i + 1]));
      } else {
        gates.push_back(Gate::single(order[i]));
        gates.push_back(Gate::single(order[i + 1]));
      }
    }
    if (i < order.size()) {
      gates.push_back(Gate::single(order[i]));
    }
  }
  return Circuit(makeCircuitId(seed), numQubits, std::move(gates));
}

void validateProxy(const CircuitProxy& proxy) {
  if (proxy.rho < kMinPriority || proxy.rho > kMaxPriority) {
    throw ValidationError("priority rho must lie in [1, 20], got " + std::to_string(proxy.rho));
  }
  if (proxy.tau.has_value()) {
    if (!(proxy.sigma > 0.0)) {
      throw ValidationError("strictness sigma must be > 0 when a machine preference is set");
    }
  } else if (proxy.sigma != 0.0) {
    throw ValidationError("strictness sigma must be 0 without a machine preference");
  }
  if (proxy.q < 1 || proxy.d < 1 || proxy.shots < 1) {
    throw ValidationError("proxy needs q >= 1, d >= 1 and shots >= 1");
  }
}

CircuitProxy makeProxy(std::shared_ptr<const Circuit> circuit, std::optional<std::string> tau,
                       double sigma, int rho, std::int64_t shots, ProxyEstimates estimates) {
  if (!circuit) {
    throw ValidationError("makeProxy: null circuit");
  }
  CircuitProxy proxy;
  proxy.id = circuit->id();
  proxy.parentId = circuit->id();
  proxy.q = circuit->numQubits();
  proxy.d = circuit->depth();
  proxy.tau = std::move(tau);
  proxy.sigma = sigma;
  proxy.rho = rho;
  proxy.shots = shots;
  proxy.basePTime = estimates.basePTime;
  proxy.baseNoise = estimates.baseNoise;
  proxy.circuit = std::move(circuit);
  validateProxy(proxy);
  return proxy;
}

} // namespace qsched
