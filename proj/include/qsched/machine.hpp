#pragma once

#include "qsched/circuit.hpp"

#include <string>
#include <vector>

namespace qsched {

/// Per-machine timing and noise coefficients.
struct EstimateModel {
  double perLayerTime = 0.1;       // seconds per circuit layer
  double perShotReadout = 0.001;   // seconds per shot
  double noisePerQubitLayer = 0.01;
  double baseSetup = 0.5;          // seconds between unrelated jobs
  double fragmentSetup = 0.0;      // seconds between fragments of one parent

  /// Throws ValidationError on negative coefficients or noise outside (0, 1).
  void validate() const;
};

/// One combined circuit waiting in a device queue.
struct QueuedEntry {
  int timeslot = 0;
  std::vector<CircuitProxy> proxies;
  double startTime = 0.0;
  double endTime = 0.0;

  [[nodiscard]] int usedQubits() const;
};

/// A simulated QPU with a single FIFO device queue.
struct Machine {
  std::string id;
  int capacity = 0;
  EstimateModel model;
  /// Pre-existing load in seconds, not represented by entries.
  double loadOffset = 0.0;
  std::vector<QueuedEntry> queue;

  /// Pending work l(m) in seconds: the end of the last queued entry, or the
  /// pre-population offset when nothing has been queued.
  [[nodiscard]] double queueLength() const;
  [[nodiscard]] bool idle() const { return queue.empty() && loadOffset == 0.0; }
};

Machine makeMachine(std::string id, int capacity, EstimateModel model = {});

} // namespace qsched
