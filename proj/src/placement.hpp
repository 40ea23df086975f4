#pragma once

#include "qsched/schedule.hpp"

#include <span>

namespace qsched::detail {

/// Initial machine guess: the preferred machine when it is wide enough,
/// otherwise the least noisy wide-enough machine, ties to the shorter queue.
std::size_t predictMachine(const CircuitProxy& proxy, std::span<const Machine> machines);

/// First timeslot of `machine` with room for `q` qubits, or the slot count.
std::size_t firstFitSlot(const Schedule& schedule, std::size_t machine, int q,
                         std::span<const Machine> machines);

int slotQubits(const Schedule& schedule, const Timeslot& slot);

/// Same machines, same timeslots, same job ids in the same order.
bool sameStructure(const Schedule& a, const Schedule& b);

} // namespace qsched::detail
