#ifndef DEDT_SNAPSHOT_HPP
#define DEDT_SNAPSHOT_HPP

#include <filesystem>

#include "dedt/auxiliary.hpp"
#include "dedt/committee.hpp"

namespace dedt {

// Versioned binary pause/resume container. Layout (little-endian):
//   "DEDT" magic, u16 version, committee geometry, then each member's
//   exemplar dump (id window, insert times, labels, features), then an
//   "AUX1" section with the auxiliary weights.
struct TrackerSnapshot {
    Committee committee;
    AuxiliaryModel aux{1};
};

void save_snapshot(const Committee& committee, const AuxiliaryModel& aux,
                   const std::filesystem::path& file);

TrackerSnapshot load_snapshot(const std::filesystem::path& file);

}  // namespace dedt

#endif
