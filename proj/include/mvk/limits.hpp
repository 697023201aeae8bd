#pragma once

#include <cstdint>

namespace mvk {

// Resource caps shared by the exhaustive searches. MULTIVERSE_KIT_MAX_STATES
// overrides max_states; the statement cap stays at 2^16 so statement
// enumeration remains a 64k loop at most.
struct Limits {
  uint64_t max_states = 4096;        // largest state space a builder may create
  uint64_t max_statements = 65536;   // largest statement family to enumerate
  uint32_t max_enum_worlds = 6;      // frame enumeration is 2^(n^2) relations
  uint32_t max_valuation_bits = 24;  // valuation sweeps are 2^(worlds*vars)

  static Limits from_env();
};

}  // namespace mvk
