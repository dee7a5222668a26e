#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "singlet/bytes.hpp"

namespace singlet {

// Deterministic byte generator: SHA-256 over (key || counter). Used for every
// random value in the system so that a single seed reproduces a whole run.
class Drbg {
  public:
    explicit Drbg(std::span<const std::uint8_t> seed);
    explicit Drbg(std::string_view seed_text);

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);
    std::uint64_t next_u64();

    // Independent child stream, stable under the parent's consumption order.
    Drbg fork(std::string_view label) const;

  private:
    Drbg() = default;
    std::array<std::uint8_t, 32> key_{};
    std::uint64_t counter_ = 0;
};

// Process-wide generator. Seeded from SINCLAVE_SEED when set, otherwise from
// the OS. Thread safe.
void global_rng_fill(std::span<std::uint8_t> out);
Bytes random_bytes(std::size_t n);

// True when SINCLAVE_SEED was present at first use of the global generator.
bool global_rng_seeded();

// Re-reads SINCLAVE_SEED and resets the global stream. Test hook.
void reset_global_rng();

}  // namespace singlet
