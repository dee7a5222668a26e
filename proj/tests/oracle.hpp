#pragma once

// Independent references used to freeze expected values. Everything here goes
// through OpenSSL or plain replay logic, never through the code under test.

#include <openssl/evp.h>

#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "singlet/sha256.hpp"

namespace oracle {

inline singlet::hash::Digest sha256(std::span<const std::uint8_t> data) {
    singlet::hash::Digest out{};
    unsigned int len = out.size();
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw std::runtime_error("oracle: EVP_Digest failed");
    return out;
}

// Deterministic test-data generator, independent of the library's DRBG.
class TestRng {
  public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}

    std::vector<std::uint8_t> bytes(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        for (auto& b : out) b = static_cast<std::uint8_t>(engine_());
        return out;
    }

    std::uint64_t below(std::uint64_t bound) {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace oracle
