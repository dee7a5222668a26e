#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "singlet/bytes.hpp"
#include "singlet/rng.hpp"
#include "singlet/sha256.hpp"

namespace singlet::rsa {

constexpr std::size_t kModulusBytes = 384;  // 3072 bits
constexpr std::uint32_t kPublicExponent = 65537;

using Modulus = std::array<std::uint8_t, kModulusBytes>;
using Signature = std::array<std::uint8_t, kModulusBytes>;

struct PublicKey {
    Modulus modulus{};  // big-endian
    std::uint32_t exponent = kPublicExponent;

    bool operator==(const PublicKey&) const = default;
};

// RSASSA-PKCS1-v1_5 keypair with CRT parameters. Signing is deterministic.
class KeyPair {
  public:
    KeyPair(const KeyPair&);
    KeyPair& operator=(const KeyPair&);
    KeyPair(KeyPair&&) noexcept;
    KeyPair& operator=(KeyPair&&) noexcept;
    ~KeyPair();

    // Prime search driven by the process RNG (reproducible under SINCLAVE_SEED).
    static KeyPair generate();
    // Prime search driven by the given deterministic stream.
    static KeyPair generate(Drbg& rng);

    PublicKey public_key() const;
    const Modulus& modulus() const { return modulus_; }

    Signature sign_digest(const hash::Digest& digest) const;

    // PKCS#1 RSAPrivateKey, PEM armored.
    std::string to_pem() const;
    static KeyPair from_pem(std::string_view pem);

  private:
    struct Impl;
    KeyPair();
    std::unique_ptr<Impl> impl_;
    Modulus modulus_{};
};

bool verify_digest(const PublicKey& pub, const hash::Digest& digest, const Signature& sig);

}  // namespace singlet::rsa
