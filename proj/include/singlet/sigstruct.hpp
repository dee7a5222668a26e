#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "singlet/bytes.hpp"
#include "singlet/rsa3072.hpp"
#include "singlet/sha256.hpp"

namespace singlet::sig {

using Attributes = std::array<std::uint8_t, 16>;

// Signer identity: digest of the big-endian public modulus.
hash::Digest mrsigner_of_modulus(const rsa::Modulus& modulus);

/// Signed enclave identity. The first 472 bytes of the wire form are covered
/// by the RSA-3072 PKCS#1 v1.5 signature embedded in the last 384.
struct SigStruct {
    static constexpr std::array<std::uint8_t, 8> kHeader = {'S', 'I', 'N', 'S', 'I', 'G', '0', '1'};
    static constexpr std::size_t kSignedSize = 472;
    static constexpr std::size_t kWireSize = kSignedSize + rsa::kModulusBytes;  // 856

    std::uint64_t date = 0;  // unix seconds
    Attributes attributes{};
    Attributes attribute_mask{};
    hash::Digest mrenclave{};
    std::uint16_t isvprodid = 0;
    std::uint16_t isvsvn = 0;
    rsa::Modulus modulus{};
    std::uint32_t exponent = rsa::kPublicExponent;
    rsa::Signature signature{};

    std::array<std::uint8_t, kSignedSize> canonical_bytes() const;
    Bytes to_bytes() const;
    static SigStruct from_bytes(std::span<const std::uint8_t> raw);  // Err::SigInvalid on parse failure

    bool operator==(const SigStruct&) const = default;
};

struct SigStructFields {
    std::uint64_t date = 0;
    Attributes attributes{};
    Attributes attribute_mask{};
    hash::Digest mrenclave{};
    std::uint16_t isvprodid = 0;
    std::uint16_t isvsvn = 0;
};

SigStruct sign_sigstruct(const rsa::KeyPair& key, const SigStructFields& fields);

// Checks the embedded signature; returns the signer identity.
// Err::SigInvalid on any mismatch.
hash::Digest verify_sigstruct(const SigStruct& ss);

// New SIGSTRUCT identical to `common` except for the measurement and the
// signature. The key must match the embedded modulus.
SigStruct derive_singleton_sigstruct(const SigStruct& common, const hash::Digest& singleton_mrenclave,
                                     const rsa::KeyPair& key);

}  // namespace singlet::sig
