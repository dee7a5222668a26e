#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "singlet/bytes.hpp"
#include "singlet/enclave.hpp"
#include "singlet/rsa3072.hpp"
#include "singlet/sha256.hpp"

namespace singlet::attest {

using MacKey = std::array<std::uint8_t, 32>;
using Mac = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 32>;
using ReportData = std::array<std::uint8_t, 64>;

hash::Digest hmac_sha256(const MacKey& key, std::span<const std::uint8_t> message);

/// Locally verifiable evidence of an enclave's initialization-time identity.
struct Report {
    static constexpr std::size_t kCanonicalSize = 148;
    static constexpr std::size_t kWireSize = kCanonicalSize + 32;

    hash::Digest mrenclave{};
    hash::Digest mrsigner{};
    sig::Attributes attributes{};
    std::uint16_t isvprodid = 0;
    std::uint16_t isvsvn = 0;
    ReportData reportdata{};
    Mac mac{};

    // mrenclave || mrsigner || attributes || isvprodid || isvsvn || reportdata
    std::array<std::uint8_t, kCanonicalSize> canonical_bytes() const;
    Bytes to_bytes() const;
    static Report from_bytes(std::span<const std::uint8_t> raw);

    bool operator==(const Report&) const = default;
};

/// Report countersigned by the platform quoting key over a verifier nonce.
struct Quote {
    static constexpr std::size_t kWireSize = Report::kWireSize + 32 + rsa::kModulusBytes;

    Report report;
    Nonce nonce{};
    rsa::Signature signature{};

    Bytes to_bytes() const;
    static Quote from_bytes(std::span<const std::uint8_t> raw);

    bool operator==(const Quote&) const = default;
};

/// Hardware-held key material of one platform: the report MAC key and the
/// quoting keypair. The quoting public key reaches verifiers out of band.
struct PlatformKeys {
    MacKey report_mac_key{};
    rsa::KeyPair quoting_key;
    std::string platform_id;

    static PlatformKeys generate(std::string platform_id);
    rsa::PublicKey quoting_public() const { return quoting_key.public_key(); }

    std::string to_json() const;
    static PlatformKeys from_json(const std::string& text);
};

Report create_report(const PlatformKeys& platform, const enclave::InitializedEnclave& e,
                     const ReportData& reportdata);

// Err::BadReportMac models the quoting enclave's local attestation check.
Quote create_quote(const PlatformKeys& platform, const Report& report, const Nonce& nonce);

// Err::QuoteSigInvalid, Err::NonceMismatch.
Report verify_quote(const Quote& quote, const rsa::PublicKey& platform_pub,
                    const Nonce& expected_nonce);

// reportdata[0..32) = SHA-256(channel_pub), rest zero.
ReportData bind_channel(std::span<const std::uint8_t> channel_pub);

/// Ephemeral secure-channel endpoint key. Stands in for the TLS/wireguard
/// keys whose digest the protocol binds into reportdata.
struct ChannelKeyPair {
    std::array<std::uint8_t, 32> private_part{};
    std::array<std::uint8_t, 32> public_part{};

    static ChannelKeyPair generate();
};

}  // namespace singlet::attest
