#include "singlet/sigstruct.hpp"

#include <cstring>

#include "singlet/error.hpp"

namespace singlet::sig {

hash::Digest mrsigner_of_modulus(const rsa::Modulus& modulus) {
    return hash::Sha256::digest_of(modulus);
}

std::array<std::uint8_t, SigStruct::kSignedSize> SigStruct::canonical_bytes() const {
    std::array<std::uint8_t, kSignedSize> out{};
    std::uint8_t* p = out.data();
    std::memcpy(p, kHeader.data(), 8);
    p += 8;
    put_u64_be(p, date);
    p += 8;
    std::memcpy(p, attributes.data(), 16);
    p += 16;
    std::memcpy(p, attribute_mask.data(), 16);
    p += 16;
    std::memcpy(p, mrenclave.data(), 32);
    p += 32;
    put_u16_be(p, isvprodid);
    p += 2;
    put_u16_be(p, isvsvn);
    p += 2;
    std::memcpy(p, modulus.data(), rsa::kModulusBytes);
    p += rsa::kModulusBytes;
    put_u32_be(p, exponent);
    p += 4;
    return out;
}

Bytes SigStruct::to_bytes() const {
    auto canonical = canonical_bytes();
    Bytes out(kWireSize);
    std::memcpy(out.data(), canonical.data(), kSignedSize);
    std::memcpy(out.data() + kSignedSize, signature.data(), rsa::kModulusBytes);
    return out;
}

SigStruct SigStruct::from_bytes(std::span<const std::uint8_t> raw) {
    if (raw.size() != kWireSize) throw Error(Err::SigInvalid, "sigstruct: wrong size");
    if (std::memcmp(raw.data(), kHeader.data(), 8) != 0)
        throw Error(Err::SigInvalid, "sigstruct: bad header");

    SigStruct ss;
    const std::uint8_t* p = raw.data() + 8;
    ss.date = get_u64_be(p);
    p += 8;
    std::memcpy(ss.attributes.data(), p, 16);
    p += 16;
    std::memcpy(ss.attribute_mask.data(), p, 16);
    p += 16;
    std::memcpy(ss.mrenclave.data(), p, 32);
    p += 32;
    ss.isvprodid = get_u16_be(p);
    p += 2;
    ss.isvsvn = get_u16_be(p);
    p += 2;
    std::memcpy(ss.modulus.data(), p, rsa::kModulusBytes);
    p += rsa::kModulusBytes;
    ss.exponent = get_u32_be(p);
    p += 4;
    std::memcpy(ss.signature.data(), p, rsa::kModulusBytes);
    return ss;
}

SigStruct sign_sigstruct(const rsa::KeyPair& key, const SigStructFields& fields) {
    SigStruct ss;
    ss.date = fields.date;
    ss.attributes = fields.attributes;
    ss.attribute_mask = fields.attribute_mask;
    ss.mrenclave = fields.mrenclave;
    ss.isvprodid = fields.isvprodid;
    ss.isvsvn = fields.isvsvn;
    ss.modulus = key.modulus();
    ss.exponent = rsa::kPublicExponent;
    ss.signature = key.sign_digest(hash::Sha256::digest_of(ss.canonical_bytes()));
    return ss;
}

hash::Digest verify_sigstruct(const SigStruct& ss) {
    rsa::PublicKey pub{ss.modulus, ss.exponent};
    auto digest = hash::Sha256::digest_of(ss.canonical_bytes());
    if (!rsa::verify_digest(pub, digest, ss.signature))
        throw Error(Err::SigInvalid, "sigstruct: signature verification failed");
    return mrsigner_of_modulus(ss.modulus);
}

SigStruct derive_singleton_sigstruct(const SigStruct& common, const hash::Digest& singleton_mrenclave,
                                     const rsa::KeyPair& key) {
    verify_sigstruct(common);
    if (key.modulus() != common.modulus)
        throw Error(Err::KeyMismatch, "sigstruct: signer key does not match common SIGSTRUCT");

    SigStruct derived = common;
    derived.mrenclave = singleton_mrenclave;
    derived.signature = key.sign_digest(hash::Sha256::digest_of(derived.canonical_bytes()));
    return derived;
}

}  // namespace singlet::sig
