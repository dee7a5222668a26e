#include "singlet/attestation.hpp"

#include <cstring>

#include <json.hpp>

#include "singlet/error.hpp"
#include "singlet/rng.hpp"

namespace singlet::attest {

hash::Digest hmac_sha256(const MacKey& key, std::span<const std::uint8_t> message) {
    std::array<std::uint8_t, 64> block{};
    std::memcpy(block.data(), key.data(), key.size());

    std::array<std::uint8_t, 64> ipad, opad;
    for (std::size_t i = 0; i < 64; ++i) {
        ipad[i] = block[i] ^ 0x36;
        opad[i] = block[i] ^ 0x5c;
    }

    hash::Sha256 inner;
    inner.update(ipad);
    inner.update(message);
    auto inner_digest = inner.finalize();

    hash::Sha256 outer;
    outer.update(opad);
    outer.update(inner_digest);
    return outer.finalize();
}

std::array<std::uint8_t, Report::kCanonicalSize> Report::canonical_bytes() const {
    std::array<std::uint8_t, kCanonicalSize> out{};
    std::uint8_t* p = out.data();
    std::memcpy(p, mrenclave.data(), 32);
    p += 32;
    std::memcpy(p, mrsigner.data(), 32);
    p += 32;
    std::memcpy(p, attributes.data(), 16);
    p += 16;
    put_u16_be(p, isvprodid);
    p += 2;
    put_u16_be(p, isvsvn);
    p += 2;
    std::memcpy(p, reportdata.data(), 64);
    return out;
}

Bytes Report::to_bytes() const {
    auto canonical = canonical_bytes();
    Bytes out(kWireSize);
    std::memcpy(out.data(), canonical.data(), kCanonicalSize);
    std::memcpy(out.data() + kCanonicalSize, mac.data(), mac.size());
    return out;
}

Report Report::from_bytes(std::span<const std::uint8_t> raw) {
    if (raw.size() != kWireSize) throw Error(Err::Protocol, "report: wrong size");
    Report r;
    const std::uint8_t* p = raw.data();
    std::memcpy(r.mrenclave.data(), p, 32);
    p += 32;
    std::memcpy(r.mrsigner.data(), p, 32);
    p += 32;
    std::memcpy(r.attributes.data(), p, 16);
    p += 16;
    r.isvprodid = get_u16_be(p);
    p += 2;
    r.isvsvn = get_u16_be(p);
    p += 2;
    std::memcpy(r.reportdata.data(), p, 64);
    p += 64;
    std::memcpy(r.mac.data(), p, 32);
    return r;
}

Bytes Quote::to_bytes() const {
    Bytes out(kWireSize);
    auto rep = report.to_bytes();
    std::memcpy(out.data(), rep.data(), Report::kWireSize);
    std::memcpy(out.data() + Report::kWireSize, nonce.data(), nonce.size());
    std::memcpy(out.data() + Report::kWireSize + 32, signature.data(), signature.size());
    return out;
}

Quote Quote::from_bytes(std::span<const std::uint8_t> raw) {
    if (raw.size() != kWireSize) throw Error(Err::Protocol, "quote: wrong size");
    Quote q;
    q.report = Report::from_bytes(raw.first(Report::kWireSize));
    std::memcpy(q.nonce.data(), raw.data() + Report::kWireSize, 32);
    std::memcpy(q.signature.data(), raw.data() + Report::kWireSize + 32, rsa::kModulusBytes);
    return q;
}

PlatformKeys PlatformKeys::generate(std::string platform_id) {
    PlatformKeys keys{.report_mac_key = {}, .quoting_key = rsa::KeyPair::generate(),
                      .platform_id = std::move(platform_id)};
    global_rng_fill(keys.report_mac_key);
    return keys;
}

std::string PlatformKeys::to_json() const {
    nlohmann::json j;
    j["platform_id"] = platform_id;
    j["report_mac_key_hex"] = to_hex(report_mac_key);
    j["quoting_key_pem"] = quoting_key.to_pem();
    return j.dump(2);
}

PlatformKeys PlatformKeys::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        PlatformKeys keys{
            .report_mac_key = array_from_hex<32>(j.at("report_mac_key_hex").get<std::string>()),
            .quoting_key = rsa::KeyPair::from_pem(j.at("quoting_key_pem").get<std::string>()),
            .platform_id = j.at("platform_id").get<std::string>()};
        return keys;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::Protocol, std::string("platform keys: ") + e.what());
    }
}

Report create_report(const PlatformKeys& platform, const enclave::InitializedEnclave& e,
                     const ReportData& reportdata) {
    Report r;
    r.mrenclave = e.mrenclave;
    r.mrsigner = e.mrsigner;
    r.attributes = e.attributes;
    r.isvprodid = e.isvprodid;
    r.isvsvn = e.isvsvn;
    r.reportdata = reportdata;
    r.mac = hmac_sha256(platform.report_mac_key, r.canonical_bytes());
    return r;
}

Quote create_quote(const PlatformKeys& platform, const Report& report, const Nonce& nonce) {
    auto expected_mac = hmac_sha256(platform.report_mac_key, report.canonical_bytes());
    if (expected_mac != report.mac)
        throw Error(Err::BadReportMac, "quote: report MAC does not verify on this platform");

    Quote q;
    q.report = report;
    q.nonce = nonce;

    hash::Sha256 s;
    s.update(report.canonical_bytes());
    s.update(nonce);
    q.signature = platform.quoting_key.sign_digest(s.finalize());
    return q;
}

Report verify_quote(const Quote& quote, const rsa::PublicKey& platform_pub,
                    const Nonce& expected_nonce) {
    hash::Sha256 s;
    s.update(quote.report.canonical_bytes());
    s.update(quote.nonce);
    if (!rsa::verify_digest(platform_pub, s.finalize(), quote.signature))
        throw Error(Err::QuoteSigInvalid, "quote: platform signature invalid");
    if (quote.nonce != expected_nonce)
        throw Error(Err::NonceMismatch, "quote: nonce does not match this session");
    return quote.report;
}

ReportData bind_channel(std::span<const std::uint8_t> channel_pub) {
    ReportData out{};
    auto digest = hash::Sha256::digest_of(channel_pub);
    std::memcpy(out.data(), digest.data(), digest.size());
    return out;
}

ChannelKeyPair ChannelKeyPair::generate() {
    ChannelKeyPair kp;
    global_rng_fill(kp.private_part);
    kp.public_part = hash::Sha256::digest_of(kp.private_part);
    return kp;
}

}  // namespace singlet::attest
