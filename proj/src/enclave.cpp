#include "singlet/enclave.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "singlet/error.hpp"

namespace singlet::enclave {

namespace {

constexpr std::uint8_t kEcreateTag[8] = {'E', 'C', 'R', 'E', 'A', 'T', 'E', 0};
constexpr std::uint8_t kEaddTag[8] = {'E', 'A', 'D', 'D', 0, 0, 0, 0};
constexpr std::uint8_t kEextendTag[8] = {'E', 'E', 'X', 'T', 'E', 'N', 'D', 0};

void check_page_offset(std::uint64_t offset, std::uint64_t enclave_size) {
    if (offset % kPageSize != 0)
        throw Error(Err::MisalignedOffset, "eadd: offset not page-aligned");
    if (offset >= enclave_size)
        throw Error(Err::MisalignedOffset, "eadd: offset beyond enclave size");
}

}  // namespace

void MeasurementLog::append(const Record& rec) {
    records.push_back(rec);
    running.update(rec);
}

void EnclaveBlueprint::validate() const {
    if (enclave_size < 2 * kPageSize || !std::has_single_bit(enclave_size))
        throw Error(Err::InvalidBlueprint, "blueprint: enclave_size must be a power of two >= 8192");
    std::uint64_t prev = 0;
    bool first = true;
    for (const auto& page : pages) {
        if (page.offset % kPageSize != 0)
            throw Error(Err::InvalidBlueprint, "blueprint: page offset not 4096-aligned");
        if (page.offset >= enclave_size)
            throw Error(Err::InvalidBlueprint, "blueprint: page offset beyond enclave size");
        if (!first && page.offset <= prev)
            throw Error(Err::InvalidBlueprint, "blueprint: page offsets must be strictly increasing");
        if (page.measured_bytes == 0 || page.measured_bytes > kPageSize ||
            page.measured_bytes % kExtendChunk != 0)
            throw Error(Err::InvalidBlueprint, "blueprint: measured_bytes must be a multiple of 256");
        prev = page.offset;
        first = false;
    }
}

MeasurementLog measure_ecreate(std::uint64_t enclave_size, const sig::Attributes& attributes) {
    (void)attributes;  // retained on the SECS, checked at EINIT, never hashed
    if (enclave_size < 2 * kPageSize || !std::has_single_bit(enclave_size))
        throw Error(Err::InvalidBlueprint, "ecreate: enclave_size must be a power of two >= 8192");

    MeasurementLog log;
    log.enclave_size = enclave_size;
    Record rec{};
    std::memcpy(rec.data(), kEcreateTag, 8);
    put_u64_be(rec.data() + 8, enclave_size);
    log.append(rec);
    return log;
}

void measure_eadd(MeasurementLog& log, std::uint64_t offset, PageSecInfo secinfo) {
    check_page_offset(offset, log.enclave_size);
    Record rec{};
    std::memcpy(rec.data(), kEaddTag, 8);
    put_u64_be(rec.data() + 8, offset);
    put_u64_be(rec.data() + 16, secinfo.flags);
    log.append(rec);
}

void measure_eextend(MeasurementLog& log, std::uint64_t offset, std::span<const std::uint8_t> chunk) {
    if (chunk.size() != kExtendChunk)
        throw Error(Err::BadChunkLength, "eextend: chunk must be 256 bytes");
    if (offset % kExtendChunk != 0)
        throw Error(Err::MisalignedOffset, "eextend: offset not 256-aligned");

    Record header{};
    std::memcpy(header.data(), kEextendTag, 8);
    put_u64_be(header.data() + 8, offset);
    log.append(header);
    for (std::size_t i = 0; i < kExtendChunk; i += kRecordSize) {
        Record rec;
        std::memcpy(rec.data(), chunk.data() + i, kRecordSize);
        log.append(rec);
    }
}

namespace {

void measure_page(MeasurementLog& log, const EnclaveBlueprint::Page& page) {
    measure_eadd(log, page.offset, page.secinfo);
    for (std::uint32_t off = 0; off < page.measured_bytes; off += kExtendChunk)
        measure_eextend(log, page.offset + off,
                        std::span(page.content.data() + off, kExtendChunk));
}

MeasurementLog measure_blueprint(const EnclaveBlueprint& bp) {
    bp.validate();
    MeasurementLog log = measure_ecreate(bp.enclave_size, bp.attributes);
    for (const auto& page : bp.pages) measure_page(log, page);
    return log;
}

}  // namespace

MeasureResult build_and_measure(const EnclaveBlueprint& bp) {
    MeasurementLog log = measure_blueprint(bp);
    hash::Digest mrenclave = log.running.finalize();
    return {std::move(log), mrenclave};
}

hash::BaseHash base_hash_of(const EnclaveBlueprint& bp) {
    return measure_blueprint(bp).running.export_base();
}

std::uint64_t instance_page_offset(std::uint64_t enclave_size) { return enclave_size - kPageSize; }

hash::Digest extend_with_instance_page(const hash::BaseHash& base, const InstancePage& page,
                                       std::uint64_t page_offset) {
    page.validate();
    if (page_offset % kPageSize != 0)
        throw Error(Err::MisalignedOffset, "instance page: offset not page-aligned");

    MeasurementLog log;
    log.running = hash::Sha256::resume(base);
    log.enclave_size = page_offset + kPageSize;  // offset known in range by construction
    measure_eadd(log, page_offset, PageSecInfo::reg_rw());
    auto measured = page.measured();
    for (std::size_t off = 0; off < InstancePage::kMeasuredLen; off += kExtendChunk)
        measure_eextend(log, page_offset + off, std::span(measured.data() + off, kExtendChunk));
    return log.running.finalize();
}

EnclaveBlueprint append_instance_page(EnclaveBlueprint bp, const InstancePage& page,
                                      std::uint64_t offset) {
    EnclaveBlueprint::Page entry;
    entry.offset = offset;
    entry.secinfo = PageSecInfo::reg_rw();
    entry.content = page.bytes;
    entry.measured_bytes = InstancePage::kMeasuredLen;
    bp.pages.push_back(entry);
    return bp;
}

// --- instance page ----------------------------------------------------------

InstancePage InstancePage::issue(const std::array<std::uint8_t, 32>& token,
                                 const hash::Digest& verifier_identity) {
    InstancePage page;
    std::memcpy(page.bytes.data(), token.data(), 32);
    std::memcpy(page.bytes.data() + 32, verifier_identity.data(), 32);
    put_u32_be(page.bytes.data() + 64, kProtocolVersion);
    return page;
}

InstancePage InstancePage::from_measured(std::span<const std::uint8_t> measured) {
    if (measured.size() != kMeasuredLen)
        throw Error(Err::InvalidPage, "instance page: measured region must be 1024 bytes");
    InstancePage page;
    std::memcpy(page.bytes.data(), measured.data(), kMeasuredLen);
    page.validate();
    return page;
}

std::array<std::uint8_t, 32> InstancePage::token() const {
    std::array<std::uint8_t, 32> out;
    std::memcpy(out.data(), bytes.data(), 32);
    return out;
}

hash::Digest InstancePage::verifier_identity() const {
    hash::Digest out;
    std::memcpy(out.data(), bytes.data() + 32, 32);
    return out;
}

std::uint32_t InstancePage::protocol_version() const { return get_u32_be(bytes.data() + 64); }

bool InstancePage::is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::array<std::uint8_t, InstancePage::kMeasuredLen> InstancePage::measured() const {
    std::array<std::uint8_t, kMeasuredLen> out;
    std::memcpy(out.data(), bytes.data(), kMeasuredLen);
    return out;
}

void InstancePage::validate() const {
    // Either the zeroed common form or an issued page: version set, padding
    // of the measured region clear. The unmeasured tail is unconstrained.
    for (std::size_t i = 68; i < kMeasuredLen; ++i)
        if (bytes[i] != 0) throw Error(Err::InvalidPage, "instance page: measured padding not zero");
    std::uint32_t version = protocol_version();
    if (version != 0 && version != kProtocolVersion)
        throw Error(Err::InvalidPage, "instance page: unsupported protocol version");
    if (version == 0) {
        for (std::size_t i = 0; i < 68; ++i)
            if (bytes[i] != 0) throw Error(Err::InvalidPage, "instance page: common page must be zero");
    }
}

// --- einit -------------------------------------------------------------------

InitializedEnclave einit(const hash::Digest& mrenclave, const sig::Attributes& enclave_attributes,
                         const sig::SigStruct& ss, const InstancePage& page, const EinitToken& token) {
    hash::Digest mrsigner = sig::verify_sigstruct(ss);  // Err::SigInvalid

    if (ss.mrenclave != mrenclave)
        throw Error(Err::MrenclaveMismatch, "einit: SIGSTRUCT measurement does not match enclave");

    for (std::size_t i = 0; i < enclave_attributes.size(); ++i) {
        std::uint8_t mask = ss.attribute_mask[i];
        if ((enclave_attributes[i] & mask) != (ss.attributes[i] & mask))
            throw Error(Err::AttributeMismatch, "einit: attributes do not match SIGSTRUCT");
    }

    if (!token.permit_all)
        throw Error(Err::Protocol, "einit: launch denied");  // unreachable with FLC defaults

    InitializedEnclave out;
    out.mrenclave = mrenclave;
    out.mrsigner = mrsigner;
    out.attributes = enclave_attributes;
    out.isvprodid = ss.isvprodid;
    out.isvsvn = ss.isvsvn;
    out.instance_page = page;
    return out;
}

// --- blueprint manifest -------------------------------------------------------

namespace {

std::uint64_t parse_flags(const nlohmann::json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        return std::stoull(s, nullptr, 0);  // accepts 0x-prefixed
    }
    throw Error(Err::InvalidBlueprint, "blueprint: secinfo must be a number or string");
}

}  // namespace

std::string EnclaveBlueprint::to_json() const {
    nlohmann::json j;
    j["enclave_size"] = enclave_size;
    j["attributes"] = to_hex(attributes);
    j["pages"] = nlohmann::json::array();
    for (const auto& page : pages) {
        nlohmann::json p;
        p["offset"] = page.offset;
        p["secinfo"] = page.secinfo.flags;
        p["content_hex"] = to_hex(page.content);
        if (page.measured_bytes != kPageSize) p["measured_bytes"] = page.measured_bytes;
        j["pages"].push_back(std::move(p));
    }
    return j.dump(2);
}

EnclaveBlueprint EnclaveBlueprint::from_json(const std::string& text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::InvalidBlueprint, std::string("blueprint: ") + e.what());
    }

    EnclaveBlueprint bp;
    try {
        bp.enclave_size = j.at("enclave_size").get<std::uint64_t>();
        bp.attributes = array_from_hex<16>(j.at("attributes").get<std::string>());
        for (const auto& p : j.at("pages")) {
            Page page;
            page.offset = p.at("offset").get<std::uint64_t>();
            page.secinfo.flags = parse_flags(p.at("secinfo"));
            if (p.contains("measured_bytes"))
                page.measured_bytes = p.at("measured_bytes").get<std::uint32_t>();

            Bytes content;
            if (p.contains("content_hex")) {
                content = from_hex(p.at("content_hex").get<std::string>());
            } else if (p.contains("content_file")) {
                auto path = std::filesystem::path(base_dir) / p.at("content_file").get<std::string>();
                std::ifstream in(path, std::ios::binary);
                if (!in) throw Error(Err::InvalidBlueprint, "blueprint: cannot read " + path.string());
                content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
            } else {
                throw Error(Err::InvalidBlueprint, "blueprint: page needs content_hex or content_file");
            }
            if (content.size() > kPageSize)
                throw Error(Err::InvalidBlueprint, "blueprint: page content exceeds 4096 bytes");
            std::copy(content.begin(), content.end(), page.content.begin());
            bp.pages.push_back(page);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::InvalidBlueprint, std::string("blueprint: ") + e.what());
    }
    bp.validate();
    return bp;
}

}  // namespace singlet::enclave
