#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singlet/bytes.hpp"
#include "singlet/sha256.hpp"
#include "singlet/sigstruct.hpp"

namespace singlet::enclave {

constexpr std::uint64_t kPageSize = 4096;
constexpr std::size_t kRecordSize = 64;
constexpr std::size_t kExtendChunk = 256;

using PageContent = std::array<std::uint8_t, kPageSize>;
using Record = std::array<std::uint8_t, kRecordSize>;

struct PageSecInfo {
    // bits 0-2: R/W/X, bits 8-15: page type (0x01 REG, 0x02 TCS)
    std::uint64_t flags = 0;

    static constexpr std::uint64_t kRead = 1u << 0;
    static constexpr std::uint64_t kWrite = 1u << 1;
    static constexpr std::uint64_t kExecute = 1u << 2;
    static constexpr std::uint64_t kTypeReg = 0x01ull << 8;
    static constexpr std::uint64_t kTypeTcs = 0x02ull << 8;

    static PageSecInfo reg_rw() { return {kTypeReg | kRead | kWrite}; }
    static PageSecInfo reg_rx() { return {kTypeReg | kRead | kExecute}; }

    bool operator==(const PageSecInfo&) const = default;
};

struct EnclaveBlueprint {
    struct Page {
        std::uint64_t offset = 0;
        PageSecInfo secinfo;
        PageContent content{};
        // Leading bytes covered by the measurement; multiple of 256.
        std::uint32_t measured_bytes = kPageSize;
    };

    std::uint64_t enclave_size = 0;  // power of two >= 8192
    sig::Attributes attributes{};
    std::vector<Page> pages;

    void validate() const;  // Err::InvalidBlueprint

    std::string to_json() const;
    // `base_dir` resolves relative content_file entries.
    static EnclaveBlueprint from_json(const std::string& text, const std::string& base_dir = ".");
};

/// Ordered 64-byte measurement records and the running hash over them.
struct MeasurementLog {
    std::vector<Record> records;
    hash::Sha256 running;
    std::uint64_t enclave_size = 0;

    void append(const Record& rec);
};

/// Verifier-issued page that individualizes an enclave. Only the first
/// kMeasuredLen bytes enter the measurement.
struct InstancePage {
    static constexpr std::size_t kMeasuredLen = 1024;
    static constexpr std::uint32_t kProtocolVersion = 1;

    PageContent bytes{};

    static InstancePage common() { return InstancePage{}; }  // all zeros
    static InstancePage issue(const std::array<std::uint8_t, 32>& token,
                              const hash::Digest& verifier_identity);
    static InstancePage from_measured(std::span<const std::uint8_t> measured);  // zero tail

    std::array<std::uint8_t, 32> token() const;
    hash::Digest verifier_identity() const;
    std::uint32_t protocol_version() const;
    bool is_zero() const;

    std::array<std::uint8_t, kMeasuredLen> measured() const;
    void validate() const;  // Err::InvalidPage: layout of the measured region

    bool operator==(const InstancePage&) const = default;
};

struct EinitToken {
    bool permit_all = true;
};

struct InitializedEnclave {
    hash::Digest mrenclave{};
    hash::Digest mrsigner{};
    sig::Attributes attributes{};
    std::uint16_t isvprodid = 0;
    std::uint16_t isvsvn = 0;
    InstancePage instance_page;
    // Set after attestation; never part of the measured identity.
    std::optional<std::string> runtime_config;
};

// --- measurement operations ------------------------------------------------

MeasurementLog measure_ecreate(std::uint64_t enclave_size, const sig::Attributes& attributes);
void measure_eadd(MeasurementLog& log, std::uint64_t offset, PageSecInfo secinfo);
void measure_eextend(MeasurementLog& log, std::uint64_t offset,
                     std::span<const std::uint8_t> chunk /* 256 bytes */);

struct MeasureResult {
    MeasurementLog log;
    hash::Digest mrenclave;
};

MeasureResult build_and_measure(const EnclaveBlueprint& bp);

// Running state after all blueprint pages, before finalization.
hash::BaseHash base_hash_of(const EnclaveBlueprint& bp);

// Resumes the base hash, measures one EADD plus four EEXTENDs for the page's
// measured region at `page_offset`, finalizes.
hash::Digest extend_with_instance_page(const hash::BaseHash& base, const InstancePage& page,
                                       std::uint64_t page_offset);

// Instance pages go into the highest page slot of the enclave.
std::uint64_t instance_page_offset(std::uint64_t enclave_size);

// Blueprint with `page` appended as a final page at `offset`, measured region
// only. One-shot equivalent of extend_with_instance_page.
EnclaveBlueprint append_instance_page(EnclaveBlueprint bp, const InstancePage& page,
                                      std::uint64_t offset);

InitializedEnclave einit(const hash::Digest& mrenclave, const sig::Attributes& enclave_attributes,
                         const sig::SigStruct& ss, const InstancePage& page,
                         const EinitToken& token = {});

}  // namespace singlet::enclave
