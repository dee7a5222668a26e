#pragma once

// Deterministic end-to-end fixture shared by the protocol-level suites: one
// signer, one platform, a two-page blueprint and the matching common
// SIGSTRUCT. Key material is generated once per process.

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "singlet/attestation.hpp"
#include "singlet/enclave.hpp"
#include "singlet/rng.hpp"
#include "singlet/sigstruct.hpp"
#include "singlet/verifier.hpp"

namespace testkit {

using namespace singlet;

class Fixture {
  public:
    static const rsa::KeyPair& signer_key() {
        static rsa::KeyPair key = [] {
            Drbg rng("fixture signer key");
            return rsa::KeyPair::generate(rng);
        }();
        return key;
    }

    static const attest::PlatformKeys& platform() {
        static attest::PlatformKeys keys = [] {
            Drbg rng("fixture platform");
            attest::PlatformKeys k{.report_mac_key = {},
                                   .quoting_key = rsa::KeyPair::generate(rng),
                                   .platform_id = "fixture-platform"};
            rng.fill(k.report_mac_key);
            return k;
        }();
        return keys;
    }

    static const enclave::EnclaveBlueprint& blueprint() {
        static enclave::EnclaveBlueprint bp = [] {
            Drbg rng("fixture blueprint");
            enclave::EnclaveBlueprint out;
            out.enclave_size = 16384;  // 4 slots, top one free for the instance page
            out.attributes[0] = 0x02;
            for (std::uint64_t slot : {0, 1}) {
                enclave::EnclaveBlueprint::Page page;
                page.offset = slot * enclave::kPageSize;
                page.secinfo = slot == 0 ? enclave::PageSecInfo::reg_rx()
                                         : enclave::PageSecInfo::reg_rw();
                rng.fill(page.content);
                out.pages.push_back(page);
            }
            return out;
        }();
        return bp;
    }

    static std::uint64_t page_offset() {
        return enclave::instance_page_offset(blueprint().enclave_size);
    }

    static hash::BaseHash base_hash() { return enclave::base_hash_of(blueprint()); }

    static sig::SigStruct common_sigstruct() {
        static sig::SigStruct ss = [] {
            sig::SigStructFields f;
            f.date = 1700000000;
            f.attributes = blueprint().attributes;
            f.attribute_mask.fill(0xff);
            f.mrenclave = enclave::extend_with_instance_page(
                base_hash(), enclave::InstancePage::common(), page_offset());
            f.isvprodid = 1;
            f.isvsvn = 1;
            return sig::sign_sigstruct(signer_key(), f);
        }();
        return ss;
    }

    static verifier::SecretsBundle secrets() {
        verifier::SecretsBundle s;
        s.entries = {{"ARG0", "--serve"},
                     {"ENV_API_KEY", "k-3f1c9a"},
                     {"FSKEY", "a1b2c3d4e5f60718293a4b5c6d7e8f90"}};
        return s;
    }

    static verifier::Policy policy(verifier::PolicyMode mode, std::string name = "demo") {
        verifier::Policy p;
        p.name = std::move(name);
        p.mode = mode;
        p.base_hash = base_hash();
        p.common_sigstruct = common_sigstruct();
        p.expected_mrsigner = sig::mrsigner_of_modulus(signer_key().modulus());
        p.expected_attributes = blueprint().attributes;
        p.attribute_mask.fill(0xff);
        p.instance_page_offset = page_offset();
        p.secrets = secrets();
        return p;
    }

    static std::string journal_path() {
        static std::atomic<int> counter{0};
        auto path = std::filesystem::temp_directory_path() /
                    ("singlet-journal-" + std::to_string(::getpid()) + "-" +
                     std::to_string(counter++) + ".bin");
        std::filesystem::remove(path);
        return path.string();
    }

    static enclave::InitializedEnclave build_with_page(const enclave::InstancePage& page,
                                                       const sig::SigStruct& ss) {
        auto bp = enclave::append_instance_page(blueprint(), page, page_offset());
        auto [log, mrenclave] = enclave::build_and_measure(bp);
        return enclave::einit(mrenclave, bp.attributes, ss, page);
    }

    static enclave::InitializedEnclave build_common() {
        return build_with_page(enclave::InstancePage::common(), common_sigstruct());
    }

    static enclave::InitializedEnclave build_singleton(const verifier::IssuedMaterial& issued) {
        return build_with_page(issued.page, issued.sigstruct);
    }

    // Singleton enclave individualized outside any verifier.
    static enclave::InitializedEnclave make_offline_singleton(std::uint8_t token_fill) {
        std::array<std::uint8_t, 32> token;
        token.fill(token_fill);
        auto page =
            enclave::InstancePage::issue(token, sig::mrsigner_of_modulus(signer_key().modulus()));
        auto mr = enclave::extend_with_instance_page(base_hash(), page, page_offset());
        auto ss = sig::derive_singleton_sigstruct(common_sigstruct(), mr, signer_key());
        return build_with_page(page, ss);
    }

    static attest::Quote quote_for(const enclave::InitializedEnclave& e,
                                   const attest::ChannelKeyPair& channel,
                                   const attest::Nonce& nonce) {
        auto reportdata = attest::bind_channel(channel.public_part);
        auto report = attest::create_report(platform(), e, reportdata);
        return attest::create_quote(platform(), report, nonce);
    }
};

}  // namespace testkit
