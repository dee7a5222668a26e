#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "singlet/attestation.hpp"
#include "singlet/enclave.hpp"
#include "singlet/sigstruct.hpp"

namespace singlet::verifier {

using Token = std::array<std::uint8_t, 32>;

struct SecretsBundle {
    std::map<std::string, std::string> entries;

    bool operator==(const SecretsBundle&) const = default;
};

enum class PolicyMode { Naive, Singleton };

struct Policy {
    std::string name;
    PolicyMode mode = PolicyMode::Singleton;
    hash::BaseHash base_hash;
    sig::SigStruct common_sigstruct;
    hash::Digest expected_mrsigner{};
    sig::Attributes expected_attributes{};
    sig::Attributes attribute_mask{};
    std::uint64_t instance_page_offset = 0;
    SecretsBundle secrets;

    std::string to_json(const rsa::KeyPair& signer_key) const;
    static std::pair<Policy, rsa::KeyPair> from_json(const std::string& text);
};

struct TokenRecord {
    enum class State { Issued, Consumed };

    Token token{};
    std::string policy_name;
    hash::Digest expected_mrenclave{};
    sig::SigStruct issued_sigstruct;
    State state = State::Issued;
    std::uint64_t issued_at = 0;  // unix seconds
};

struct IssuedMaterial {
    Token token{};
    enclave::InstancePage page;
    sig::SigStruct sigstruct;
    hash::Digest verifier_identity{};
};

/// The trusted verifier: policy store, token issuance and exactly-once
/// attestation. The token registry is the only cross-session mutable state;
/// consumption is an atomic issued-to-consumed transition backed by an
/// append-only journal.
class Verifier {
  public:
    struct Options {
        std::string journal_path;  // empty: in-memory registry only
        std::vector<rsa::PublicKey> trusted_platforms;
    };

    explicit Verifier(Options opts);
    ~Verifier();

    Verifier(const Verifier&) = delete;
    Verifier& operator=(const Verifier&) = delete;

    // Err::DuplicateName, Err::PolicyInvalid. The signer key stays inside the
    // verifier; it must match the policy's common SIGSTRUCT.
    void register_policy(Policy policy, rsa::KeyPair signer_key);

    // Re-runs the registration consistency checks. Err::PolicyInvalid.
    void check_policy(const std::string& name) const;

    // Err::UnknownPolicy, Err::SigstructMismatch, Err::Protocol (mode).
    IssuedMaterial issue_singleton(const std::string& policy_name, const sig::SigStruct& presented);

    // Exactly-once secret release. Errors, in check order: QuoteSigInvalid /
    // NonceMismatch, TokenUnknown, TokenUsed, MrenclaveMismatch,
    // SignerMismatch, AttributeMismatch, ChannelBinding.
    SecretsBundle attest_singleton(const attest::Quote& quote, const Token& token,
                                   std::span<const std::uint8_t> channel_pub,
                                   const attest::Nonce& session_nonce);

    // The vulnerable mode: no token, no uniqueness, repeatable at will.
    SecretsBundle attest_naive(const attest::Quote& quote, std::span<const std::uint8_t> channel_pub,
                               const attest::Nonce& session_nonce);

    // Pure recomputation from the policy and token alone.
    hash::Digest expected_mrenclave(const std::string& policy_name, const Token& token) const;

    // Digest of the policy's signer public modulus: the identity embedded in
    // issued instance pages.
    hash::Digest identity_of(const std::string& policy_name) const;

    const std::vector<rsa::PublicKey>& trusted_platforms() const { return trusted_platforms_; }

    // Introspection for tests and tooling.
    std::optional<TokenRecord> find_token(const Token& token) const;
    std::size_t token_count() const;
    std::vector<std::string> policy_names() const;

  private:
    struct Registered {
        Policy policy;
        rsa::KeyPair signer_key;
    };

    const Registered& lookup(const std::string& name) const;
    attest::Report check_quote(const attest::Quote& quote, const attest::Nonce& session_nonce) const;
    void journal_append(const std::string& line);
    void load_journal();

    std::vector<rsa::PublicKey> trusted_platforms_;
    std::string journal_path_;

    mutable std::shared_mutex policies_mu_;
    std::map<std::string, Registered> policies_;

    mutable std::mutex tokens_mu_;
    std::map<Token, TokenRecord> tokens_;
    std::unique_ptr<std::ofstream> journal_;
};

}  // namespace singlet::verifier
