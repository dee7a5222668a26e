#include "singlet/verifier.hpp"

#include <chrono>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "singlet/error.hpp"
#include "singlet/rng.hpp"

namespace singlet::verifier {

namespace {

std::uint64_t now_unix() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

void validate_policy(const Policy& p, const rsa::KeyPair& signer_key) {
    try {
        sig::verify_sigstruct(p.common_sigstruct);
    } catch (const Error&) {
        throw Error(Err::PolicyInvalid, "policy: common SIGSTRUCT does not verify");
    }
    if (signer_key.modulus() != p.common_sigstruct.modulus)
        throw Error(Err::PolicyInvalid, "policy: signer key does not match common SIGSTRUCT");
    if (p.expected_mrsigner != sig::mrsigner_of_modulus(p.common_sigstruct.modulus))
        throw Error(Err::PolicyInvalid, "policy: expected_mrsigner inconsistent");

    hash::Digest common_mr;
    try {
        common_mr = enclave::extend_with_instance_page(p.base_hash, enclave::InstancePage::common(),
                                                       p.instance_page_offset);
    } catch (const Error&) {
        throw Error(Err::PolicyInvalid, "policy: base hash or page offset malformed");
    }
    if (common_mr != p.common_sigstruct.mrenclave)
        throw Error(Err::PolicyInvalid,
                    "policy: common SIGSTRUCT measurement does not match the base enclave hash");
}

}  // namespace

Verifier::Verifier(Options opts)
    : trusted_platforms_(std::move(opts.trusted_platforms)), journal_path_(std::move(opts.journal_path)) {
    if (!journal_path_.empty()) {
        load_journal();
        journal_ = std::make_unique<std::ofstream>(journal_path_,
                                                   std::ios::binary | std::ios::app);
        if (!*journal_) throw Error(Err::Io, "verifier: cannot open journal " + journal_path_);
    }
}

Verifier::~Verifier() = default;

void Verifier::register_policy(Policy policy, rsa::KeyPair signer_key) {
    validate_policy(policy, signer_key);

    std::unique_lock lock(policies_mu_);
    auto [it, inserted] = policies_.try_emplace(
        policy.name, Registered{std::move(policy), std::move(signer_key)});
    if (!inserted) throw Error(Err::DuplicateName, "policy: name already registered");
}

const Verifier::Registered& Verifier::lookup(const std::string& name) const {
    auto it = policies_.find(name);
    if (it == policies_.end()) throw Error(Err::UnknownPolicy, "policy: unknown name " + name);
    return it->second;
}

void Verifier::check_policy(const std::string& name) const {
    std::shared_lock lock(policies_mu_);
    const auto& reg = lookup(name);
    validate_policy(reg.policy, reg.signer_key);
}

hash::Digest Verifier::identity_of(const std::string& policy_name) const {
    std::shared_lock lock(policies_mu_);
    return sig::mrsigner_of_modulus(lookup(policy_name).signer_key.modulus());
}

IssuedMaterial Verifier::issue_singleton(const std::string& policy_name,
                                         const sig::SigStruct& presented) {
    std::shared_lock lock(policies_mu_);
    const auto& reg = lookup(policy_name);
    const Policy& policy = reg.policy;

    if (policy.mode != PolicyMode::Singleton)
        throw Error(Err::Protocol, "issue: policy is not in singleton mode");
    if (presented.to_bytes() != policy.common_sigstruct.to_bytes())
        throw Error(Err::SigstructMismatch, "issue: presented SIGSTRUCT differs from registered one");

    hash::Digest identity = sig::mrsigner_of_modulus(reg.signer_key.modulus());

    IssuedMaterial out;
    {
        std::lock_guard tokens_lock(tokens_mu_);
        do {
            global_rng_fill(out.token);
        } while (tokens_.contains(out.token));

        out.page = enclave::InstancePage::issue(out.token, identity);
        out.verifier_identity = identity;

        hash::Digest expected = enclave::extend_with_instance_page(policy.base_hash, out.page,
                                                                   policy.instance_page_offset);
        out.sigstruct = sig::derive_singleton_sigstruct(policy.common_sigstruct, expected,
                                                        reg.signer_key);

        TokenRecord record{.token = out.token,
                           .policy_name = policy.name,
                           .expected_mrenclave = expected,
                           .issued_sigstruct = out.sigstruct,
                           .state = TokenRecord::State::Issued,
                           .issued_at = now_unix()};

        nlohmann::json j;
        j["event"] = "issue";
        j["token"] = to_hex(record.token);
        j["policy"] = record.policy_name;
        j["expected_mrenclave"] = to_hex(record.expected_mrenclave);
        j["sigstruct_b64"] = to_base64(record.issued_sigstruct.to_bytes());
        j["issued_at"] = record.issued_at;
        journal_append(j.dump());

        tokens_.emplace(out.token, std::move(record));
    }
    return out;
}

attest::Report Verifier::check_quote(const attest::Quote& quote,
                                     const attest::Nonce& session_nonce) const {
    for (const auto& platform : trusted_platforms_) {
        try {
            return attest::verify_quote(quote, platform, session_nonce);
        } catch (const Error& e) {
            if (e.code() == Err::NonceMismatch) throw;  // right platform, stale evidence
        }
    }
    throw Error(Err::QuoteSigInvalid, "attest: quote not signed by a trusted platform");
}

SecretsBundle Verifier::attest_singleton(const attest::Quote& quote, const Token& token,
                                         std::span<const std::uint8_t> channel_pub,
                                         const attest::Nonce& session_nonce) {
    attest::Report report = check_quote(quote, session_nonce);

    hash::Digest expected_mr;
    std::string policy_name;
    {
        std::lock_guard lock(tokens_mu_);
        auto it = tokens_.find(token);
        if (it == tokens_.end()) throw Error(Err::TokenUnknown, "attest: unknown token");
        if (it->second.state == TokenRecord::State::Consumed)
            throw Error(Err::TokenUsed, "attest: token already consumed");
        expected_mr = it->second.expected_mrenclave;
        policy_name = it->second.policy_name;
    }

    SecretsBundle secrets;
    sig::Attributes expected_attrs, mask;
    hash::Digest expected_signer;
    {
        std::shared_lock lock(policies_mu_);
        const Policy& policy = lookup(policy_name).policy;
        secrets = policy.secrets;
        expected_attrs = policy.expected_attributes;
        mask = policy.attribute_mask;
        expected_signer = policy.expected_mrsigner;
    }

    if (report.mrenclave != expected_mr)
        throw Error(Err::MrenclaveMismatch, "attest: measurement does not match this token");
    if (report.mrsigner != expected_signer)
        throw Error(Err::SignerMismatch, "attest: signer identity mismatch");
    for (std::size_t i = 0; i < mask.size(); ++i)
        if ((report.attributes[i] & mask[i]) != (expected_attrs[i] & mask[i]))
            throw Error(Err::AttributeMismatch, "attest: attribute mismatch");
    if (report.reportdata != attest::bind_channel(channel_pub))
        throw Error(Err::ChannelBinding, "attest: reportdata does not bind the session channel");

    // All evidence checked; consume the token. Losing a race on this
    // transition is indistinguishable from replaying a consumed token.
    {
        std::lock_guard lock(tokens_mu_);
        auto it = tokens_.find(token);
        if (it == tokens_.end()) throw Error(Err::TokenUnknown, "attest: unknown token");
        if (it->second.state == TokenRecord::State::Consumed)
            throw Error(Err::TokenUsed, "attest: token already consumed");

        nlohmann::json j;
        j["event"] = "consume";
        j["token"] = to_hex(token);
        journal_append(j.dump());
        it->second.state = TokenRecord::State::Consumed;
    }
    return secrets;
}

SecretsBundle Verifier::attest_naive(const attest::Quote& quote,
                                     std::span<const std::uint8_t> channel_pub,
                                     const attest::Nonce& session_nonce) {
    attest::Report report = check_quote(quote, session_nonce);

    std::shared_lock lock(policies_mu_);
    const Policy* match = nullptr;
    for (const auto& [name, reg] : policies_) {
        if (reg.policy.mode == PolicyMode::Naive &&
            reg.policy.common_sigstruct.mrenclave == report.mrenclave) {
            match = &reg.policy;
            break;
        }
    }
    if (match == nullptr)
        throw Error(Err::MrenclaveMismatch, "attest: no naive policy expects this measurement");

    if (report.mrsigner != match->expected_mrsigner)
        throw Error(Err::SignerMismatch, "attest: signer identity mismatch");
    for (std::size_t i = 0; i < match->attribute_mask.size(); ++i)
        if ((report.attributes[i] & match->attribute_mask[i]) !=
            (match->expected_attributes[i] & match->attribute_mask[i]))
            throw Error(Err::AttributeMismatch, "attest: attribute mismatch");
    if (report.reportdata != attest::bind_channel(channel_pub))
        throw Error(Err::ChannelBinding, "attest: reportdata does not bind the session channel");

    return match->secrets;
}

hash::Digest Verifier::expected_mrenclave(const std::string& policy_name, const Token& token) const {
    std::shared_lock lock(policies_mu_);
    const auto& reg = lookup(policy_name);
    auto page = enclave::InstancePage::issue(token,
                                             sig::mrsigner_of_modulus(reg.signer_key.modulus()));
    return enclave::extend_with_instance_page(reg.policy.base_hash, page,
                                              reg.policy.instance_page_offset);
}

std::optional<TokenRecord> Verifier::find_token(const Token& token) const {
    std::lock_guard lock(tokens_mu_);
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return std::nullopt;
    return it->second;
}

std::size_t Verifier::token_count() const {
    std::lock_guard lock(tokens_mu_);
    return tokens_.size();
}

std::vector<std::string> Verifier::policy_names() const {
    std::shared_lock lock(policies_mu_);
    std::vector<std::string> out;
    for (const auto& [name, reg] : policies_) out.push_back(name);
    return out;
}

// --- journal -----------------------------------------------------------------
// One length-prefixed JSON record per token event; appended under tokens_mu_
// and flushed before the in-memory transition becomes visible.

void Verifier::journal_append(const std::string& line) {
    if (!journal_) return;
    std::uint8_t len[4];
    put_u32_be(len, static_cast<std::uint32_t>(line.size()));
    journal_->write(reinterpret_cast<const char*>(len), 4);
    journal_->write(line.data(), static_cast<std::streamsize>(line.size()));
    journal_->flush();
    if (!*journal_) throw Error(Err::Io, "verifier: journal write failed");
}

void Verifier::load_journal() {
    std::ifstream in(journal_path_, std::ios::binary);
    if (!in) return;  // first start

    for (;;) {
        std::uint8_t len_raw[4];
        if (!in.read(reinterpret_cast<char*>(len_raw), 4)) break;
        std::uint32_t len = get_u32_be(len_raw);
        std::string line(len, '\0');
        if (!in.read(line.data(), len))
            throw Error(Err::Io, "verifier: truncated journal record");

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            std::string event = j.at("event").get<std::string>();
            auto token = array_from_hex<32>(j.at("token").get<std::string>());
            if (event == "issue") {
                TokenRecord record{
                    .token = token,
                    .policy_name = j.at("policy").get<std::string>(),
                    .expected_mrenclave =
                        array_from_hex<32>(j.at("expected_mrenclave").get<std::string>()),
                    .issued_sigstruct =
                        sig::SigStruct::from_bytes(from_base64(j.at("sigstruct_b64").get<std::string>())),
                    .state = TokenRecord::State::Issued,
                    .issued_at = j.at("issued_at").get<std::uint64_t>()};
                tokens_.insert_or_assign(token, std::move(record));
            } else if (event == "consume") {
                auto it = tokens_.find(token);
                if (it == tokens_.end())
                    throw Error(Err::Io, "verifier: consume for unknown token in journal");
                it->second.state = TokenRecord::State::Consumed;
            } else {
                throw Error(Err::Io, "verifier: unknown journal event");
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(Err::Io, std::string("verifier: corrupt journal: ") + e.what());
        }
    }
}

// --- policy files ---------------------------------------------------------

std::string Policy::to_json(const rsa::KeyPair& signer_key) const {
    nlohmann::json j;
    j["name"] = name;
    j["mode"] = (mode == PolicyMode::Singleton) ? "singleton" : "naive";
    j["base_hash_hex"] = base_hash.to_hex();
    j["common_sigstruct_b64"] = to_base64(common_sigstruct.to_bytes());
    j["expected_mrsigner_hex"] = to_hex(expected_mrsigner);
    j["expected_attributes_hex"] = to_hex(expected_attributes);
    j["attribute_mask_hex"] = to_hex(attribute_mask);
    j["instance_page_offset"] = instance_page_offset;
    j["secrets"] = secrets.entries;
    j["signer_key_pem"] = signer_key.to_pem();
    return j.dump(2);
}

std::pair<Policy, rsa::KeyPair> Policy::from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        Policy p;
        p.name = j.at("name").get<std::string>();
        std::string mode = j.at("mode").get<std::string>();
        if (mode == "singleton")
            p.mode = PolicyMode::Singleton;
        else if (mode == "naive")
            p.mode = PolicyMode::Naive;
        else
            throw Error(Err::PolicyInvalid, "policy: mode must be naive or singleton");
        p.base_hash = hash::BaseHash::from_hex(j.at("base_hash_hex").get<std::string>());
        p.common_sigstruct =
            sig::SigStruct::from_bytes(from_base64(j.at("common_sigstruct_b64").get<std::string>()));
        p.expected_mrsigner = array_from_hex<32>(j.at("expected_mrsigner_hex").get<std::string>());
        p.expected_attributes = array_from_hex<16>(j.at("expected_attributes_hex").get<std::string>());
        p.attribute_mask = array_from_hex<16>(j.at("attribute_mask_hex").get<std::string>());
        p.instance_page_offset = j.at("instance_page_offset").get<std::uint64_t>();
        for (const auto& [k, v] : j.at("secrets").items())
            p.secrets.entries[k] = v.get<std::string>();
        auto key = rsa::KeyPair::from_pem(j.at("signer_key_pem").get<std::string>());
        return {std::move(p), std::move(key)};
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::PolicyInvalid, std::string("policy: ") + e.what());
    }
}

}  // namespace singlet::verifier
