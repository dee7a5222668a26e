#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace singlet {

enum class Err {
    // hashcore
    NotBlockAligned,
    MalformedSnapshot,
    MessageTooLong,
    // enclave construction
    InvalidBlueprint,
    MisalignedOffset,
    BadChunkLength,
    InvalidPage,
    // sigstruct / einit
    SigInvalid,
    MrenclaveMismatch,
    AttributeMismatch,
    KeyMismatch,
    // attestation
    BadReportMac,
    QuoteSigInvalid,
    NonceMismatch,
    // verifier
    PolicyInvalid,
    DuplicateName,
    UnknownPolicy,
    SigstructMismatch,
    TokenUnknown,
    TokenUsed,
    SignerMismatch,
    ChannelBinding,
    // starter
    VerifierIdentity,
    // transport / misc
    Protocol,
    Io,
    Entropy,
};

class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

// Wire-level error code for the fixed protocol set. Codes outside the set
// (local-only failures) map to E_PROTOCOL when they must cross the wire.
std::string_view wire_code(Err code);

// Inverse of wire_code for the fixed set; unknown strings yield Err::Protocol.
Err err_from_wire(std::string_view code);

}  // namespace singlet
