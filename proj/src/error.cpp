#include "singlet/error.hpp"

namespace singlet {

std::string_view wire_code(Err code) {
    switch (code) {
        case Err::UnknownPolicy:
            return "E_UNKNOWN_POLICY";
        case Err::SigstructMismatch:
        case Err::SigInvalid:
            return "E_SIGSTRUCT_INVALID";
        case Err::TokenUnknown:
            return "E_TOKEN_UNKNOWN";
        case Err::TokenUsed:
            return "E_TOKEN_USED";
        case Err::MrenclaveMismatch:
            return "E_MRENCLAVE_MISMATCH";
        case Err::SignerMismatch:
            return "E_SIGNER_MISMATCH";
        case Err::AttributeMismatch:
            return "E_ATTR_MISMATCH";
        case Err::ChannelBinding:
            return "E_CHANNEL_BINDING";
        case Err::QuoteSigInvalid:
        case Err::NonceMismatch:
        case Err::BadReportMac:
            return "E_QUOTE_INVALID";
        case Err::VerifierIdentity:
            return "E_VERIFIER_IDENTITY";  // starter-local; never sent by the verifier
        default:
            return "E_PROTOCOL";
    }
}

Err err_from_wire(std::string_view code) {
    if (code == "E_UNKNOWN_POLICY") return Err::UnknownPolicy;
    if (code == "E_SIGSTRUCT_INVALID") return Err::SigstructMismatch;
    if (code == "E_TOKEN_UNKNOWN") return Err::TokenUnknown;
    if (code == "E_TOKEN_USED") return Err::TokenUsed;
    if (code == "E_MRENCLAVE_MISMATCH") return Err::MrenclaveMismatch;
    if (code == "E_SIGNER_MISMATCH") return Err::SignerMismatch;
    if (code == "E_ATTR_MISMATCH") return Err::AttributeMismatch;
    if (code == "E_CHANNEL_BINDING") return Err::ChannelBinding;
    if (code == "E_QUOTE_INVALID") return Err::QuoteSigInvalid;
    if (code == "E_VERIFIER_IDENTITY") return Err::VerifierIdentity;
    return Err::Protocol;
}

}  // namespace singlet
