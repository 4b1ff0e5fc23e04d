#include "otx/error.hpp"

namespace otx {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
        case Errc::EmptyVector: return "EmptyVector";
        case Errc::NegativeEntry: return "NegativeEntry";
        case Errc::NonFiniteEntry: return "NonFiniteEntry";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ExponentOverflow: return "ExponentOverflow";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::EpsPrimeOutOfRange: return "EpsPrimeOutOfRange";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NegativeInput: return "NegativeInput";
        case Errc::UnsortedSupport: return "UnsortedSupport";
        case Errc::DisconnectedGraph: return "DisconnectedGraph";
        case Errc::SelfLoop: return "SelfLoop";
        case Errc::BadMagic: return "BadMagic";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::NonPositiveDistance: return "NonPositiveDistance";
        case Errc::ParseError: return "ParseError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace otx
