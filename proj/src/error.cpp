#include "qf/error.hpp"

namespace qf {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SupportOverflow: return "SupportOverflow";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::SpecInvalid: return "SpecInvalid";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::TailOverflow: return "TailOverflow";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::FlavorMismatch: return "FlavorMismatch";
    case ErrorKind::ComplexInput: return "ComplexInput";
    case ErrorKind::ComplexField: return "ComplexField";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ScaleTooFine: return "ScaleTooFine";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::IndexNotInDomain: return "IndexNotInDomain";
    case ErrorKind::DomainInvalid: return "DomainInvalid";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

} // namespace qf
