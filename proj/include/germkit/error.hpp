#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace germkit {

// Every domain failure the library can report. The CLI prints name(kind)
// in the error payload, so the spellings are part of the output contract.
enum class ErrorKind {
    ZeroSeries,
    ModeMismatch,
    OrderMismatch,
    NotInvertible,
    ZeroMultiplier,
    Resonance,
    NotSuperattracting,
    NotRootOfUnity,
    FiniteOrder,
    OrderTooSmall,
    NoExactRoot,
    BaseMismatch,
    InfiniteOrder,
    SameCenter,
    NotFound,
    NotHyperbolic,
    AxesTooClose,
    PingPongFailure,
    LevinFails,
    RootFindingFailed,
    GridMismatch,
    NoSupport,
    NotFixed,
    InvalidArgument,
    ParseError,
    IoError,
};

constexpr std::string_view name(ErrorKind k) noexcept
{
    switch (k) {
    case ErrorKind::ZeroSeries: return "ZeroSeries";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::ZeroMultiplier: return "ZeroMultiplier";
    case ErrorKind::Resonance: return "Resonance";
    case ErrorKind::NotSuperattracting: return "NotSuperattracting";
    case ErrorKind::NotRootOfUnity: return "NotRootOfUnity";
    case ErrorKind::FiniteOrder: return "FiniteOrder";
    case ErrorKind::OrderTooSmall: return "OrderTooSmall";
    case ErrorKind::NoExactRoot: return "NoExactRoot";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::InfiniteOrder: return "InfiniteOrder";
    case ErrorKind::SameCenter: return "SameCenter";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::AxesTooClose: return "AxesTooClose";
    case ErrorKind::PingPongFailure: return "PingPongFailure";
    case ErrorKind::LevinFails: return "LevinFails";
    case ErrorKind::RootFindingFailed: return "RootFindingFailed";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NoSupport: return "NoSupport";
    case ErrorKind::NotFixed: return "NotFixed";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(name(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace germkit
