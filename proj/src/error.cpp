#include "cvl/error.hpp"

namespace cvl {

const char* to_string(Err code) {
    switch (code) {
    case Err::MissingRoot: return "MissingRoot";
    case Err::BadConfig: return "BadConfig";
    case Err::BadGrid: return "BadGrid";
    case Err::ZeroPartitions: return "ZeroPartitions";
    case Err::OutOfBounds: return "OutOfBounds";
    case Err::ComponentOutOfRange: return "ComponentOutOfRange";
    case Err::IndexOverflow: return "IndexOverflow";
    case Err::GridMismatch: return "GridMismatch";
    case Err::DimsMismatch: return "DimsMismatch";
    case Err::NonFiniteValue: return "NonFiniteValue";
    case Err::Io: return "IoError";
    case Err::BadMagic: return "BadMagic";
    case Err::VersionUnsupported: return "VersionUnsupported";
    case Err::TruncatedFile: return "TruncatedFile";
    case Err::BadChannel: return "BadChannel";
    case Err::TaskFailed: return "TaskFailed";
    case Err::DivideByZero: return "DivideByZero";
    }
    return "Unknown";
}

} // namespace cvl
