#pragma once

#include <stdexcept>
#include <string>

namespace cvl {

enum class Err {
    MissingRoot,
    BadConfig,
    BadGrid,
    ZeroPartitions,
    OutOfBounds,
    ComponentOutOfRange,
    IndexOverflow,
    GridMismatch,
    DimsMismatch,
    NonFiniteValue,
    Io,
    BadMagic,
    VersionUnsupported,
    TruncatedFile,
    BadChannel,
    TaskFailed,
    DivideByZero,
};

const char* to_string(Err code);

class CvlError : public std::runtime_error {
public:
    CvlError(Err code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw CvlError(code, what); }

} // namespace cvl
