#pragma once

#include <stdexcept>
#include <string>

namespace ddp {

// Every failure raised by the library derives from ddp::Error so callers can
// catch the whole family at the orchestration boundary.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- frame I/O ----
class FormatError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class InsufficientFramesError : public Error {
public:
    using Error::Error;
};

// ---- numerical stages ----
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class DegeneratePairError : public Error {
public:
    using Error::Error;
};

class NoRealDatumError : public Error {
public:
    using Error::Error;
};

class DatumUnavailableError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class RankUnavailableError : public Error {
public:
    using Error::Error;
};

class RootSolveError : public Error {
public:
    using Error::Error;
};

class MixityUnavailableError : public Error {
public:
    using Error::Error;
};

class ZoomOutUnavailableError : public Error {
public:
    using Error::Error;
};

// ---- configuration / scoring ----
class ConfigError : public Error {
public:
    using Error::Error;
};

class RunMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace ddp
