#pragma once

#include <stdexcept>
#include <string>

namespace femscript
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Open border loops, self-intersections and similar meshing failures.
class GeometryError : public Error
{
public:
    using Error::Error;
};

/// A mesh transformation produced a triangle with non-positive area.
class FoldOverError : public GeometryError
{
public:
    using GeometryError::GeometryError;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class NumericError : public Error
{
public:
    using Error::Error;
};

class OutOfDomain : public Error
{
public:
    using Error::Error;
};

class SingularMatrix : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    using Error::Error;
};

class Unsupported : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace femscript
