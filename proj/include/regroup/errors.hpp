#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regroup {

// Base of everything the library throws on a violated contract. The CLI maps
// these onto exit codes; tests match on the concrete type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- expression front end -------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          offset_(offset), name_(name) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class Overflow : public Error {
public:
    using Error::Error;
};

// --- certification and inversion ------------------------------------------

class CertificationError : public Error {
public:
    using Error::Error;
};

class NotMonotone : public CertificationError {
public:
    NotMonotone(double at, const std::string& what) : CertificationError(what), at_(at) {}
    double at() const noexcept { return at_; }

private:
    double at_;
};

class FixedPointDetected : public CertificationError {
public:
    FixedPointDetected(double at, const std::string& what)
        : CertificationError(what), at_(at) {}
    // Approximate location of the fixed point.
    double at() const noexcept { return at_; }

private:
    double at_;
};

class NotFixedPointFree : public CertificationError {
public:
    NotFixedPointFree(double at, const std::string& what)
        : CertificationError(what), at_(at) {}
    double at() const noexcept { return at_; }

private:
    double at_;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

// --- conjugacy ------------------------------------------------------------

class LadderCapExceeded : public Error {
public:
    using Error::Error;
};

class OutOfUnitInterval : public Error {
public:
    using Error::Error;
};

// --- exact arithmetic and the rational construction ----------------------

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class DepthCapExceeded : public Error {
public:
    using Error::Error;
};

class ConstructionFailure : public Error {
public:
    using Error::Error;
};

class OutsideDomain : public Error {
public:
    using Error::Error;
};

// --- R^3 example ----------------------------------------------------------

class OutsideCylinder : public Error {
public:
    using Error::Error;
};

class TooFewPoints : public Error {
public:
    using Error::Error;
};

class ZeroShiftVector : public Error {
public:
    using Error::Error;
};

}  // namespace regroup
