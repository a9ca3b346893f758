#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pathsig {

using Complex = std::complex<double>;

// Hard caps keeping exhaustive path enumeration tractable.
inline constexpr int kMaxDimension = 8;
inline constexpr int kMaxSlots = 12;
inline constexpr std::size_t kMaxPathCount = std::size_t{1} << 20;

/// One ladder of tolerances used across the library:
///  - construction: structural checks on new values (unitarity, orthonormality)
///  - equality:     comparisons between computed quantities
///  - zero:         classifying a witness value as "vanishes"
struct Tolerances {
    double construction = 1e-10;
    double equality = 1e-12;
    double zero = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class EnumerationBoundExceeded : public Error {
public:
    using Error::Error;
};

class NoMeasuredSlots : public Error {
public:
    using Error::Error;
};

class SlotNotMeasured : public Error {
public:
    using Error::Error;
};

class BadSlotIndex : public Error {
public:
    using Error::Error;
};

class EigenvalueNotPlusMinusOne : public Error {
public:
    using Error::Error;
};

class InvalidRange : public Error {
public:
    using Error::Error;
};

class OutputWriteFailure : public Error {
public:
    using Error::Error;
};

} // namespace pathsig
