#ifndef GCNL_ERRORS_HPP
#define GCNL_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gcnl {

// Base of every error the library throws. `kind()` is a stable, machine
// readable tag used by the CLI when it prints its one-line error.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define GCNL_DEFINE_ERROR(Name, tag)                                       \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& message) : Error(tag, message) {} \
    }

GCNL_DEFINE_ERROR(InvalidShapeError, "invalid-shape");
GCNL_DEFINE_ERROR(ShapeError, "shape");
GCNL_DEFINE_ERROR(NumericError, "non-finite");
GCNL_DEFINE_ERROR(IndexError, "index");
GCNL_DEFINE_ERROR(InvalidDistributionError, "invalid-distribution");
GCNL_DEFINE_ERROR(DegenerateClassError, "degenerate-class");
GCNL_DEFINE_ERROR(BuildError, "build");
GCNL_DEFINE_ERROR(ContractError, "contract");
GCNL_DEFINE_ERROR(ConfigError, "config");
GCNL_DEFINE_ERROR(UndefinedMetricError, "undefined-metric");
GCNL_DEFINE_ERROR(IoError, "io");

#undef GCNL_DEFINE_ERROR

// Errors that point at a position inside a byte stream.
class OffsetError : public Error {
public:
    OffsetError(std::string kind, const std::string& message, std::uint64_t offset)
        : Error(std::move(kind), message + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class DecodeError : public OffsetError {
public:
    DecodeError(const std::string& message, std::uint64_t offset)
        : OffsetError("decode", message, offset) {}
};

class LoadError : public OffsetError {
public:
    LoadError(const std::string& message, std::uint64_t offset)
        : OffsetError("load", message, offset) {}
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& message, int epoch)
        : Error("divergence", message), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

} // namespace gcnl

#endif // GCNL_ERRORS_HPP
