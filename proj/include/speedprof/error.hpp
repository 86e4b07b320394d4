#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace speedprof {

/// Base of every error raised by the library. `error_class()` is a stable,
/// dotted identifier (e.g. "route.degenerate") used by the CLI on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string error_class, const std::string& what)
        : std::runtime_error(what), class_(std::move(error_class)) {}

    const std::string& error_class() const noexcept { return class_; }

private:
    std::string class_;
};

/// Input could not be interpreted (usage, config or argument problem).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string cls = "config.invalid")
        : Error(std::move(cls), what) {}
};

class MissingInput : public Error {
public:
    explicit MissingInput(const std::string& path)
        : Error("io.missing_input", "missing input: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, std::string content, const std::string& reason)
        : Error("io.parse_error", file + ":" + std::to_string(line) + ": " + reason + " [" + content + "]"),
          file_(std::move(file)), line_(line), content_(std::move(content)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& content() const noexcept { return content_; }

private:
    std::string file_;
    std::size_t line_;
    std::string content_;
};

class DegenerateRoute : public Error {
public:
    explicit DegenerateRoute(const std::string& what) : Error("route.degenerate", what) {}
};

class UncoveredPoint : public Error {
public:
    explicit UncoveredPoint(std::size_t index)
        : Error("tmc.uncovered_point", "standard point " + std::to_string(index) + " is not covered by any TMC section"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class NoData : public Error {
public:
    explicit NoData(std::string code, std::size_t point_index = npos)
        : Error("tmc.no_data", message(code, point_index)), code_(std::move(code)), index_(point_index) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const std::string& code() const noexcept { return code_; }
    std::size_t point_index() const noexcept { return index_; }

private:
    static std::string message(const std::string& code, std::size_t idx) {
        std::string s = "no TMC observations for code '" + code + "'";
        if (idx != npos) s += " (standard point " + std::to_string(idx) + ")";
        return s;
    }
    std::string code_;
    std::size_t index_;
};

class NonMonotonicTime : public Error {
public:
    explicit NonMonotonicTime(std::size_t line)
        : Error("trip.non_monotonic_time", "t_rel_s not strictly increasing at line " + std::to_string(line)),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnmatchedTrip : public Error {
public:
    explicit UnmatchedTrip(const std::string& what) : Error("trip.unmatched", what) {}
};

class InvalidIndex : public Error {
public:
    explicit InvalidIndex(std::size_t index)
        : Error("features.invalid_index", "standard point index " + std::to_string(index) + " outside route") {}
};

class EmptyTrainingSet : public Error {
public:
    EmptyTrainingSet() : Error("features.empty_training_set", "normalizer needs at least one training vector") {}
};

class InvalidArchitecture : public Error {
public:
    explicit InvalidArchitecture(const std::string& what) : Error("nn.invalid_architecture", what) {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("nn.dimension_mismatch",
                "expected input of size " + std::to_string(expected) + ", got " + std::to_string(got)) {}
};

class NonFiniteLoss : public Error {
public:
    explicit NonFiniteLoss(std::size_t epoch)
        : Error("nn.non_finite_loss", "loss became non-finite at epoch " + std::to_string(epoch)), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("metrics.length_mismatch", "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("metrics.empty_input", "empty input") {}
};

class TooFewTrips : public Error {
public:
    explicit TooFewTrips(std::size_t n)
        : Error("experiments.too_few_trips", "need at least 2 trips, got " + std::to_string(n)) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what) : Error("synth.invalid_params", what) {}
};

} // namespace speedprof
