#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skillkit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a text input cannot be parsed; carries the 1-based row number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

enum class Skill { Novice, Expert };

std::string to_string(Skill s);

/// Parses "novice"/"expert" (case-insensitive). Throws Error on anything else.
Skill parse_skill(const std::string& text);

/// One 30 Hz frame: tool-tip position of each patient-side arm, in cm.
struct Sample {
    Eigen::Vector3d left;
    Eigen::Vector3d right;
};

struct Trajectory {
    std::vector<Sample> samples;
    double sample_rate_hz = 30.0;

    std::size_t size() const { return samples.size(); }

    /// Throws Error unless there are >= 4 samples, the rate is positive and
    /// every coordinate is finite.
    void validate() const;
};

struct TrialMeta {
    std::string surgeon_id;
    int trial_index = 0;
    Skill skill = Skill::Novice;
    std::string source_path;
};

struct Dataset {
    std::vector<std::pair<TrialMeta, Trajectory>> trials;

    std::size_t size() const { return trials.size(); }
    std::size_t count(Skill s) const;

    /// Checks dataset-level invariants needed before training: non-empty and
    /// both skill classes present.
    void require_trainable() const;
};

}  // namespace skillkit
