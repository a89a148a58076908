#include "skillkit/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace skillkit {

std::string to_string(Skill s) {
    return s == Skill::Expert ? "expert" : "novice";
}

Skill parse_skill(const std::string& text) {
    std::string lower(text.size(), '\0');
    std::transform(text.begin(), text.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "novice") {
        return Skill::Novice;
    }
    if (lower == "expert") {
        return Skill::Expert;
    }
    throw Error("unknown skill '" + text + "' (expected novice or expert)");
}

void Trajectory::validate() const {
    if (samples.size() < 4) {
        throw Error("trajectory too short: " + std::to_string(samples.size()) +
                    " samples (need at least 4)");
    }
    if (!(sample_rate_hz > 0.0)) {
        throw Error("sample rate must be positive");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.left.allFinite() || !s.right.allFinite()) {
            throw Error("non-finite coordinate at sample " + std::to_string(i));
        }
    }
}

std::size_t Dataset::count(Skill s) const {
    std::size_t n = 0;
    for (const auto& [meta, traj] : trials) {
        if (meta.skill == s) {
            ++n;
        }
    }
    return n;
}

void Dataset::require_trainable() const {
    if (trials.empty()) {
        throw Error("dataset is empty");
    }
    if (count(Skill::Novice) == 0 || count(Skill::Expert) == 0) {
        throw Error("dataset must contain both novice and expert trials");
    }
}

}  // namespace skillkit
