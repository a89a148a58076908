#pragma once

#include "skillkit/types.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace skillkit {

/// Maps file columns onto the six tool-tip coordinates. Only the listed
/// columns are read; anything else in the row is ignored, so the same parser
/// handles both the artifact's 6-column files and wider robot API dumps.
struct ColumnSchema {
    char delimiter = ',';
    std::array<std::size_t, 3> left_cols{0, 1, 2};
    std::array<std::size_t, 3> right_cols{3, 4, 5};
    double sample_rate_hz = 30.0;
    std::size_t header_rows = 0;

    /// The artifact's own trajectory format: left x,y,z then right x,y,z.
    static ColumnSchema standard();

    /// JIGSAWS kinematics: 76 whitespace-separated columns per frame; tooltip
    /// positions sit at 1-based columns 39-41 (left PSM) and 58-60 (right).
    static ColumnSchema jigsaws();

    std::size_t min_columns() const;
};

/// Parses row-per-sample numeric text into a Trajectory. Rows are kept in
/// file order. Malformed rows raise ParseError with the 1-based line number;
/// fewer than 4 data rows raises Error.
Trajectory parse_kinematics(const std::string& text, const ColumnSchema& schema);

/// Parses a trial manifest: one "surgeon_id,trial_index,skill,path" record
/// per line, '#' comments and blank lines ignored, skill case-insensitive.
/// Duplicate (surgeon_id, trial_index) pairs and unknown skills are errors.
std::vector<TrialMeta> parse_manifest(const std::string& text);

/// Loads every manifest entry from under root_dir. A missing file is an
/// error naming the path; parse failures are rethrown with trial context.
Dataset load_dataset(const std::filesystem::path& root_dir,
                     const std::vector<TrialMeta>& metas,
                     const ColumnSchema& schema = ColumnSchema::standard());

Dataset load_dataset(const std::filesystem::path& root_dir,
                     const std::filesystem::path& manifest_path,
                     const ColumnSchema& schema = ColumnSchema::standard());

/// Serializes a trajectory in the artifact's own format. Values use
/// shortest-round-trip formatting, so parse(serialize(t)) reproduces t
/// bit-exactly.
std::string trajectory_to_csv(const Trajectory& traj);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace skillkit
