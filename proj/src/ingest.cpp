#include "skillkit/ingest.hpp"

#include "skillkit/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace skillkit {

ColumnSchema ColumnSchema::standard() {
    return ColumnSchema{};
}

ColumnSchema ColumnSchema::jigsaws() {
    ColumnSchema s;
    s.delimiter = ' ';
    s.left_cols = {38, 39, 40};
    s.right_cols = {57, 58, 59};
    return s;
}

std::size_t ColumnSchema::min_columns() const {
    std::size_t m = 0;
    for (auto c : left_cols) {
        m = std::max(m, c + 1);
    }
    for (auto c : right_cols) {
        m = std::max(m, c + 1);
    }
    return m;
}

namespace {

Eigen::Vector3d pick_columns(const std::vector<std::string>& cells,
                             const std::array<std::size_t, 3>& cols,
                             std::size_t line_no) {
    Eigen::Vector3d v;
    for (int k = 0; k < 3; ++k) {
        bool ok = false;
        double x = parse_double_cell(cells[cols[static_cast<std::size_t>(k)]], ok);
        if (!ok) {
            throw ParseError("non-numeric cell '" + cells[cols[static_cast<std::size_t>(k)]] + "'",
                             line_no);
        }
        if (!std::isfinite(x)) {
            throw ParseError("non-finite value", line_no);
        }
        v[k] = x;
    }
    return v;
}

}  // namespace

Trajectory parse_kinematics(const std::string& text, const ColumnSchema& schema) {
    if (!(schema.sample_rate_hz > 0.0)) {
        throw Error("sample rate must be positive");
    }
    Trajectory traj;
    traj.sample_rate_hz = schema.sample_rate_hz;

    const auto lines = split_lines(text);
    const std::size_t need = schema.min_columns();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i < schema.header_rows) {
            continue;
        }
        if (trim(lines[i]).empty()) {
            continue;
        }
        const std::size_t line_no = i + 1;
        auto cells = split_cells(lines[i], schema.delimiter);
        if (cells.size() < need) {
            throw ParseError("expected at least " + std::to_string(need) + " columns, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        Sample s;
        s.left = pick_columns(cells, schema.left_cols, line_no);
        s.right = pick_columns(cells, schema.right_cols, line_no);
        traj.samples.push_back(s);
    }
    if (traj.samples.size() < 4) {
        throw Error("trajectory too short: " + std::to_string(traj.samples.size()) +
                    " samples (need at least 4)");
    }
    return traj;
}

std::vector<TrialMeta> parse_manifest(const std::string& text) {
    std::vector<TrialMeta> metas;
    std::set<std::pair<std::string, int>> seen;

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string line = trim(lines[i]);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto cells = split_cells(line, ',');
        if (cells.size() != 4) {
            throw ParseError("manifest record needs 4 fields (surgeon_id,trial_index,skill,path)",
                             line_no);
        }
        TrialMeta meta;
        meta.surgeon_id = cells[0];
        if (meta.surgeon_id.empty()) {
            throw ParseError("empty surgeon_id", line_no);
        }
        int idx = 0;
        auto res = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), idx);
        if (res.ec != std::errc() || res.ptr != cells[1].data() + cells[1].size() || idx < 0) {
            throw ParseError("trial_index must be a non-negative integer, got '" + cells[1] + "'",
                             line_no);
        }
        meta.trial_index = idx;
        try {
            meta.skill = parse_skill(cells[2]);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
        meta.source_path = cells[3];
        if (meta.source_path.empty()) {
            throw ParseError("empty file path", line_no);
        }
        if (!seen.insert({meta.surgeon_id, meta.trial_index}).second) {
            throw ParseError("duplicate trial (" + meta.surgeon_id + ", " +
                                 std::to_string(meta.trial_index) + ")",
                             line_no);
        }
        metas.push_back(std::move(meta));
    }
    return metas;
}

Dataset load_dataset(const std::filesystem::path& root_dir,
                     const std::vector<TrialMeta>& metas,
                     const ColumnSchema& schema) {
    Dataset ds;
    ds.trials.reserve(metas.size());
    for (const auto& meta : metas) {
        const auto path = root_dir / meta.source_path;
        if (!std::filesystem::exists(path)) {
            throw Error("missing trajectory file: " + path.string());
        }
        try {
            Trajectory traj = parse_kinematics(read_text_file(path), schema);
            traj.validate();
            ds.trials.emplace_back(meta, std::move(traj));
        } catch (const Error& e) {
            throw Error("trial " + meta.surgeon_id + "/" + std::to_string(meta.trial_index) +
                        " (" + path.string() + "): " + e.what());
        }
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& root_dir,
                     const std::filesystem::path& manifest_path,
                     const ColumnSchema& schema) {
    auto metas = parse_manifest(read_text_file(manifest_path));
    return load_dataset(root_dir, metas, schema);
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out;
    out.reserve(traj.samples.size() * 64);
    for (const auto& s : traj.samples) {
        for (int k = 0; k < 3; ++k) {
            out += format_double(s.left[k]);
            out += ',';
        }
        for (int k = 0; k < 3; ++k) {
            out += format_double(s.right[k]);
            out += (k == 2) ? '\n' : ',';
        }
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out << content;
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

}  // namespace skillkit
