#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qwalk/linalg.hpp"
#include "qwalk/unitary_decomp.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

// Complex matrices are written as {"n": n, "<key>": [[re, im], ...]} in
// row-major order; "amp" for walk states and "entries" for unitaries.

nlohmann::json matrix_to_json(const CMatrix& m, const std::string& key);
CMatrix matrix_from_json(const nlohmann::json& doc, const std::string& key);

nlohmann::json walk_state_to_json(const WalkState& s);
WalkState walk_state_from_json(const nlohmann::json& doc);

nlohmann::json unitary_to_json(const CMatrix& u);
CMatrix unitary_from_json(const nlohmann::json& doc);

/// {"n": n, "stages": [{"d": d, "pairs": [{"a", "b", "u": [[re,im] x4]}]}]}
nlohmann::json stage_sequence_to_json(const StageSequence& seq);
StageSequence stage_sequence_from_json(const nlohmann::json& doc);

/// Two tab-separated columns: 1-based node index, probability.
std::string distribution_tsv(const Distribution& d);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename, so readers never observe
/// a partially written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qwalk
