#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qcorr/classical.hpp"
#include "qcorr/general.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/protocol.hpp"
#include "qcorr/pure.hpp"
#include "qcorr/state.hpp"

namespace qcorr::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormat = "qcorr/1";

/// Parses a JSON document; syntax errors become ParseError with line and column.
Json parse_json(std::string_view text, const std::string& source = "<input>");
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Matrix schema: {"format", "rows", "cols", "data": [[re, im], ...]} row-major.
// Plain numbers are accepted as real entries.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, const std::string& where = "matrix");
Json real_matrix_to_json(const RMatrix& m);
RMatrix real_matrix_from_json(const Json& j, const std::string& where = "matrix");

// A pure state is its dim_a x dim_b amplitude matrix, kind "pure_state".
Json state_to_json(const PureState& s);
PureState state_from_json(const Json& j, const std::string& where = "state");

// Density matrices carry "dims": [dim_a, dim_b], kind "density".
Json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j, const std::string& where = "density");
/// Density matrix from either a density or a pure-state document.
DensityMatrix target_from_json(const Json& j, const std::string& where = "target");

/// CSV distribution: rows = x, columns = y. Blank lines and lines starting
/// with '#' are ignored. Malformed, non-finite or negative entries raise
/// ParseError naming the row and column (1-based).
RMatrix parse_csv(std::string_view text, const std::string& source = "<input>");
RMatrix read_csv_file(const std::filesystem::path& path);
std::string csv_string(const RMatrix& p);
/// CSV, or the JSON matrix schema for *.json paths.
RMatrix read_distribution(const std::filesystem::path& path);

Json psd_to_json(const PsdFactorization& f);
PsdFactorization psd_from_json(const Json& j);

Json general_to_json(const GeneralFactorization& f);
GeneralFactorization general_from_json(const Json& j);

Json purification_to_json(const Purification& p);
Purification purification_from_json(const Json& j);

Json channel_to_json(const LocalChannel& c);
LocalChannel channel_from_json(const Json& j, const std::string& where = "channel");

/// Protocol manifest. Each of seed/alice/bob/target is an inline object or a
/// path relative to `base`.
Json protocol_to_json(const ProtocolSpec& spec);
ProtocolSpec protocol_from_json(const Json& j, const std::filesystem::path& base = {});

/// Canonical serialization used for every file and report.
std::string dump(const Json& j);

}  // namespace qcorr::io
