#pragma once

// File formats.
//
// Geometry JSON. A room is either wall-first or vertex-first:
//   {"walls": [{"label": "north", "normal": [0, 1], "offset": 1.0}, ...]}
//   {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "labels": [...]}
// A trajectory is {"points": [[x, y], ...]}. Either may also be nested under
// "room" / "trajectory" in a combined file.
//
// Echo CSV (distances in meters):
//   # echoroom-csv v1
//   # sigma: 0.05                 optional "# key: value" metadata lines
//   wall-0,wall-1,wall-2
//   0.25,0.5,
// One row per measurement; an empty field is a missing entry. Numbers are
// written in shortest round-trip form so files are byte-reproducible.

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "echoroom/ambiguity.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/reconstruction.hpp"

namespace echoroom {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

Json room_to_json(const Room& room);
Room room_from_json(const Json& j);
Json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const Json& j);
Json reconstruction_to_json(const Reconstruction& rec);
Json error_report_to_json(const ErrorReport& report);
Json ambiguous_pair_to_json(const AmbiguousPair& pair, const CongruenceResult& verdict);
Json matrix_to_json(const Matrix& m);

using CsvMetadata = std::map<std::string, std::string>;

std::string echo_csv(const EchoMatrix& d, const CsvMetadata& meta = {});
/// Throws ParseError naming the offending line.
EchoMatrix parse_echo_csv(const std::string& text, CsvMetadata* meta = nullptr);

std::string read_text_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace echoroom
