#include "echoroom/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "echoroom/error.hpp"

namespace echoroom {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_error(const std::string& msg, std::size_t line = 0) {
  if (line > 0) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg, line);
  throw Error(ErrorCode::ParseError, msg);
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) parse_error(std::string(what) + " must be a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) parse_error(std::string(what) + " must contain numbers");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(unsigned_zero(v(k)));
  return out;
}

std::vector<std::string> labels_from_json(const Json& j) {
  std::vector<std::string> labels;
  if (!j.contains("labels")) return labels;
  if (!j["labels"].is_array()) parse_error("labels must be an array of strings");
  for (const auto& l : j["labels"]) {
    if (!l.is_string()) parse_error("labels must be an array of strings");
    labels.push_back(l.get<std::string>());
  }
  return labels;
}

double parse_field(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    parse_error("not a finite number: '" + field + "'", line);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Json room_to_json(const Room& room) {
  Json walls = Json::array();
  for (std::size_t j = 0; j < room.size(); ++j) {
    walls.push_back(Json{{"label", room.label(j)},
                         {"normal", vector_to_json(room.wall(j).normal())},
                         {"offset", unsigned_zero(room.wall(j).offset())}});
  }
  Json out{{"dimension", room.dimension()}, {"labels", room.labels()}, {"walls", walls}};
  if (room.dimension() == 2) {
    try {
      Json verts = Json::array();
      for (const auto& v : room_vertices(room)) verts.push_back({unsigned_zero(v.x()), unsigned_zero(v.y())});
      out["vertices"] = verts;
    } catch (const Error&) {
      // Unbounded or degenerate rooms are still written wall-first.
    }
  }
  return out;
}

Room room_from_json(const Json& doc) {
  const Json& j = doc.contains("room") ? doc["room"] : doc;
  if (!j.is_object()) parse_error("room must be a JSON object");
  if (j.contains("dimension") && (!j["dimension"].is_number_integer() || j["dimension"].get<int>() != 2)) {
    if (j["dimension"].is_number_integer() && j["dimension"].get<int>() == 3) {
      throw Error(ErrorCode::UnsupportedDimension, "only planar rooms are supported");
    }
    parse_error("dimension must be 2");
  }
  std::vector<std::string> labels = labels_from_json(j);
  if (j.contains("walls")) {
    if (!j["walls"].is_array()) parse_error("walls must be an array");
    std::vector<Wall> walls;
    std::vector<std::string> wall_labels;
    for (const auto& w : j["walls"]) {
      if (!w.is_object() || !w.contains("normal") || !w.contains("offset") || !w["offset"].is_number()) {
        parse_error("each wall needs a normal and a numeric offset");
      }
      const Vector n = vector_from_json(w["normal"], "normal");
      if (!(n.norm() > 0.0) || !n.allFinite()) parse_error("wall normal must be nonzero");
      // Unit normals are kept bit-for-bit so files round-trip exactly.
      const double q = w["offset"].get<double>();
      walls.push_back(std::abs(n.norm() - 1.0) < 1e-12 ? Wall(n, q) : Wall::normalized(n, q));
      if (w.contains("label")) {
        if (!w["label"].is_string()) parse_error("wall label must be a string");
        wall_labels.push_back(w["label"].get<std::string>());
      }
    }
    if (labels.empty() && wall_labels.size() == walls.size()) labels = wall_labels;
    Room room(std::move(walls), std::move(labels));
    require_planar(room.dimension(), "room file");
    room_corners(room);
    return room;
  }
  if (j.contains("vertices")) {
    if (!j["vertices"].is_array()) parse_error("vertices must be an array");
    std::vector<Eigen::Vector2d> verts;
    for (const auto& v : j["vertices"]) {
      const Vector p = vector_from_json(v, "vertex");
      if (p.size() != 2) throw Error(ErrorCode::UnsupportedDimension, "vertices must be planar");
      verts.push_back(as2d(p));
    }
    const Room base = room_from_vertices(verts);
    return Room(base.walls(), std::move(labels));
  }
  parse_error("room needs either \"walls\" or \"vertices\"");
}

Json trajectory_to_json(const Trajectory& traj) {
  Json pts = Json::array();
  for (const auto& p : traj.points()) pts.push_back(vector_to_json(p));
  return Json{{"points", pts}};
}

Trajectory trajectory_from_json(const Json& doc) {
  const Json* j = &doc;
  if (doc.is_object() && doc.contains("trajectory")) j = &doc["trajectory"];
  if (j->is_object() && j->contains("points")) j = &(*j)["points"];
  if (!j->is_array() || j->empty()) parse_error("trajectory must be a nonempty array of points");
  std::vector<Vector> pts;
  for (const auto& p : *j) {
    pts.push_back(vector_from_json(p, "point"));
    if (pts.back().size() != 2) throw Error(ErrorCode::UnsupportedDimension, "points must be planar");
  }
  return Trajectory(std::move(pts));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::isfinite(m(i, j))) {
        row.push_back(unsigned_zero(m(i, j)));
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

Json reconstruction_to_json(const Reconstruction& rec) {
  const auto& d = rec.diagnostics;
  Json restarts = Json::array();
  for (const auto& r : d.restarts) {
    restarts.push_back(Json{{"initial_cost", r.initial_cost},
                            {"final_cost", r.final_cost},
                            {"alternating_iters", r.alternating_iters},
                            {"polish_iters", r.polish_iters},
                            {"converged", r.converged},
                            {"gradient_norm", r.gradient_norm}});
  }
  Json diag{{"method", d.method},
            {"converged", d.converged},
            {"iterations", d.iterations},
            {"chosen_restart", d.chosen_restart},
            {"optimal_candidates", d.optimal_candidates},
            {"ambiguity_suspected", d.ambiguity_suspected},
            {"collinear_suspected", d.collinear_suspected},
            {"descent_violations", d.descent_violations},
            {"notes", d.notes},
            {"restarts", restarts}};
  return Json{{"format", "echoroom-reconstruction v1"},
              {"room", room_to_json(rec.room)},
              {"trajectory", trajectory_to_json(rec.trajectory)},
              {"cost", rec.cost},
              {"max_abs_residual", rec.max_abs_residual},
              {"residuals", matrix_to_json(rec.residuals)},
              {"diagnostics", diag}};
}

Json error_report_to_json(const ErrorReport& report) {
  return Json{{"vertex_error", report.vertex_error},
              {"location_error", report.location_error},
              {"vertex_error_sum", report.vertex_error_sum},
              {"location_error_sum", report.location_error_sum},
              {"aligning_motion",
               Json{{"rotation", matrix_to_json(report.aligning_motion.rotation())},
                    {"translation", vector_to_json(report.aligning_motion.translation())},
                    {"reflection", report.aligning_motion.is_reflection()}}},
              {"per_vertex", report.per_vertex},
              {"per_location", report.per_location}};
}

Json ambiguous_pair_to_json(const AmbiguousPair& pair, const CongruenceResult& verdict) {
  Json out{{"format", "echoroom-ambiguity v1"},
           {"a", Json{{"room", room_to_json(pair.room_a)}, {"trajectory", trajectory_to_json(pair.traj_a)}}},
           {"b", Json{{"room", room_to_json(pair.room_b)}, {"trajectory", trajectory_to_json(pair.traj_b)}}},
           {"echoes", matrix_to_json(pair.echoes.entries())},
           {"family_parameter", pair.family_parameter},
           {"max_echo_difference", pair.max_echo_difference},
           {"verdict", verdict.congruent ? "congruent" : "distinct"},
           {"congruence_error", verdict.max_error}};
  return out;
}

std::string echo_csv(const EchoMatrix& d, const CsvMetadata& meta) {
  std::string out = "# echoroom-csv v1\n";
  for (const auto& [key, value] : meta) out += "# " + key + ": " + value + "\n";
  for (std::size_t j = 0; j < d.cols(); ++j) {
    if (d.labels()[j].find_first_of(",\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "wall labels may not contain commas or newlines", j);
    }
    out += (j ? "," : "") + d.labels()[j];
  }
  out += "\n";
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (j) out += ",";
      if (d.observed(i, j)) out += format_double(d(i, j));
    }
    out += "\n";
  }
  return out;
}

EchoMatrix parse_echo_csv(const std::string& text, CsvMetadata* meta) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool versioned = false;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> observed;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(line.substr(1));
      if (!versioned) {
        if (body != "echoroom-csv v1") parse_error("expected '# echoroom-csv v1' header", lineno);
        versioned = true;
        continue;
      }
      const auto colon = body.find(':');
      if (meta && colon != std::string::npos) (*meta)[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
      continue;
    }
    if (!versioned) parse_error("expected '# echoroom-csv v1' header", lineno);
    const auto fields = split_csv(line);
    if (labels.empty()) {
      for (const auto& f : fields) {
        const std::string l = trim(f);
        if (l.empty()) parse_error("empty wall label", lineno);
        labels.push_back(l);
      }
      continue;
    }
    if (fields.size() != labels.size()) {
      parse_error("expected " + std::to_string(labels.size()) + " fields, found " +
                      std::to_string(fields.size()),
                  lineno);
    }
    std::vector<double> row;
    std::vector<bool> seen;
    for (const auto& f : fields) {
      if (trim(f).empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        seen.push_back(false);
      } else {
        row.push_back(parse_field(f, lineno));
        seen.push_back(true);
      }
    }
    values.push_back(std::move(row));
    observed.push_back(std::move(seen));
  }
  if (!versioned) parse_error("missing '# echoroom-csv v1' header");
  if (labels.empty()) parse_error("missing label row");
  if (values.empty()) parse_error("no measurement rows");
  const auto n = static_cast<Eigen::Index>(values.size());
  const auto k = static_cast<Eigen::Index>(labels.size());
  Matrix m(n, k);
  Mask mask(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      m(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      mask(i, j) = observed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return EchoMatrix(std::move(m), std::move(mask), std::move(labels));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "': " + ec.message());
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "': " + e.what());
  }
}

}  // namespace echoroom
