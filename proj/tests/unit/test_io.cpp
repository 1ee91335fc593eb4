#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "echoroom/error.hpp"
#include "echoroom/io.hpp"
#include "echoroom/stress_solver.hpp"
#include "oracles.hpp"

using namespace echoroom;

TEST_CASE("format_double round-trips") {
  SplitMix64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 1000; ++t) {
    const double v = u(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("echo CSV: write and parse") {
  const auto cfg = oracle::random_config(1, 5, 6);
  SimConfig sim;
  sim.noise_sigma = 0.05;
  sim.rng_seed = 3;
  const EchoMatrix d = echo_matrix(cfg.room, cfg.traj, sim);
  const std::string text = echo_csv(d, {{"sigma", "0.05"}, {"seed", "3"}});
  CHECK(text.rfind("# echoroom-csv v1\n", 0) == 0);
  CsvMetadata meta;
  const EchoMatrix back = parse_echo_csv(text, &meta);
  CHECK(meta.at("sigma") == "0.05");
  CHECK(meta.at("seed") == "3");
  CHECK(back.labels() == d.labels());
  CHECK((back.entries() - d.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(echo_csv(back, meta) == text);
}

TEST_CASE("echo CSV: missing entries") {
  const std::string text =
      "# echoroom-csv v1\n"
      "north,east,south\n"
      "0.25,0.5,\n"
      ",0.125,1\r\n";
  const EchoMatrix d = parse_echo_csv(text);
  CHECK(d.rows() == 2);
  CHECK(d.labels()[0] == "north");
  CHECK_FALSE(d.observed(0, 2));
  CHECK_FALSE(d.observed(1, 0));
  CHECK(d(1, 2) == 1.0);
  CHECK(d.observed_count() == 4);
  CHECK(echo_csv(d) == "# echoroom-csv v1\nnorth,east,south\n0.25,0.5,\n,0.125,1\n");
}

TEST_CASE("echo CSV: parse errors name the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_echo_csv(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return e.index().value_or(0);
    }
    FAIL("expected ParseError");
    return 0;
  };
  CHECK(line_of("a,b,c\n1,2,3\n") == 1);
  CHECK(line_of("# echoroom-csv v1\na,b,c\n1,2\n") == 3);
  CHECK(line_of("# echoroom-csv v1\na,b,c\n1,x,3\n") == 3);
  CHECK(line_of("# echoroom-csv v1\na,b,c\n1,2,3\n1,nan,3\n") == 4);
  CHECK(line_of("# echoroom-csv v1\na,,c\n") == 2);
  CHECK_THROWS_AS(parse_echo_csv("# echoroom-csv v1\na,b,c\n"), Error);
}

TEST_CASE("geometry JSON: room and trajectory round trip") {
  const auto cfg = oracle::random_config(2, 6, 4);
  const Room room(cfg.room.walls(), {"a", "b", "c", "d", "e", "f"});
  const Json jr = room_to_json(room);
  CHECK(jr["walls"].size() == 6);
  CHECK(jr["vertices"].size() == 6);
  const Room back = room_from_json(Json::parse(jr.dump()));
  CHECK(back.labels() == room.labels());
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK((back.wall(j).normal() - room.wall(j).normal()).norm() == 0.0);
    CHECK(back.wall(j).offset() == room.wall(j).offset());
  }
  const Trajectory t = trajectory_from_json(Json::parse(trajectory_to_json(cfg.traj).dump()));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK((t.point(i) - cfg.traj.point(i)).norm() == 0.0);
}

TEST_CASE("geometry JSON: vertex form, nesting and bad input") {
  const Json doc = Json::parse(R"({"room": {"vertices": [[0,0],[2,0],[2,1],[0,1]], "labels": ["s","e","n","w"]},
                                   "trajectory": [[0.5, 0.5], [1.5, 0.25]]})");
  const Room room = room_from_json(doc);
  CHECK(room.size() == 4);
  CHECK(room.label(2) == "n");
  CHECK(std::abs(room.wall(1).offset() - 2.0) < 1e-15);
  CHECK(trajectory_from_json(doc).size() == 2);
  CHECK_THROWS_AS(room_from_json(Json::parse(R"({"walls": [{"normal": "x", "offset": 1}]})")), Error);
  try {
    room_from_json(Json::parse(R"({"dimension": 3, "walls": []})"));
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDimension);
  }
  CHECK_THROWS_AS(room_from_json(Json::parse(R"({"vertices": [[0,0],[1,1],[1,0]]})")), Error);
}

TEST_CASE("reconstruction JSON carries residuals and diagnostics") {
  const auto cfg = oracle::random_config(3, 4, 5);
  SolverOptions opts;
  opts.restarts = 4;
  const Reconstruction rec = solve_stress(StressProblem(echo_matrix(cfg.room, cfg.traj)), opts);
  const Json j = reconstruction_to_json(rec);
  CHECK(j["room"]["walls"].size() == 4);
  CHECK(j["trajectory"]["points"].size() == 5);
  CHECK(j["residuals"].size() == 5);
  CHECK(j["diagnostics"]["restarts"].size() == 4);
  CHECK(j["diagnostics"]["method"] == "stress");
  CHECK(j["cost"].get<double>() == rec.cost);
}

TEST_CASE("matrix_to_json writes NaN as null") {
  Matrix m(1, 2);
  m << std::numeric_limits<double>::quiet_NaN(), 2.0;
  const Json j = matrix_to_json(m);
  CHECK(j[0][0].is_null());
  CHECK(j[0][1] == 2.0);
}

TEST_CASE("text files are written atomically and read back") {
  const auto dir = std::filesystem::temp_directory_path() / "echoroom_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.txt").string();
  write_text_file(path, "hello\n");
  write_text_file(path, "again\n");
  CHECK(read_text_file(path) == "again\n");
  CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), Error);
  write_text_file((dir / "bad.json").string(), "{not json");
  CHECK_THROWS_AS(read_json_file((dir / "bad.json").string()), Error);
  std::filesystem::remove_all(dir);
}
