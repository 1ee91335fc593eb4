#include "echoroom/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "echoroom/echo_sim.hpp"
#include "echoroom/error.hpp"
#include "echoroom/random.hpp"

namespace echoroom {

namespace {

constexpr double kPi = std::numbers::pi;

Room room_from_normals(std::vector<Eigen::Vector2d> normals, const std::vector<double>& offsets) {
  std::vector<std::size_t> order(normals.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  auto angle = [&](std::size_t j) {
    const double a = std::atan2(normals[j].y(), normals[j].x());
    return a < 0.0 ? a + 2.0 * kPi : a;
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return angle(a) < angle(b); });
  std::vector<Wall> walls;
  for (std::size_t j : order) walls.emplace_back(from2d(normals[j].normalized()), offsets[j]);
  Room room(std::move(walls));
  validate_room(room);
  return room;
}

struct Bounds {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;
};

Bounds bounds_of(const Room& room) {
  const auto v = room_vertices(room);
  Bounds b{v.front(), v.front()};
  for (const auto& p : v) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

double clearance(const Room& room, const Eigen::Vector2d& p) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& w : room.walls()) m = std::min(m, w.distance(from2d(p)));
  return m;
}

std::size_t parse_count(const std::string& s, const std::string& spec) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v <= 0) throw Error(ErrorCode::InvalidArgument, "bad count in '" + spec + "'");
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(const std::string& s, const std::string& spec) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.front() == '-') {
    throw Error(ErrorCode::InvalidArgument, "bad seed in '" + spec + "'");
  }
  return v;
}

double parse_real(const std::string& s, const std::string& spec) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "bad number in '" + spec + "'");
  }
  return v;
}

std::vector<std::string> tokens(const std::string& spec) {
  std::istringstream in(spec);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty generator spec");
  return out;
}

void expect_args(const std::vector<std::string>& t, std::size_t n, const std::string& spec) {
  if (t.size() != n + 1) {
    throw Error(ErrorCode::InvalidArgument,
                "'" + t.front() + "' takes " + std::to_string(n) + " argument(s): '" + spec + "'");
  }
}

}  // namespace

Room square_room(double side) { return rect_room(side, side); }

Room rect_room(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rectangle sides must be positive");
  }
  return room_from_vertices({{0.0, 0.0}, {width, 0.0}, {width, height}, {0.0, height}});
}

Room parallelogram_room(double alpha, double beta) {
  if (std::abs(std::sin(alpha - beta)) < 1e-9) {
    throw Error(ErrorCode::DegenerateShear, "parallelogram normals are parallel");
  }
  const Eigen::Vector2d a(std::cos(alpha), std::sin(alpha));
  const Eigen::Vector2d b(std::cos(beta), std::sin(beta));
  return room_from_normals({a, b, -a, -b}, {1.0, 1.0, 1.0, 1.0});
}

Room regular_room(std::size_t k, double circumradius) {
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "a regular room needs at least 3 walls");
  std::vector<Eigen::Vector2d> v;
  for (std::size_t j = 0; j < k; ++j) {
    const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(k) - kPi / 2.0;
    v.emplace_back(circumradius * std::cos(t), circumradius * std::sin(t));
  }
  return room_from_vertices(v);
}

Room random_convex_room(std::size_t k, std::uint64_t seed) {
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "a room needs at least 3 walls");
  SplitMix64 rng(stream_seed(seed, {0x726f6f6dULL, k}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double spacing = 2.0 * kPi / static_cast<double>(k);
  for (;;) {
    const double start = 2.0 * kPi * unit(rng);
    std::vector<double> angles;
    for (std::size_t j = 0; j < k; ++j) {
      angles.push_back(start + spacing * (static_cast<double>(j) + 0.6 * (unit(rng) - 0.5)));
    }
    double max_gap = 0.0;
    double min_gap = 2.0 * kPi;
    for (std::size_t j = 0; j < k; ++j) {
      const double next = j + 1 < k ? angles[j + 1] : angles[0] + 2.0 * kPi;
      max_gap = std::max(max_gap, next - angles[j]);
      min_gap = std::min(min_gap, next - angles[j]);
    }
    if (max_gap > 0.9 * kPi || min_gap < 0.25 * spacing) continue;
    std::vector<Eigen::Vector2d> v;
    for (double t : angles) v.emplace_back(std::cos(t), std::sin(t));
    return room_from_vertices(v);
  }
}

Trajectory random_interior_trajectory(const Room& room, std::size_t n, std::uint64_t seed,
                                      double margin) {
  require_planar(room.dimension(), "random_interior_trajectory");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least one point");
  const Bounds b = bounds_of(room);
  SplitMix64 rng(stream_seed(seed, {0x7472616aULL, n}));
  std::uniform_real_distribution<double> ux(b.lo.x(), b.hi.x());
  std::uniform_real_distribution<double> uy(b.lo.y(), b.hi.y());
  std::vector<Vector> pts;
  std::size_t attempts = 0;
  while (pts.size() < n) {
    if (++attempts > 1000000) {
      throw Error(ErrorCode::InvalidArgument, "room is too thin for the requested margin");
    }
    const Eigen::Vector2d p(ux(rng), uy(rng));
    if (clearance(room, p) >= margin) pts.push_back(from2d(p));
  }
  return Trajectory(std::move(pts));
}

Trajectory collinear_trajectory(const Room& room, std::size_t n, std::uint64_t seed, double margin) {
  require_planar(room.dimension(), "collinear_trajectory");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least one point");
  const Eigen::Vector2d anchor = as2d(random_interior_trajectory(room, 1, seed, margin).point(0));
  SplitMix64 rng(stream_seed(seed, {0x6c696e65ULL, n}));
  const double phi = std::uniform_real_distribution<double>(0.0, kPi)(rng);
  const Eigen::Vector2d u(std::cos(phi), std::sin(phi));
  // Chord {anchor + t u} restricted to clearance >= margin.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& w : room.walls()) {
    const Eigen::Vector2d nw = as2d(w.normal());
    const double slack = w.offset() - margin - nw.dot(anchor);
    const double rate = nw.dot(u);
    if (rate > 1e-12) hi = std::min(hi, slack / rate);
    if (rate < -1e-12) lo = std::max(lo, slack / rate);
  }
  std::vector<Vector> pts;
  const double a = lo + 0.1 * (hi - lo);
  const double b = hi - 0.1 * (hi - lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back(from2d(anchor + t * u));
  }
  return Trajectory(std::move(pts));
}

Room room_from_spec(const std::string& spec) {
  const auto t = tokens(spec);
  const std::string& name = t.front();
  if (name == "square") {
    expect_args(t, 0, spec);
    return square_room();
  }
  if (name == "rect") {
    expect_args(t, 2, spec);
    return rect_room(parse_real(t[1], spec), parse_real(t[2], spec));
  }
  if (name == "parallelogram") {
    expect_args(t, 2, spec);
    return parallelogram_room(parse_real(t[1], spec) * kPi / 180.0, parse_real(t[2], spec) * kPi / 180.0);
  }
  if (name.rfind("regular-", 0) == 0) {
    expect_args(t, 0, spec);
    return regular_room(parse_count(name.substr(8), spec));
  }
  if (name == "random-convex") {
    expect_args(t, 2, spec);
    return random_convex_room(parse_count(t[1], spec), parse_seed(t[2], spec));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown room generator '" + name + "'");
}

Trajectory trajectory_from_spec(const Room& room, const std::string& spec) {
  const auto t = tokens(spec);
  const std::string& name = t.front();
  if (name == "random-interior") {
    expect_args(t, 2, spec);
    return random_interior_trajectory(room, parse_count(t[1], spec), parse_seed(t[2], spec));
  }
  if (name == "collinear") {
    expect_args(t, 2, spec);
    return collinear_trajectory(room, parse_count(t[1], spec), parse_seed(t[2], spec));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown trajectory generator '" + name + "'");
}

}  // namespace echoroom
