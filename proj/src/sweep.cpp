#include "echoroom/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "echoroom/error.hpp"
#include "echoroom/generators.hpp"
#include "echoroom/io.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/random.hpp"

namespace echoroom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

SweepRow run_trial(const Room& room, const Trajectory& traj, const SweepConfig& cfg, std::size_t k,
                   double sigma, int t) {
  SweepRow row;
  row.sigma_index = k;
  row.sigma = sigma;
  row.trial = t;
  row.seed = stream_seed(cfg.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)});
  try {
    SimConfig sim;
    sim.noise_sigma = sigma;
    sim.rng_seed = row.seed;
    const EchoMatrix d = echo_matrix(room, traj, sim);
    PipelineOptions opts = cfg.pipeline;
    opts.stress.rng_seed = row.seed;
    opts.stress.workers = 1;
    if (sigma > 0.0) opts.algebraic.noise_sigma = sigma;
    const PipelineResult res = solve(d, opts);
    const ErrorReport err = align_and_score(room, traj, res.reconstruction.room, res.reconstruction.trajectory);
    row.cost = res.reconstruction.cost;
    row.vertex_error = err.vertex_error;
    row.location_error = err.location_error;
    row.vertex_error_sum = err.vertex_error_sum;
    row.location_error_sum = err.location_error_sum;
    row.converged = res.converged;
  } catch (const Error& e) {
    row.status = to_string(e.code());
    row.cost = row.vertex_error = row.location_error = kInf;
    row.vertex_error_sum = row.location_error_sum = kInf;
  }
  return row;
}

std::string bool_field(bool b) { return b ? "1" : "0"; }

}  // namespace

void SweepConfig::validate() const {
  if (!(sigma_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma step must be positive");
  if (!(sigma_start >= 0.0) || !(sigma_end >= sigma_start)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 <= sigma start <= sigma end");
  }
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (room.has_value() != trajectory.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "room and trajectory files must be given together");
  }
}

std::vector<double> SweepConfig::sigmas() const {
  const auto count = static_cast<std::size_t>(std::floor((sigma_end - sigma_start) / sigma_step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    // Rounded so grid values print as written (0.015, not 0.015000000000000001).
    out.push_back(std::round((sigma_start + static_cast<double>(k) * sigma_step) * 1e12) / 1e12);
  }
  return out;
}

int effective_workers(int requested) {
  int n = std::max(requested, 1);
  if (const char* env = std::getenv("ECHOROOM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

SweepResult run_sweep(const SweepConfig& cfg, const std::atomic<bool>* cancel,
                      const std::function<void(std::size_t, std::size_t)>& progress) {
  cfg.validate();
  const Room room = cfg.room ? *cfg.room : room_from_spec(cfg.room_spec);
  const Trajectory traj = cfg.trajectory ? *cfg.trajectory : trajectory_from_spec(room, cfg.traj_spec);
  const Matrix clean = echo_matrix(room, traj).entries();
  const double signal_rms = std::sqrt(clean.squaredNorm() / static_cast<double>(clean.size()));

  const auto sigmas = cfg.sigmas();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = sigmas.size() * trials;
  std::vector<std::optional<SweepRow>> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      if (cancel && cancel->load()) return;
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t k = idx / trials;
      const int t = static_cast<int>(idx % trials);
      slots[idx] = run_trial(room, traj, cfg, k, sigmas[k], t);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, total);
      }
    }
  };

  const int workers = std::min<int>(effective_workers(cfg.workers), static_cast<int>(std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          worker();
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SweepResult result;
  for (auto& s : slots) {
    if (s) {
      result.rows.push_back(std::move(*s));
    } else {
      result.interrupted = true;
    }
  }
  result.summary = summarize(result.rows, signal_rms);
  return result;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SweepSummaryRow> summarize(const std::vector<SweepRow>& rows, double signal_rms) {
  std::vector<SweepSummaryRow> out;
  std::size_t a = 0;
  while (a < rows.size()) {
    std::size_t b = a;
    while (b < rows.size() && rows[b].sigma_index == rows[a].sigma_index) ++b;
    SweepSummaryRow s;
    s.sigma = rows[a].sigma;
    std::vector<double> ve;
    std::vector<double> le;
    for (std::size_t i = a; i < b; ++i) {
      ++s.trials;
      if (rows[i].converged) ++s.converged;
      if (rows[i].status != "ok") ++s.failed;
      ve.push_back(rows[i].vertex_error);
      le.push_back(rows[i].location_error);
    }
    s.snr_db = s.sigma > 0.0 ? 20.0 * std::log10(signal_rms / s.sigma) : kInf;
    s.vertex_median = quantile(ve, 0.5);
    s.vertex_mean = mean_of(ve);
    s.vertex_q25 = quantile(ve, 0.25);
    s.vertex_q75 = quantile(ve, 0.75);
    s.location_median = quantile(le, 0.5);
    s.location_mean = mean_of(le);
    s.location_q25 = quantile(le, 0.25);
    s.location_q75 = quantile(le, 0.75);
    out.push_back(s);
    a = b;
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "# echoroom-csv v1\n"
      "# kind: sweep-trials\n"
      "sigma_index,sigma,trial,seed,cost,vertex_error,location_error,vertex_error_sum,"
      "location_error_sum,converged,status\n";
  for (const auto& r : result.rows) {
    out += std::to_string(r.sigma_index) + "," + format_double(r.sigma) + "," + std::to_string(r.trial) +
           "," + std::to_string(r.seed) + "," + format_double(r.cost) + "," +
           format_double(r.vertex_error) + "," + format_double(r.location_error) + "," +
           format_double(r.vertex_error_sum) + "," + format_double(r.location_error_sum) + "," +
           bool_field(r.converged) + "," + r.status + "\n";
  }
  return out;
}

std::string sweep_summary_csv(const SweepResult& result) {
  std::string out =
      "# echoroom-csv v1\n"
      "# kind: sweep-summary\n"
      "# snr_db convention: 20*log10(rms(D)/sigma) over the noiseless echo matrix\n"
      "# failed trials count as infinite error\n"
      "sigma,trials,converged,failed,snr_db,vertex_median,vertex_mean,vertex_q25,vertex_q75,"
      "location_median,location_mean,location_q25,location_q75\n";
  for (const auto& s : result.summary) {
    out += format_double(s.sigma) + "," + std::to_string(s.trials) + "," + std::to_string(s.converged) + "," +
           std::to_string(s.failed) + "," + format_double(s.snr_db) + "," + format_double(s.vertex_median) +
           "," + format_double(s.vertex_mean) + "," + format_double(s.vertex_q25) + "," +
           format_double(s.vertex_q75) + "," + format_double(s.location_median) + "," +
           format_double(s.location_mean) + "," + format_double(s.location_q25) + "," +
           format_double(s.location_q75) + "\n";
  }
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "spearman needs two equal-length samples of size >= 2");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t a = 0; a < idx.size();) {
      std::size_t b = a;
      while (b + 1 < idx.size() && v[idx[b + 1]] == v[idx[a]]) ++b;
      const double avg = 0.5 * static_cast<double>(a + b) + 1.0;
      for (std::size_t i = a; i <= b; ++i) r[idx[i]] = avg;
      a = b + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace echoroom
