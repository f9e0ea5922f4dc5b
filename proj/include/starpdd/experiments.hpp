#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "starpdd/baselines.hpp"
#include "starpdd/channel.hpp"
#include "starpdd/config.hpp"
#include "starpdd/errors.hpp"
#include "starpdd/pdd.hpp"

namespace starpdd {

inline std::string format_csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Runs fn(0..count-1) on up to `jobs` threads. Results must go into
/// independent slots; the first exception is rethrown after all workers
/// finish, so output stays deterministic regardless of scheduling.
template <typename F>
inline void parallel_for(int jobs, int count, F&& fn) {
  if (count <= 0) return;
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << body;
  out.flush();
  if (!out.good()) {
    throw IoError("write to '" + path + "' failed");
  }
}

inline bool scheme_has_trace(SchemeId id) {
  return id == SchemeId::CoupledPdd || id == SchemeId::IndependentStar ||
         id == SchemeId::ConventionalRis;
}

}  // namespace detail

struct ConvergenceRecord {
  SchemeId scheme = SchemeId::CoupledPdd;
  int k = 0;
  TraceRow row;
};

/// Per-iteration traces for the PDD-backed schemes over the configured K
/// values; reproduces the convergence figure. Writes CSV when cfg.out is
/// set and always returns the records.
inline std::vector<ConvergenceRecord> run_convergence(
    const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SchemeId> schemes =
      cfg.schemes_set ? cfg.schemes : std::vector<SchemeId>{SchemeId::CoupledPdd};
  for (SchemeId id : schemes) {
    if (!detail::scheme_has_trace(id)) {
      throw ConfigError(std::string("scheme '") + scheme_name(id) +
                        "' has no iteration trace; converge supports "
                        "coupled_pdd, independent, conventional");
    }
  }

  std::vector<ConvergenceRecord> records;
  for (SchemeId id : schemes) {
    for (int k : cfg.k_values) {
      SystemConfig sys = cfg.system;
      sys.k = k;
      sys.validate();
      const ChannelSet cs = generate_channels(sys, 0);
      SolveOptions opts;
      opts.pdd = cfg.pdd;
      opts.pdd.record_trace = true;
      opts.init_seed = sys.seed;
      opts.ao_amp_levels = cfg.ao_amp_levels;
      opts.ao_phase_levels = cfg.ao_phase_levels;
      const SchemeResult res = solve_scheme(id, cs, sys.pt_watts(), opts);
      validate_scheme_output(id, res.coefficients);
      for (const TraceRow& row : res.summary.trace) {
        records.push_back({id, k, row});
      }
    }
  }

  std::sort(records.begin(), records.end(),
            [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
              const int c =
                  std::string(scheme_name(a.scheme)).compare(scheme_name(b.scheme));
              if (c != 0) return c < 0;
              if (a.k != b.k) return a.k < b.k;
              if (a.row.outer != b.row.outer) return a.row.outer < b.row.outer;
              return a.row.inner < b.row.inner;
            });

  if (!cfg.out.empty()) {
    std::string body =
        "outer_iter,inner_iter,scheme,k,throughput,al_objective,delta,rho";
    for (int i = 0; i < cfg.system.n; ++i) {
      body += ",gap_" + std::to_string(i);
    }
    body += "\n";
    for (const ConvergenceRecord& rec : records) {
      body += std::to_string(rec.row.outer) + "," +
              std::to_string(rec.row.inner) + "," + scheme_name(rec.scheme) +
              "," + std::to_string(rec.k) + "," +
              format_csv_double(rec.row.objective) + "," +
              format_csv_double(rec.row.al) + "," +
              format_csv_double(rec.row.delta) + "," +
              format_csv_double(rec.row.rho);
      for (Eigen::Index i = 0; i < rec.row.phase_gap.size(); ++i) {
        body += "," + format_csv_double(rec.row.phase_gap[i]);
      }
      body += "\n";
    }
    detail::write_text_file(cfg.out, body);
  }
  return records;
}

struct SweepRow {
  int n = 0;
  SchemeId scheme = SchemeId::CoupledPdd;
  double mean_rate = 0.0;
  double std_rate = 0.0;
  int realizations = 0;
};

/// Throughput versus element count, averaged over paired channel
/// realizations: every scheme at a given (n, realization) sees the same
/// ChannelSet and the same initialization seed.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<SchemeId>& schemes = cfg.schemes;
  const int num_n = static_cast<int>(cfg.n_values.size());
  const int num_s = static_cast<int>(schemes.size());
  const int r = cfg.realizations;

  std::vector<std::vector<std::vector<double>>> rates(
      num_n, std::vector<std::vector<double>>(num_s, std::vector<double>(r)));

  parallel_for(cfg.jobs, num_n * r, [&](int task) {
    const int ni = task / r;
    const int ri = task % r;
    SystemConfig sys = cfg.system;
    sys.n = cfg.n_values[ni];
    sys.validate();
    const ChannelSet cs = generate_channels(sys, static_cast<std::uint64_t>(ri));
    SolveOptions opts;
    opts.pdd = cfg.pdd;
    opts.pdd.record_trace = false;
    opts.init_seed = sys.seed + static_cast<std::uint64_t>(ri);
    opts.ao_amp_levels = cfg.ao_amp_levels;
    opts.ao_phase_levels = cfg.ao_phase_levels;
    for (int si = 0; si < num_s; ++si) {
      const SchemeResult res = solve_scheme(schemes[si], cs, sys.pt_watts(),
                                            opts);
      validate_scheme_output(schemes[si], res.coefficients);
      rates[ni][si][ri] = res.rate;
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<size_t>(num_n) * num_s);
  for (int ni = 0; ni < num_n; ++ni) {
    for (int si = 0; si < num_s; ++si) {
      const std::vector<double>& xs = rates[ni][si];
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= r;
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= r;
      SweepRow row;
      row.n = cfg.n_values[ni];
      row.scheme = schemes[si];
      row.mean_rate = mean;
      row.std_rate = std::sqrt(std::max(0.0, var));
      row.realizations = r;
      rows.push_back(row);
    }
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.n != b.n) return a.n < b.n;
    return std::string(scheme_name(a.scheme)).compare(scheme_name(b.scheme)) < 0;
  });

  if (!cfg.out.empty()) {
    std::string body = "n,scheme,mean_rate,std_rate,realizations\n";
    for (const SweepRow& row : rows) {
      body += std::to_string(row.n) + "," + scheme_name(row.scheme) + "," +
              format_csv_double(row.mean_rate) + "," +
              format_csv_double(row.std_rate) + "," +
              std::to_string(row.realizations) + "\n";
    }
    detail::write_text_file(cfg.out, body);
  }
  return rows;
}

}  // namespace starpdd
