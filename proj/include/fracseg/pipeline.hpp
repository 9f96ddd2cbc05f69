#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "fracseg/error.hpp"
#include "fracseg/features.hpp"
#include "fracseg/io.hpp"
#include "fracseg/kdtree.hpp"
#include "fracseg/orientation.hpp"
#include "fracseg/region_growing.hpp"
#include "fracseg/scenes.hpp"
#include "fracseg/synth.hpp"

namespace fracseg {

/// Table 1 dataset sizes used by `bench --paper-sizes`.
inline const std::vector<std::size_t> kReferenceBenchSizes = {134067, 323562, 484658, 684866, 1096948};

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir = "fracseg_out";
  CloudFormat format = CloudFormat::automatic;
  GrowParams params;
  Point3 viewpoint{};
  unsigned threads = 1;
  std::uint64_t seed = 42;
  bool trace = false;
  bool dump_features = false;
  std::vector<double> theta_range{2.0, 4.0, 6.0, 8.0, 10.0};
  std::vector<double> t_range{5.0, 10.0, 20.0, 30.0};
  std::vector<std::size_t> sizes;
};

struct StageTimes {
  double load_ms = 0.0;
  double index_ms = 0.0;
  double features_ms = 0.0;
  double grow_ms = 0.0;
  double classify_ms = 0.0;
  double summarize_ms = 0.0;
  double write_ms = 0.0;

  double total_ms() const {
    return load_ms + index_ms + features_ms + grow_ms + classify_ms + summarize_ms + write_ms;
  }
};

/// In-memory result of index -> features -> grow -> classify -> summarize.
struct Extraction {
  std::vector<LocalFeatures> features;
  Segmentation segmentation;
  Classification classes;
  RegionSummary summary;
  StageTimes times;

  std::size_t fracture_count() const { return classes.fractures.size(); }

  double mean_region_size() const {
    if (classes.fractures.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& f : classes.fractures) total += f.size();
    return static_cast<double>(total) / static_cast<double>(classes.fractures.size());
  }
};

namespace detail {

template <typename F>
auto timed(double& ms, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<decltype(f())>) {
    f();
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  } else {
    auto r = f();
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
}

// Runs `f`, rethrowing any failure as a StageError naming `stage`.
template <typename F>
auto in_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

inline Extraction extract(const PointCloud& cloud, const GrowParams& params, unsigned threads = 1,
                          bool record_trace = false) {
  Extraction ex;
  const NeighborIndex index = detail::in_stage("index", [&] {
    return detail::timed(ex.times.index_ms, [&] { return NeighborIndex(cloud); });
  });
  ex.features = detail::in_stage("features", [&] {
    return detail::timed(ex.times.features_ms, [&] { return compute_local_features(cloud, index, params.k, threads); });
  });
  GrowOptions opts;
  opts.record_trace = record_trace;
  ex.segmentation = detail::in_stage("grow", [&] {
    return detail::timed(ex.times.grow_ms, [&] { return grow_regions(cloud, ex.features, index, params, opts); });
  });
  ex.classes = detail::in_stage("classify", [&] {
    return detail::timed(ex.times.classify_ms, [&] { return classify_regions(ex.segmentation, params.min_region_size); });
  });
  ex.summary = detail::in_stage("summarize", [&] {
    return detail::timed(ex.times.summarize_ms, [&] { return summarize_regions(cloud, ex.classes.fractures); });
  });
  return ex;
}

inline void validate_config(const RunConfig& cfg) {
  detail::in_stage("config", [&] {
    cfg.params.validate();
    if (cfg.threads == 0) throw std::invalid_argument("threads must be >= 1");
    if (cfg.out_dir.empty()) throw std::invalid_argument("output directory must be given");
    return 0;
  });
}

inline void print_times(std::ostream& log, const StageTimes& t) {
  log << "  load       " << fmt6(t.load_ms) << " ms\n"
      << "  index      " << fmt6(t.index_ms) << " ms\n"
      << "  features   " << fmt6(t.features_ms) << " ms\n"
      << "  grow       " << fmt6(t.grow_ms) << " ms\n"
      << "  classify   " << fmt6(t.classify_ms) << " ms\n"
      << "  summarize  " << fmt6(t.summarize_ms) << " ms\n"
      << "  write      " << fmt6(t.write_ms) << " ms\n"
      << "  total      " << fmt6(t.total_ms()) << " ms\n";
}

struct ExtractReport {
  std::size_t point_count = 0;
  std::size_t fracture_count = 0;
  double mean_region_size = 0.0;
  std::size_t degenerate_regions = 0;
  StageTimes times;
  WriteReport files;
};

/// load -> index -> features -> grow -> classify -> summarize -> write.
inline ExtractReport run_extract(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  double load_ms = 0.0;
  const PointCloud cloud = detail::in_stage("ingest", [&] {
    return detail::timed(load_ms, [&] { return load_points(cfg.input, cfg.format, cfg.viewpoint); });
  });
  Extraction ex = extract(cloud, cfg.params, cfg.threads, cfg.trace);
  ex.times.load_ms = load_ms;

  ExtractReport rep;
  rep.files = detail::in_stage("write", [&] {
    return detail::timed(ex.times.write_ms, [&] {
      WriteReport w = write_outputs(cloud, ex.classes, ex.summary.regions, cfg.out_dir);
      if (cfg.dump_features) {
        write_features_csv(ex.features, cfg.out_dir / "features.csv");
        w.files.push_back(cfg.out_dir / "features.csv");
      }
      if (cfg.trace) {
        write_trace_csv(ex.segmentation.trace, cfg.out_dir / "growth_trace.csv");
        w.files.push_back(cfg.out_dir / "growth_trace.csv");
      }
      return w;
    });
  });
  rep.point_count = cloud.size();
  rep.fracture_count = ex.fracture_count();
  rep.mean_region_size = ex.mean_region_size();
  rep.degenerate_regions = ex.summary.degenerate_count;
  rep.times = ex.times;

  log << "points: " << rep.point_count << "\n"
      << "regions grown: " << ex.segmentation.regions.size() << "\n"
      << "fractures (> " << cfg.params.min_region_size << " points): " << rep.fracture_count << "\n"
      << "mean fracture size: " << fmt6(rep.mean_region_size) << "\n";
  if (rep.degenerate_regions) log << "degenerate regions skipped: " << rep.degenerate_regions << "\n";
  print_times(log, rep.times);
  return rep;
}

struct SweepRow {
  double value = 0.0;
  std::size_t planes = 0;
};

struct SweepResult {
  std::vector<SweepRow> theta;
  std::vector<SweepRow> t;
};

/// Fracture counts for each theta_th (t_th at its base value) and each t_th
/// (theta_th at its base value). Features do not depend on the thresholds and
/// are computed once.
inline SweepResult sweep_counts(const PointCloud& cloud, const GrowParams& base, const std::vector<double>& thetas,
                                const std::vector<double>& ts, unsigned threads = 1) {
  const NeighborIndex index(cloud);
  const auto features = compute_local_features(cloud, index, base.k, threads);
  auto count = [&](const GrowParams& p) {
    const Segmentation seg = grow_regions(cloud, features, index, p);
    return classify_regions(seg, p.min_region_size).fractures.size();
  };
  SweepResult out;
  for (double v : thetas) {
    GrowParams p = base;
    p.theta_th = v;
    out.theta.push_back({v, count(p)});
  }
  for (double v : ts) {
    GrowParams p = base;
    p.t_th = v;
    out.t.push_back({v, count(p)});
  }
  return out;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const char* column, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << column << ",planes\n";
  for (const SweepRow& r : rows) out << fmt6(r.value) << ',' << r.planes << '\n';
  detail::close_checked(out, path);
}

inline SweepResult run_sweep(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  if (cfg.theta_range.empty() || cfg.t_range.empty())
    throw StageError("config", "sweep ranges must be nonempty");
  detail::in_stage("config", [&] {
    for (double v : cfg.theta_range) {
      GrowParams p = cfg.params;
      p.theta_th = v;
      p.validate();
    }
    for (double v : cfg.t_range) {
      GrowParams p = cfg.params;
      p.t_th = v;
      p.validate();
    }
    return 0;
  });
  const PointCloud cloud =
      detail::in_stage("ingest", [&] { return load_points(cfg.input, cfg.format, cfg.viewpoint); });
  SweepResult res = detail::in_stage(
      "sweep", [&] { return sweep_counts(cloud, cfg.params, cfg.theta_range, cfg.t_range, cfg.threads); });
  detail::in_stage("write", [&] {
    detail::ensure_directory(cfg.out_dir);
    write_sweep_csv(res.theta, "theta_th", cfg.out_dir / "sweep_theta.csv");
    write_sweep_csv(res.t, "t_th", cfg.out_dir / "sweep_t.csv");
    return 0;
  });
  for (const auto& r : res.theta) log << "theta_th " << fmt6(r.value) << " -> " << r.planes << " planes\n";
  for (const auto& r : res.t) log << "t_th " << fmt6(r.value) << " -> " << r.planes << " planes\n";
  return res;
}

struct BenchRow {
  std::size_t points = 0;
  double build_ms = 0.0;
  double features_ms = 0.0;
  double grow_ms = 0.0;
  double total_ms = 0.0;
};

/// Times the full pipeline on a synthetic faceted outcrop of the requested size.
inline BenchRow bench_once(std::size_t target_points, const GrowParams& params, std::uint64_t seed,
                           unsigned threads = 1) {
  const auto specs = scenes::facet_specs(target_points);
  const SyntheticScene scene = generate_synthetic(specs, seed);
  const auto t0 = std::chrono::steady_clock::now();
  const Extraction ex = extract(scene.cloud, params, threads);
  BenchRow row;
  row.points = scene.cloud.size();
  row.build_ms = ex.times.index_ms;
  row.features_ms = ex.times.features_ms;
  row.grow_ms = ex.times.grow_ms;
  row.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "points,build_ms,features_ms,grow_ms,total_ms\n";
  for (const BenchRow& r : rows)
    out << r.points << ',' << fmt6(r.build_ms) << ',' << fmt6(r.features_ms) << ',' << fmt6(r.grow_ms) << ','
        << fmt6(r.total_ms) << '\n';
  detail::close_checked(out, path);
}

inline std::vector<BenchRow> run_bench(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  if (cfg.sizes.empty()) throw StageError("config", "no benchmark sizes given");
  for (std::size_t s : cfg.sizes)
    if (s == 0) throw StageError("config", "benchmark sizes must be positive");
  detail::in_stage("write", [&] {
    detail::ensure_directory(cfg.out_dir);
    return 0;
  });
  std::vector<BenchRow> rows;
  for (std::size_t s : cfg.sizes) {
    rows.push_back(detail::in_stage("bench", [&] { return bench_once(s, cfg.params, cfg.seed, cfg.threads); }));
    const BenchRow& r = rows.back();
    log << "points " << r.points << " (target " << s << "): build " << fmt6(r.build_ms) << " ms, features "
        << fmt6(r.features_ms) << " ms, grow " << fmt6(r.grow_ms) << " ms, total " << fmt6(r.total_ms) << " ms\n";
  }
  detail::in_stage("write", [&] {
    write_bench_csv(rows, cfg.out_dir / "bench.csv");
    return 0;
  });
  return rows;
}

}  // namespace fracseg
