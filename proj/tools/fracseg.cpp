// fracseg: extract planar fracture faces from outcrop point clouds.
//
//   fracseg extract --input cloud.xyz --out-dir out
//   fracseg sweep   --input cloud.xyz --theta-range 2,4,6,8,10 --t-range 5,10,20,30
//   fracseg bench   --paper-sizes
//   fracseg synth   --scene two-plane --out-dir data

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "fracseg/fracseg.hpp"

namespace {

using namespace fracseg;

Point3 parse_viewpoint(const std::string& text) {
  std::vector<double> v;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      double d = 0.0;
      if (!detail::parse_double(detail::trim(cur), d)) throw CLI::ValidationError("--viewpoint", "expected X,Y,Z");
      v.push_back(d);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (v.size() != 3) throw CLI::ValidationError("--viewpoint", "expected X,Y,Z");
  return {v[0], v[1], v[2]};
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& viewpoint, std::string& format) {
  sub->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--k", cfg.params.k, "Neighbors per point (features and growth)")->capture_default_str();
  sub->add_option("--theta-th", cfg.params.theta_th, "Normal deviation threshold, degrees")->capture_default_str();
  sub->add_option("--t-th", cfg.params.t_th, "Seed promotion (transmission) threshold, degrees")->capture_default_str();
  sub->add_option("--min-region-size", cfg.params.min_region_size,
                  "Regions with more than this many points are fractures")
      ->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads for feature estimation")->capture_default_str();
  sub->add_option("--viewpoint", viewpoint, "Scanner position X,Y,Z")->capture_default_str();
  sub->add_option("--format", format, "Input format")
      ->check(CLI::IsMember({"auto", "xyz", "ply"}))
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed for synthetic data")->capture_default_str();
}

CloudFormat to_format(const std::string& f) {
  if (f == "xyz") return CloudFormat::xyz;
  if (f == "ply") return CloudFormat::ply;
  return CloudFormat::automatic;
}

int run_synth(const std::string& scene, std::size_t planes, std::size_t points, const RunConfig& cfg) {
  SyntheticScene s;
  if (scene == "two-plane") {
    s = generate_synthetic(scenes::two_plane_specs(), cfg.seed);
  } else if (scene == "dihedral") {
    s = generate_synthetic(scenes::dihedral_specs(), cfg.seed);
  } else if (scene == "random") {
    s = generate_synthetic(scenes::random_plane_specs(planes, cfg.seed), cfg.seed);
  } else if (scene == "facets") {
    s = generate_synthetic(scenes::facet_specs(points), cfg.seed);
  } else {
    s.cloud = scene == "curved" ? scenes::curved_sweep_scene(cfg.seed) : scenes::undulating_scene(cfg.seed);
    s.labels.assign(s.cloud.size(), -1);
  }
  // Shift so the scanner sits at the origin, the default viewpoint of `extract`.
  const Point3 vp = s.cloud.viewpoint;
  for (Point3& p : s.cloud.points) p -= vp;
  s.cloud.viewpoint = {};

  detail::ensure_directory(cfg.out_dir);
  write_xyz(s.cloud, cfg.out_dir / "cloud.xyz");
  write_labels_csv(s.cloud, s.labels, cfg.out_dir / "truth_labels.csv", "label");
  std::cerr << "wrote " << s.cloud.size() << " points to " << (cfg.out_dir / "cloud.xyz").string()
            << " (scanner moved from " << fmt6(vp.x) << "," << fmt6(vp.y) << "," << fmt6(vp.z)
            << " to the origin)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar fracture extraction from outcrop point clouds by region growing"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string viewpoint = "0,0,0";
  std::string format = "auto";
  bool paper_sizes = false;
  std::string scene = "two-plane";
  std::size_t planes = 10;
  std::size_t points = 100000;

  auto* extract = app.add_subcommand("extract", "Segment a cloud and write labels, regions and poles");
  extract->add_option("--input", cfg.input, "Point cloud (.xyz or ASCII .ply)")->required();
  add_common(extract, cfg, viewpoint, format);
  extract->add_flag("--trace", cfg.trace, "Write growth_trace.csv");
  extract->add_flag("--dump-features", cfg.dump_features, "Write features.csv");

  auto* sweep = app.add_subcommand("sweep", "Fracture count versus theta_th and t_th");
  sweep->add_option("--input", cfg.input, "Point cloud (.xyz or ASCII .ply)")->required();
  add_common(sweep, cfg, viewpoint, format);
  sweep->add_option("--theta-range", cfg.theta_range, "theta_th values, degrees")->delimiter(',')->capture_default_str();
  sweep->add_option("--t-range", cfg.t_range, "t_th values, degrees")->delimiter(',')->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time the pipeline on synthetic outcrops of given sizes");
  add_common(bench, cfg, viewpoint, format);
  auto* sizes_opt = bench->add_option("--sizes", cfg.sizes, "Point counts")->delimiter(',');
  auto* paper_opt = bench->add_flag("--paper-sizes", paper_sizes, "Use the five reference dataset sizes");
  sizes_opt->excludes(paper_opt);

  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled scene (cloud.xyz, truth_labels.csv)");
  add_common(synth, cfg, viewpoint, format);
  synth->add_option("--scene", scene, "Scene kind")
      ->check(CLI::IsMember({"two-plane", "dihedral", "random", "facets", "curved", "undulating"}))
      ->capture_default_str();
  synth->add_option("--planes", planes, "Plane count for --scene random")->capture_default_str();
  synth->add_option("--points", points, "Target point count for --scene facets")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.viewpoint = parse_viewpoint(viewpoint);
    cfg.format = to_format(format);
    if (*extract) {
      run_extract(cfg, std::cerr);
    } else if (*sweep) {
      run_sweep(cfg, std::cerr);
    } else if (*bench) {
      if (paper_sizes) cfg.sizes = kReferenceBenchSizes;
      if (cfg.sizes.empty()) cfg.sizes = {10000};
      run_bench(cfg, std::cerr);
    } else if (*synth) {
      return run_synth(scene, planes, points, cfg);
    }
  } catch (const StageError& e) {
    std::cerr << "fracseg: error in stage " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fracseg: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
