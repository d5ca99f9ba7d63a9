#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pelletseg/analysis.hpp"
#include "pelletseg/config.hpp"
#include "pelletseg/dataset.hpp"
#include "pelletseg/io.hpp"
#include "pelletseg/labels.hpp"
#include "pelletseg/metrics.hpp"
#include "pelletseg/postproc.hpp"
#include "pelletseg/report.hpp"
#include "pelletseg/targets.hpp"

namespace pelletseg::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Usage problems detected after CLI11 parsing (missing --seed, etc.).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_config_options(CLI::App* sub, ConfigOptions& opts) {
  sub->add_option("--config", opts.config_path, "Flat key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--set", opts.sets, "Override a configuration key (key=value), repeatable");
}

void add_override(CLI::App* sub, ConfigOptions& opts, const std::string& flag, const std::string& key,
                  const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
}

PipelineConfig effective_config(const ConfigOptions& opts) {
  PipelineConfig cfg = opts.config_path.empty() ? PipelineConfig{} : load_config(opts.config_path);
  for (const auto& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : opts.overrides) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

void print_config(std::ostream& err, const PipelineConfig& cfg) {
  err << "# effective config (hash " << config_hash(cfg) << ")\n" << config_to_text(cfg);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthOptions {
  ConfigOptions cfg;
  std::string out;
  int rows = 1000;
  int cols = 1000;
  int n_objects = 50;
  double radius_min = 12.0;
  double radius_max = 24.0;
  int min_gap = 3;
  std::string class_mix = "0.55,0.2,0.1,0.15";
  int count = 1;
  int jobs = 1;
};

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = effective_config(o.cfg);
  if (!cfg.seed) throw UsageError("synth requires --seed");
  print_config(err, cfg);
  SynthParams params;
  params.rows = o.rows;
  params.cols = o.cols;
  params.n_objects = o.n_objects;
  params.radius_min = o.radius_min;
  params.radius_max = o.radius_max;
  params.min_gap = o.min_gap;
  const auto mix = parse_doubles(o.class_mix, "--class-mix");
  if (mix.size() != params.class_mix.size()) throw UsageError("--class-mix needs four probabilities");
  std::copy(mix.begin(), mix.end(), params.class_mix.begin());
  if (o.count < 1) throw UsageError("--count must be >= 1");

  const fs::path root(o.out);
  fs::create_directories(root);
  std::vector<ordered_json> summaries(o.count);
  parallel_for(static_cast<std::size_t>(o.count), o.jobs, [&](std::size_t i) {
    const std::uint64_t seed = *cfg.seed + i;
    const SynthScene scene = synth_scene(seed, params);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04zu", i);
    const fs::path dir = o.count == 1 ? root : root / name;
    fs::create_directories(dir);
    io::write_label_map(scene.labels, dir / "labels.png");
    io::write_class_map(scene.classes, dir / "classes.png");
    io::write_rgb(scene.rgb, dir / "image.png");
    ordered_json objects = ordered_json::array();
    for (std::size_t k = 0; k < scene.centers.size(); ++k) {
      objects.push_back({{"id", k + 1},
                         {"class", class_name(scene.object_classes[k])},
                         {"center", {scene.centers[k].row, scene.centers[k].col}}});
    }
    ordered_json meta = {{"provenance", to_json(make_provenance(cfg, {}))},
                         {"seed", seed},
                         {"rows", params.rows},
                         {"cols", params.cols},
                         {"requested", params.n_objects},
                         {"placed", scene.placed},
                         {"incomplete", scene.incomplete},
                         {"objects", objects}};
    io::write_text_atomic(dir / "scene.json", dump(meta));
    summaries[i] = {{"dir", dir.string()}, {"seed", seed}, {"placed", scene.placed}, {"incomplete", scene.incomplete}};
  });
  out << dump(ordered_json(summaries));
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenTargetsOptions {
  ConfigOptions cfg;
  std::string labels;
  std::string classes;
  std::string out;
  bool expand = false;
};

int cmd_gen_targets(const GenTargetsOptions& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = effective_config(o.cfg);
  LabelMap labels = io::read_label_map(o.labels);
  ClassMap classes;
  if (!o.classes.empty()) {
    classes = io::read_class_map(o.classes);
    require_same_extent(labels, classes, "gen-targets (labels vs classes)");
  } else {
    classes = ClassMap(labels.rows(), labels.cols(), 1, 0);
    for (std::size_t i = 0; i < labels.data().size(); ++i) {
      if (labels.data()[i] != 0) classes.data()[i] = static_cast<std::uint8_t>(PelletClass::Nice);
    }
  }
  if (o.expand) {
    std::map<Label, std::uint8_t> class_of;
    for (std::size_t i = 0; i < labels.data().size(); ++i) {
      if (labels.data()[i] != 0) class_of.emplace(labels.data()[i], classes.data()[i]);
    }
    labels = expand_labels(labels, cfg.expansion_radius_px);
    for (std::size_t i = 0; i < labels.data().size(); ++i) {
      if (labels.data()[i] != 0) classes.data()[i] = class_of[labels.data()[i]];
    }
  }
  const RayFan fan = ray_directions(cfg.n_rays);
  PredictionMaps maps{object_probability(labels), star_distances(labels, fan), one_hot_types(classes, kNumClasses)};
  const fs::path dir(o.out);
  io::write_maps(maps, dir);
  if (o.expand) io::write_label_map(labels, dir / "labels_expanded.png");

  std::vector<std::string> inputs = {o.labels};
  if (!o.classes.empty()) inputs.push_back(o.classes);
  out << dump({{"provenance", to_json(make_provenance(cfg, inputs))},
               {"rows", labels.rows()},
               {"cols", labels.cols()},
               {"n_rays", cfg.n_rays},
               {"instances", instance_extents(labels).size()},
               {"expanded", o.expand}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct PostprocessOptions {
  ConfigOptions cfg;
  std::string maps;
  std::string out;
  std::string classes_out;
};

// A tiles.txt manifest inside the maps directory switches to tiled input:
//   rows=<H>  cols=<W>  and one "tile <row> <col> <subdir>" line per tile.
PredictionMaps read_tiled_maps(const fs::path& dir, const PipelineConfig& cfg) {
  std::ifstream in(dir / "tiles.txt");
  int rows = -1, cols = -1;
  std::vector<Tile> tiles;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head.rfind("rows=", 0) == 0) {
      rows = std::stoi(head.substr(5));
    } else if (head.rfind("cols=", 0) == 0) {
      cols = std::stoi(head.substr(5));
    } else if (head == "tile") {
      Tile t;
      std::string sub;
      if (!(ls >> t.offset.row >> t.offset.col >> sub)) throw FormatError("tiles.txt: malformed tile line");
      t.maps = io::read_maps(dir / sub, cfg.n_rays);
      tiles.push_back(std::move(t));
    }
  }
  if (rows < 1 || cols < 1) throw FormatError("tiles.txt: rows= and cols= are required");
  const TileLayout layout = make_tile_layout(rows, cols, cfg.tile_h, cfg.tile_w, cfg.tile_stride, cfg.pyramid_floor);
  return blend_tiles(tiles, layout, rows, cols);
}

int cmd_postprocess(const PostprocessOptions& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = effective_config(o.cfg);
  const fs::path dir(o.maps);
  const PredictionMaps maps = fs::exists(dir / "tiles.txt") ? read_tiled_maps(dir, cfg) : io::read_maps(dir, cfg.n_rays);
  const RayFan fan = ray_directions(cfg.n_rays);
  const InstanceMap inst =
      postprocess(maps, fan, {cfg.prob_threshold, cfg.nms_iou_threshold, cfg.candidate_stride});
  io::write_label_map(inst.labels, o.out);
  if (!o.classes_out.empty()) {
    ClassMap classes(inst.labels.rows(), inst.labels.cols(), 1, 0);
    for (std::size_t i = 0; i < classes.data().size(); ++i) {
      const Label id = inst.labels.data()[i];
      if (id != 0) classes.data()[i] = static_cast<std::uint8_t>(inst.records[id - 1].class_id);
    }
    io::write_class_map(classes, o.classes_out);
  }
  out << dump({{"provenance", to_json(make_provenance(cfg, {o.maps}))},
               {"count", inst.records.size()},
               {"instances", to_json(inst)}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct MeasureOptions {
  ConfigOptions cfg;
  std::string instances;
  std::string maps;
  std::string csv;
};

int cmd_measure(const MeasureOptions& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = effective_config(o.cfg);
  if (!cfg.mm_per_px) throw UsageError("measure requires --mm-per-px (or mm_per_px in the config)");
  const LabelMap labels = io::read_label_map(o.instances);
  const PredictionMaps maps = io::read_maps(o.maps);
  const auto instances = analyze_instances(labels, maps.type_scores, *cfg.mm_per_px);
  const SizeReport report = size_report(instances, cfg.bin_edges, cfg.measured_classes);
  if (!o.csv.empty()) io::write_text_atomic(o.csv, instances_csv(instances));

  ordered_json list = ordered_json::array();
  for (const auto& inst : instances) {
    list.push_back({{"id", inst.id},
                    {"class", class_name(inst.cls)},
                    {"color", class_color(inst.cls)},
                    {"diameter_px", inst.diameter_px ? ordered_json(*inst.diameter_px) : ordered_json(nullptr)},
                    {"diameter_mm", inst.diameter_mm ? ordered_json(*inst.diameter_mm) : ordered_json(nullptr)}});
  }
  out << dump({{"provenance", to_json(make_provenance(cfg, {o.instances, o.maps}))},
               {"size_report", to_json(report)},
               {"instances", list}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateOptions {
  ConfigOptions cfg;
  std::string pred;
  std::string gt;
  std::string pred_classes;
  std::string gt_classes;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = effective_config(o.cfg);
  const LabelMap pred = io::read_label_map(o.pred);
  const LabelMap gt = io::read_label_map(o.gt);
  const MatchReport match = match_instances(pred, gt, {cfg.match_tau});
  std::vector<std::string> inputs = {o.pred, o.gt};

  PixelMetrics pixel;
  std::string pixel_kind;
  if (!o.pred_classes.empty() || !o.gt_classes.empty()) {
    if (o.pred_classes.empty() || o.gt_classes.empty()) {
      throw UsageError("--pred-classes and --gt-classes must be given together");
    }
    pixel = pixel_metrics(io::read_class_map(o.pred_classes), io::read_class_map(o.gt_classes));
    pixel_kind = "classes";
    inputs.push_back(o.pred_classes);
    inputs.push_back(o.gt_classes);
  } else {
    // Without class maps, score foreground vs background.
    require_same_extent(pred, gt, "evaluate");
    ClassMap p(pred.rows(), pred.cols()), g(gt.rows(), gt.cols());
    for (std::size_t i = 0; i < p.data().size(); ++i) {
      p.data()[i] = pred.data()[i] != 0;
      g.data()[i] = gt.data()[i] != 0;
    }
    pixel = pixel_metrics(p, g, 2);
    pixel_kind = "foreground";
  }
  ordered_json pj = to_json(pixel);
  pj["kind"] = pixel_kind;
  out << dump({{"provenance", to_json(make_provenance(cfg, inputs))},
               {"tau", cfg.match_tau},
               {"match", to_json(match)},
               {"pixel", pj}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct SplitOptions {
  ConfigOptions cfg;
  std::string stats;
  std::vector<std::string> class_maps;
  std::string out;
  std::string stats_out;
};

int cmd_split(const SplitOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = effective_config(o.cfg);
  if (!cfg.seed) throw UsageError("split requires --seed");
  if (o.stats.empty() == o.class_maps.empty()) throw UsageError("split needs exactly one of --stats or --class-maps");
  print_config(err, cfg);
  std::vector<ImageStats> stats;
  std::vector<std::string> inputs;
  if (!o.stats.empty()) {
    std::ifstream in(o.stats);
    if (!in) throw FormatError("cannot open " + o.stats);
    std::stringstream ss;
    ss << in.rdbuf();
    stats = parse_stats_csv(ss.str());
    inputs.push_back(o.stats);
  } else {
    for (const auto& path : o.class_maps) {
      stats.push_back(image_stats(path, io::read_class_map(path)));
      inputs.push_back(path);
    }
  }
  const SplitAssignment split = split_dataset(stats, cfg.test_fraction, cfg.restarts, *cfg.seed);
  if (!o.out.empty()) io::write_text_atomic(o.out, split_manifest(split));
  if (!o.stats_out.empty()) io::write_text_atomic(o.stats_out, stats_csv(stats));
  out << dump({{"provenance", to_json(make_provenance(cfg, inputs))}, {"split", to_json(split)}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct NormalizeOptions {
  ConfigOptions cfg;
  std::vector<std::string> inputs;
  std::string out;
  std::string out_dir;
  double ref_mean = -1.0;
  double ref_std = -1.0;
  std::string ref_image;
  int jobs = 1;
};

int cmd_normalize(const NormalizeOptions& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = effective_config(o.cfg);
  if (o.out.empty() == o.out_dir.empty()) throw UsageError("normalize needs exactly one of --out or --out-dir");
  if (!o.out.empty() && o.inputs.size() != 1) throw UsageError("--out takes a single --in; use --out-dir for batches");
  LuminanceStats ref;
  if (!o.ref_image.empty()) {
    ref = luminance_stats(io::read_rgb(o.ref_image));
  } else if (o.ref_mean >= 0.0 && o.ref_std >= 0.0) {
    ref = {o.ref_mean, o.ref_std};
  } else {
    throw UsageError("normalize needs --ref-image or both --ref-mean and --ref-std");
  }
  if (!o.out_dir.empty()) fs::create_directories(o.out_dir);

  std::vector<ordered_json> results(o.inputs.size());
  parallel_for(o.inputs.size(), o.jobs, [&](std::size_t i) {
    const RgbImage img = io::read_rgb(o.inputs[i]);
    const RgbImage norm = normalize_luminance(img, ref);
    const fs::path dst = o.out.empty() ? fs::path(o.out_dir) / fs::path(o.inputs[i]).filename() : fs::path(o.out);
    io::write_rgb(norm, dst);
    const LuminanceStats before = luminance_stats(img);
    const LuminanceStats after = luminance_stats(norm);
    results[i] = {{"input", o.inputs[i]},
                  {"before", {{"l_mean", before.ref_mean}, {"l_std", before.ref_std}}},
                  {"after", {{"l_mean", after.ref_mean}, {"l_std", after.ref_std}}}};
  });
  out << dump({{"provenance", to_json(make_provenance(cfg, o.inputs))},
               {"reference", {{"l_mean", ref.ref_mean}, {"l_std", ref.ref_std}}},
               {"images", results}});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Star-convex pellet segmentation pipeline", "pelletseg"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate seeded synthetic pellet scenes");
  add_config_options(s, synth.cfg);
  add_override(s, synth.cfg, "--seed", "seed", "Random seed (required)");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--rows", synth.rows, "Image rows");
  s->add_option("--cols", synth.cols, "Image columns");
  s->add_option("--n-objects", synth.n_objects, "Objects per scene");
  s->add_option("--radius-min", synth.radius_min, "Smallest base radius (px)");
  s->add_option("--radius-max", synth.radius_max, "Largest base radius (px)");
  s->add_option("--min-gap", synth.min_gap, "Minimum background gap between objects (px)");
  s->add_option("--class-mix", synth.class_mix, "Probabilities for nice,ugly,big,joint");
  s->add_option("--count", synth.count, "Number of scenes (seeds seed..seed+count-1)");
  s->add_option("--jobs", synth.jobs, "Scenes generated concurrently");

  GenTargetsOptions gen;
  auto* g = app.add_subcommand("gen-targets", "Build probability/distance/type maps from a label map");
  add_config_options(g, gen.cfg);
  add_override(g, gen.cfg, "--n-rays", "n_rays", "Number of rays");
  add_override(g, gen.cfg, "--expand-radius", "expansion_radius_px", "Label expansion radius (px)");
  g->add_option("--labels", gen.labels, "16-bit instance label PNG")->required();
  g->add_option("--classes", gen.classes, "16-bit class map PNG");
  g->add_option("--out", gen.out, "Output maps directory")->required();
  g->add_flag("--expand", gen.expand, "Expand labels by the configured radius first");

  PostprocessOptions post;
  auto* p = app.add_subcommand("postprocess", "Candidates, star-polygon NMS and instance rendering");
  add_config_options(p, post.cfg);
  add_override(p, post.cfg, "--n-rays", "n_rays", "Number of rays");
  add_override(p, post.cfg, "--prob-threshold", "prob_threshold", "Candidate probability threshold");
  add_override(p, post.cfg, "--nms-threshold", "nms_iou_threshold", "NMS IoU threshold");
  add_override(p, post.cfg, "--stride", "candidate_stride", "Candidate grid stride");
  p->add_option("--maps", post.maps, "Maps directory (optionally with tiles.txt)")->required();
  p->add_option("--out", post.out, "Output instance label PNG")->required();
  p->add_option("--classes-out", post.classes_out, "Optional per-pixel class PNG of the instances");

  MeasureOptions meas;
  auto* m = app.add_subcommand("measure", "Classify and size instances");
  add_config_options(m, meas.cfg);
  add_override(m, meas.cfg, "--mm-per-px", "mm_per_px", "Calibration (mm per pixel)");
  add_override(m, meas.cfg, "--bins", "bins", "Histogram bin edges in mm, comma separated");
  add_override(m, meas.cfg, "--measured-classes", "measured_classes", "Classes to size, comma separated");
  m->add_option("--instances", meas.instances, "Instance label PNG")->required();
  m->add_option("--maps", meas.maps, "Maps directory supplying type scores")->required();
  m->add_option("--csv", meas.csv, "Per-instance CSV output");

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "IoU-threshold instance matching and pixel metrics");
  add_config_options(e, ev.cfg);
  add_override(e, ev.cfg, "--tau", "match_tau", "IoU matching threshold");
  e->add_option("--pred", ev.pred, "Predicted instance PNG")->required();
  e->add_option("--gt", ev.gt, "Ground-truth instance PNG")->required();
  e->add_option("--pred-classes", ev.pred_classes, "Predicted class map PNG");
  e->add_option("--gt-classes", ev.gt_classes, "Ground-truth class map PNG");

  SplitOptions sp;
  auto* x = app.add_subcommand("split", "Pixel-distribution stratified train/test split");
  add_config_options(x, sp.cfg);
  add_override(x, sp.cfg, "--seed", "seed", "Random seed (required)");
  add_override(x, sp.cfg, "--test-fraction", "test_fraction", "Fraction of images in the test set");
  add_override(x, sp.cfg, "--restarts", "restarts", "Random restarts");
  x->add_option("--stats", sp.stats, "Per-image stats CSV");
  x->add_option("--class-maps", sp.class_maps, "Class map PNGs (ids are the paths)");
  x->add_option("--out", sp.out, "Two-column manifest output");
  x->add_option("--stats-out", sp.stats_out, "Write the per-image stats CSV");

  NormalizeOptions nz;
  auto* n = app.add_subcommand("normalize", "CIELAB luminance normalization");
  add_config_options(n, nz.cfg);
  n->add_option("--in", nz.inputs, "Input RGB PNG(s)")->required();
  n->add_option("--out", nz.out, "Output PNG (single input)");
  n->add_option("--out-dir", nz.out_dir, "Output directory (batch)");
  n->add_option("--ref-mean", nz.ref_mean, "Reference L mean");
  n->add_option("--ref-std", nz.ref_std, "Reference L standard deviation");
  n->add_option("--ref-image", nz.ref_image, "Take reference stats from this image");
  n->add_option("--jobs", nz.jobs, "Images processed concurrently");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out, err);
    if (g->parsed()) return cmd_gen_targets(gen, out, err);
    if (p->parsed()) return cmd_postprocess(post, out, err);
    if (m->parsed()) return cmd_measure(meas, out, err);
    if (e->parsed()) return cmd_evaluate(ev, out, err);
    if (x->parsed()) return cmd_split(sp, out, err);
    if (n->parsed()) return cmd_normalize(nz, out, err);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsageError;
  } catch (const InvalidParameter& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsageError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kDataError;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace pelletseg::cli
