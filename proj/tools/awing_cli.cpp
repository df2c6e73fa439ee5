// awing: command-line front end for the awing heatmap library.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "awing/boundary.hpp"
#include "awing/coord_channels.hpp"
#include "awing/heatmap_codec.hpp"
#include "awing/io.hpp"
#include "awing/loss_map.hpp"
#include "awing/losses.hpp"
#include "awing/metrics.hpp"
#include "awing/trainer/trainer.hpp"

namespace {

using namespace awing;
using io::format_double;

struct Output {
  std::string path;

  void emit(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      std::cout.flush();
    } else {
      io::write_file_atomic(path, text);
    }
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("AWING_SEED"); env && *env) return io::parse_size(env, "AWING_SEED");
  return 1;
}

Frame parse_frame(const std::string& text) {
  auto parts = io::split(text, 'x');
  if (parts.size() != 2) throw ParseError("frame must be HxW, got '" + text + "'");
  return {io::parse_size(parts[0], "frame height"), io::parse_size(parts[1], "frame width")};
}

const io::Annotation& pick_annotation(const std::vector<io::Annotation>& all, const std::string& id) {
  if (all.empty()) throw ParseError("annotation file has no entries");
  if (id.empty()) return all.front();
  for (const auto& a : all) {
    if (a.id == id) return a;
  }
  throw ParseError("no annotation with id '" + id + "'");
}

BoundarySchema load_schema(const std::string& path) {
  if (path.empty()) return five_point_schema();
  std::istringstream in(io::read_file(path));
  return parse_boundary_schema(in);
}

std::string grid_csv(const Grid& g) {
  std::string s;
  for (std::size_t r = 0; r < g.height(); ++r) {
    for (std::size_t c = 0; c < g.width(); ++c) {
      if (c) s += ',';
      s += format_double(g(r, c));
    }
    s += '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------

struct LossFlags {
  double omega = 14.0;
  double epsilon = 1.0;
  double theta = 0.5;
  double alpha = 2.1;

  void add(CLI::App* cmd) {
    cmd->add_option("--omega", omega, "omega")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "epsilon")->capture_default_str();
    cmd->add_option("--theta", theta, "theta (AWing branch point)")->capture_default_str();
    cmd->add_option("--alpha", alpha, "alpha (AWing exponent offset)")->capture_default_str();
  }
  LossParams params(LossKind kind) const {
    LossParams p{omega, epsilon, theta, alpha, kind};
    p.validate();
    return p;
  }
};

void setup_curves(CLI::App& app) {
  auto* cmd = app.add_subcommand("curves", "loss value and gradient over an error grid, as CSV");
  struct Opts {
    std::string kinds = "mse,l1,wing,awing";
    std::string ys = "0,0.5,1";
    double error_min = -1.0;
    double error_max = 1.0;
    std::size_t steps = 201;
    LossFlags loss;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--kinds", o->kinds, "comma-separated loss kinds (mse,l1,wing,awing)")->capture_default_str();
  cmd->add_option("--y", o->ys, "comma-separated ground-truth intensities")->capture_default_str();
  cmd->add_option("--error-min", o->error_min, "smallest error y - yhat")->capture_default_str();
  cmd->add_option("--error-max", o->error_max, "largest error y - yhat")->capture_default_str();
  cmd->add_option("--steps", o->steps, "number of error samples (>= 2)")->capture_default_str();
  o->loss.add(cmd);
  cmd->add_option("-o,--output", o->out.path, "CSV path (default stdout)");
  cmd->callback([o] {
    if (o->steps < 2) throw DomainError("--steps must be at least 2");
    if (!(o->error_max > o->error_min)) throw DomainError("--error-max must exceed --error-min");
    const auto ys = io::parse_double_list(o->ys, "y");
    std::vector<LossKind> kinds;
    for (auto tok : io::split(o->kinds, ',')) {
      auto k = parse_loss_kind(tok);
      if (!k) throw ParseError("unknown loss kind '" + std::string(tok) + "'");
      kinds.push_back(*k);
    }
    std::string csv = "loss_kind,y,error,value,gradient\n";
    for (LossKind kind : kinds) {
      const LossParams p = o->loss.params(kind);
      for (double y : ys) {
        for (std::size_t i = 0; i < o->steps; ++i) {
          const double t = static_cast<double>(i) / static_cast<double>(o->steps - 1);
          const double error = o->error_min + t * (o->error_max - o->error_min);
          const LossSurface s = evaluate_loss(y, y - error, p);
          csv += std::string(to_string(kind)) + "," + format_double(y) + "," + format_double(error) + "," +
                 format_double(s.value) + "," + format_double(s.gradient) + "\n";
        }
      }
    }
    o->out.emit(csv);
  });
}

struct RenderFlags {
  std::size_t size = 7;
  double sigma = 1.0;
  bool subpixel = false;
  bool clamp = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--kernel-size", size, "odd Gaussian support side")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Gaussian sigma, px")->capture_default_str();
    cmd->add_flag("--subpixel", subpixel, "center the Gaussian on the exact landmark position");
    cmd->add_flag("--clamp", clamp, "clamp out-of-frame landmarks instead of failing");
  }
  GaussianSpec spec() const { return {size, sigma, subpixel}; }
  FramePolicy policy() const { return clamp ? FramePolicy::Clamp : FramePolicy::Reject; }
};

std::string stack_summary(const HeatmapStack& s) {
  std::string csv = "channel,nonzero,max,argmax_x,argmax_y\n";
  for (std::size_t c = 0; c < s.channels(); ++c) {
    auto plane = s.channel(c);
    std::size_t nz = 0;
    for (double v : plane) nz += v != 0.0;
    const Point p = argmax_location(plane, s.frame());
    const double mx = *std::max_element(plane.begin(), plane.end());
    csv += std::to_string(c) + "," + std::to_string(nz) + "," + format_double(mx) + "," + format_double(p.x) + "," +
           format_double(p.y) + "\n";
  }
  return csv;
}

void setup_render(CLI::App& app) {
  auto* cmd = app.add_subcommand("render", "render ground-truth heatmaps for one annotation");
  struct Opts {
    std::string annotations;
    std::string id;
    std::string heatmap;
    bool boundary = false;
    std::string schema;
    double boundary_sigma = kDefaultBoundarySigma;
    RenderFlags render;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("annotations", o->annotations, "annotation file")->required();
  cmd->add_option("--id", o->id, "annotation id (default: first line)");
  cmd->add_option("--heatmap", o->heatmap, "write the stack as an HMAP dump");
  cmd->add_flag("--boundary", o->boundary, "append the merged boundary channel");
  cmd->add_option("--schema", o->schema, "boundary schema file (default: built-in 5-point schema)");
  cmd->add_option("--boundary-sigma", o->boundary_sigma, "boundary Gaussian sigma, px")->capture_default_str();
  o->render.add(cmd);
  cmd->add_option("-o,--output", o->out.path, "per-channel summary CSV (default stdout)");
  cmd->callback([o] {
    const auto all = io::read_annotations(o->annotations);
    const auto& a = pick_annotation(all, o->id);
    const Frame frame = a.landmarks.frame();
    const HeatmapStack stack =
        o->boundary ? render_with_boundary(a.landmarks, load_schema(o->schema), frame, o->render.spec(), o->boundary_sigma,
                                           o->render.policy())
                    : render_heatmap(a.landmarks, frame, o->render.spec(), o->render.policy());
    if (!o->heatmap.empty()) io::write_heatmap(o->heatmap, stack);
    o->out.emit(stack_summary(stack));
  });
}

void setup_decode(CLI::App& app) {
  auto* cmd = app.add_subcommand("decode", "decode landmarks from an HMAP dump with the quarter-pixel rule");
  struct Opts {
    std::string heatmap;
    bool boundary = false;
    std::string id = "decoded";
    std::string annotation_out;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("heatmap", o->heatmap, "HMAP dump")->required();
  cmd->add_flag("--boundary", o->boundary, "the last channel is a boundary channel and is skipped");
  cmd->add_option("--annotation-out", o->annotation_out, "also write the landmarks as an annotation line");
  cmd->add_option("--id", o->id, "image id for --annotation-out")->capture_default_str();
  cmd->add_option("-o,--output", o->out.path, "CSV path (default stdout)");
  cmd->callback([o] {
    const HeatmapStack stack = io::read_heatmap(o->heatmap, o->boundary);
    const auto decoded = decode_landmarks(stack);
    std::string csv = "landmark,x,y,degenerate\n";
    for (std::size_t i = 0; i < decoded.landmarks.size(); ++i) {
      if (decoded.degenerate[i]) std::cerr << "warning: channel " << i << " is all zero, returning the frame center\n";
      csv += std::to_string(i) + "," + format_double(decoded.landmarks[i].x) + "," +
             format_double(decoded.landmarks[i].y) + "," + (decoded.degenerate[i] ? "1" : "0") + "\n";
    }
    if (!o->annotation_out.empty()) {
      io::write_file_atomic(o->annotation_out, io::format_annotation({o->id, decoded.landmarks}) + "\n");
    }
    o->out.emit(csv);
  });
}

void setup_mask(CLI::App& app) {
  auto* cmd = app.add_subcommand("mask", "weighted loss map mask and pixel classes of a ground-truth dump");
  struct Opts {
    std::string heatmap;
    double weight = kDefaultMapWeight;
    double threshold = kDefaultMaskThreshold;
    std::string mask_out;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("heatmap", o->heatmap, "ground-truth HMAP dump")->required();
  cmd->add_option("--weight", o->weight, "W in (W*M + 1)")->capture_default_str();
  cmd->add_option("--threshold", o->threshold, "dilation threshold")->capture_default_str();
  cmd->add_option("--mask-out", o->mask_out, "write the multiplier map (W*M + 1) as an HMAP dump");
  cmd->add_option("-o,--output", o->out.path, "per-channel CSV (default stdout)");
  cmd->callback([o] {
    const HeatmapStack gt = io::read_heatmap(o->heatmap);
    const WeightMask mask = build_mask(gt, o->weight, o->threshold);
    const PixelClassMap classes = classify_pixels(gt);
    std::string csv = "channel,foreground,difficult_background,background,mask_support\n";
    const std::size_t area = gt.frame().area();
    for (std::size_t c = 0; c < gt.channels(); ++c) {
      std::size_t support = 0;
      for (std::size_t i = 0; i < area; ++i) support += mask.at(c, i / gt.width(), i % gt.width());
      csv += std::to_string(c) + "," + std::to_string(classes.count(c, PixelClass::Foreground)) + "," +
             std::to_string(classes.count(c, PixelClass::DifficultBackground)) + "," +
             std::to_string(classes.count(c, PixelClass::Background)) + "," + std::to_string(support) + "\n";
    }
    if (!o->mask_out.empty()) io::write_heatmap(o->mask_out, mask.multiplier_stack());
    o->out.emit(csv);
  });
}

void setup_boundary(CLI::App& app) {
  auto* cmd = app.add_subcommand("boundary", "merged boundary channel for one annotation, as a CSV grid");
  struct Opts {
    std::string annotations;
    std::string id;
    std::string schema;
    double sigma = kDefaultBoundarySigma;
    std::string heatmap;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("annotations", o->annotations, "annotation file")->required();
  cmd->add_option("--id", o->id, "annotation id (default: first line)");
  cmd->add_option("--schema", o->schema, "boundary schema file (default: built-in 5-point schema)");
  cmd->add_option("--sigma", o->sigma, "boundary Gaussian sigma, px")->capture_default_str();
  cmd->add_option("--heatmap", o->heatmap, "also write the channel as a 1-channel HMAP dump");
  cmd->add_option("-o,--output", o->out.path, "CSV grid path (default stdout)");
  cmd->callback([o] {
    const auto all = io::read_annotations(o->annotations);
    const auto& a = pick_annotation(all, o->id);
    const auto channel = boundary_channel(a.landmarks, load_schema(o->schema), a.landmarks.frame(), o->sigma);
    for (const auto& w : channel.warnings) std::cerr << "warning: " << w << "\n";
    if (!o->heatmap.empty()) {
      HeatmapStack s(1, channel.grid.frame(), true);
      s.set_channel(0, channel.grid);
      io::write_heatmap(o->heatmap, s);
    }
    o->out.emit(grid_csv(channel.grid));
  });
}

void setup_coords(CLI::App& app) {
  auto* cmd = app.add_subcommand("coords", "coordinate channels for a frame, one CSV row per pixel");
  struct Opts {
    std::string frame = "64x64";
    std::string select = "all";
    std::string boundary_pred;
    std::size_t channel = 0;
    bool last_channel = true;
    double threshold = kBoundaryCoordThreshold;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--frame", o->frame, "HxW")->capture_default_str();
  cmd->add_option("--select", o->select, "subset of cx,cy,radius,bx,by, or all/none")->capture_default_str();
  auto* ch = cmd->add_option("--channel", o->channel, "boundary channel index in --boundary-pred (default: last)");
  cmd->add_option("--boundary-pred", o->boundary_pred, "HMAP dump holding the boundary prediction");
  cmd->add_option("--threshold", o->threshold, "boundary threshold for bx, by")->capture_default_str();
  cmd->add_option("-o,--output", o->out.path, "CSV path (default stdout)");
  cmd->callback([o, ch] {
    const Frame frame = parse_frame(o->frame);
    const CoordSelection sel = parse_coord_selection(o->select);
    CoordChannels coords = make_xy_radius(frame);
    if (sel.needs_boundary()) {
      if (o->boundary_pred.empty()) throw DomainError("bx/by need --boundary-pred");
      const HeatmapStack pred = io::read_heatmap(o->boundary_pred);
      if (pred.channels() == 0) throw ShapeError("boundary prediction has no channels");
      const std::size_t c = ch->count() ? o->channel : pred.channels() - 1;
      if (c >= pred.channels()) throw ShapeError("--channel out of range");
      coords = mask_boundary_coords(std::move(coords), pred.channel_grid(c), o->threshold);
    }
    std::string csv = "row,col";
    const std::pair<bool, const Grid*> cols[] = {
        {sel.cx, &coords.cx}, {sel.cy, &coords.cy}, {sel.radius, &coords.radius}, {sel.bx, &coords.bx}, {sel.by, &coords.by}};
    const char* names[] = {"cx", "cy", "radius", "bx", "by"};
    for (std::size_t k = 0; k < 5; ++k) {
      if (cols[k].first) csv += std::string(",") + names[k];
    }
    csv += "\n";
    for (std::size_t r = 0; r < frame.height; ++r) {
      for (std::size_t c = 0; c < frame.width; ++c) {
        csv += std::to_string(r) + "," + std::to_string(c);
        for (const auto& [on, g] : cols) {
          if (on) csv += "," + format_double((*g)(r, c));
        }
        csv += "\n";
      }
    }
    o->out.emit(csv);
  });
}

// ---------------------------------------------------------------------------

struct TrainFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* cmd) {
    cmd->add_option("-c,--config", config, "key = value config file");
    cmd->add_option("--set", sets, "override one config key, key=value (repeatable)");
    cmd->add_option("--seed", seed, "rng seed (default: $AWING_SEED or 1)");
  }

  trainer::TrainConfig resolve() const {
    trainer::TrainConfig cfg;
    cfg.seed = default_seed();
    if (!config.empty()) cfg = trainer::apply_config(cfg, io::read_key_values(config));
    io::KeyValues overrides;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'");
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    cfg = trainer::apply_config(cfg, overrides);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

void setup_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "train the tiny regressor on synthetic data; emits the loss trace CSV");
  struct Opts {
    TrainFlags flags;
    std::string model;
    std::string score;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add(cmd);
  cmd->add_option("--model", o->model, "write the trained parameters (TNET dump)");
  cmd->add_option("--score", o->score, "write held-out NME per test image as CSV");
  cmd->add_option("-o,--output", o->out.path, "trace CSV path (default stdout)");
  cmd->callback([o] {
    const auto cfg = o->flags.resolve();
    const auto splits = trainer::make_splits(cfg);
    const auto result = trainer::train(cfg, splits.train);
    if (!o->model.empty()) io::write_file_atomic(o->model, trainer::encode_model(result.net));
    if (!o->score.empty()) {
      const auto score = trainer::evaluate_model(result.net, cfg, splits.test);
      std::string csv = "image,nme\n";
      for (std::size_t i = 0; i < score.per_image_nme.size(); ++i) {
        csv += std::to_string(i) + "," + format_double(score.per_image_nme[i]) + "\n";
      }
      csv += "mean," + format_double(score.mean_nme) + "\n";
      io::write_file_atomic(o->score, csv);
    }
    o->out.emit(trainer::format_trace(result.trace));
  });
}

void setup_ablate(CLI::App& app) {
  auto* cmd = app.add_subcommand("ablate", "train every ablation variant per seed; emits held-out NME CSV");
  struct Opts {
    TrainFlags flags;
    std::string seeds;
    std::string variants;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add(cmd);
  cmd->add_option("--seeds", o->seeds, "comma-separated seeds (default: five consecutive seeds from --seed)");
  cmd->add_option("--variants", o->variants, "comma-separated subset of MSE,MSE+WM,AW,AW+WM_base,AW+WM,AW+WM+B+C+CB");
  cmd->add_option("-o,--output", o->out.path, "CSV path (default stdout)");
  cmd->callback([o] {
    const auto cfg = o->flags.resolve();
    std::vector<std::uint64_t> seeds;
    if (o->seeds.empty()) {
      for (std::uint64_t k = 0; k < 5; ++k) seeds.push_back(cfg.seed + k);
    } else {
      for (auto tok : io::split(o->seeds, ',')) seeds.push_back(io::parse_size(tok, "seed"));
    }
    auto variants = trainer::ablation_variants();
    if (!o->variants.empty()) {
      std::vector<trainer::AblationVariant> picked;
      for (auto tok : io::split(o->variants, ',')) {
        auto it = std::find_if(variants.begin(), variants.end(), [&](const auto& v) { return v.name == tok; });
        if (it == variants.end()) throw ParseError("unknown variant '" + std::string(tok) + "'");
        picked.push_back(*it);
      }
      variants = std::move(picked);
    }
    o->out.emit(trainer::format_ablation(trainer::ablation_run(cfg, seeds, variants)));
  });
}

void setup_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "AWing parameter sweep over omega, epsilon and theta; emits an NME matrix");
  struct Opts {
    TrainFlags flags;
    std::string omega = "14";
    std::string epsilon = "1";
    std::string theta = "0.5";
    Output out;
  };
  auto o = std::make_shared<Opts>();
  o->flags.add(cmd);
  cmd->add_option("--omegas", o->omega, "comma-separated omega values (columns)")->capture_default_str();
  cmd->add_option("--epsilons", o->epsilon, "comma-separated epsilon values (rows)")->capture_default_str();
  cmd->add_option("--thetas", o->theta, "comma-separated theta values (row blocks)")->capture_default_str();
  cmd->add_option("-o,--output", o->out.path, "CSV path (default stdout)");
  cmd->callback([o] {
    const auto cfg = o->flags.resolve();
    trainer::SweepGrid grid{io::parse_double_list(o->omega, "omega"), io::parse_double_list(o->epsilon, "epsilon"),
                            io::parse_double_list(o->theta, "theta")};
    o->out.emit(trainer::format_sweep(grid, trainer::run_sweep(cfg, grid)));
  });
}

void setup_evaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate", "NME, failure rate, AUC and PCK of predictions against ground truth");
  struct Opts {
    std::string gt;
    std::string pred;
    std::string norm = "interocular:0,1";
    double fr = 0.1;
    double auc = 0.1;
    std::optional<double> pck;
    std::size_t intervals = kDefaultCedIntervals;
    std::string ced;
    Output out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("gt", o->gt, "ground-truth annotation file")->required();
  cmd->add_option("pred", o->pred, "predicted annotation file (same ids, same order)")->required();
  cmd->add_option("--norm", o->norm, "interocular:i,j | interpupil:i,..;j,.. | torso:i,j | const:d")->capture_default_str();
  cmd->add_option("--fr-threshold", o->fr, "failure threshold as a fraction")->capture_default_str();
  cmd->add_option("--auc-threshold", o->auc, "CED/AUC upper limit as a fraction")->capture_default_str();
  cmd->add_option("--pck", o->pck, "also report PCK at this fraction of d");
  cmd->add_option("--ced-intervals", o->intervals, "CED grid intervals")->capture_default_str();
  cmd->add_option("--ced", o->ced, "write the CED curve CSV here");
  cmd->add_option("-o,--output", o->out.path, "report CSV path (default stdout)");
  cmd->callback([o] {
    const auto gt = io::read_annotations(o->gt);
    const auto pred = io::read_annotations(o->pred);
    if (gt.size() != pred.size()) throw ShapeError("ground truth and prediction files list different image counts");
    std::vector<LandmarkSet> g, p;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i].id != pred[i].id) throw ParseError("image id mismatch at entry " + std::to_string(i) + ": '" + gt[i].id + "' vs '" + pred[i].id + "'");
      g.push_back(gt[i].landmarks);
      p.push_back(pred[i].landmarks);
    }
    EvaluationOptions opt{parse_normalization(o->norm), o->fr, o->auc, o->pck, o->intervals};
    const MetricsReport r = evaluate(g, p, opt);
    std::string csv = "image,nme\n";
    for (std::size_t i = 0; i < r.per_image_nme.size(); ++i) csv += gt[i].id + "," + format_double(r.per_image_nme[i]) + "\n";
    csv += "mean_nme," + format_double(r.mean_nme) + "\n";
    csv += "fr@" + format_double(r.fr_threshold) + "," + format_double(r.fr) + "\n";
    csv += "auc@" + format_double(r.auc_threshold) + "," + format_double(r.auc) + "\n";
    if (r.pck) csv += "pck@" + format_double(*r.pck_fraction) + "," + format_double(*r.pck) + "\n";
    if (!o->ced.empty()) {
      std::string c = "nme,fraction\n";
      for (const auto& pt : r.ced) c += format_double(pt.nme) + "," + format_double(pt.fraction) + "\n";
      io::write_file_atomic(o->ced, c);
    }
    o->out.emit(csv);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"awing: adaptive wing loss toolkit for heatmap regression"};
  app.require_subcommand(1);
  setup_curves(app);
  setup_render(app);
  setup_decode(app);
  setup_mask(app);
  setup_boundary(app);
  setup_coords(app);
  setup_train(app);
  setup_ablate(app);
  setup_sweep(app);
  setup_evaluate(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const awing::Error& e) {
    std::cerr << "awing: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "awing: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
