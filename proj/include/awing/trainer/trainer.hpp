#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "awing/coord_channels.hpp"
#include "awing/heatmap_codec.hpp"
#include "awing/io.hpp"
#include "awing/loss_map.hpp"
#include "awing/losses.hpp"
#include "awing/metrics.hpp"
#include "awing/trainer/synthetic.hpp"
#include "awing/trainer/tiny_net.hpp"

namespace awing::trainer {

/// Scalar type the trainer runs in. Loss values and gradients are always
/// evaluated in double; only network storage uses this type.
using Scalar = float;
using Net = TinyNet<Scalar>;

enum class WeightMode { None, LossMap, Baseline };

inline std::string_view to_string(WeightMode m) {
  switch (m) {
    case WeightMode::None: return "none";
    case WeightMode::LossMap: return "map";
    case WeightMode::Baseline: return "baseline";
  }
  return "?";
}

struct TrainConfig {
  LossParams loss{};
  WeightMode weighting = WeightMode::None;
  double map_weight = kDefaultMapWeight;
  double mask_threshold = kDefaultMaskThreshold;
  CoordSelection coords{};
  bool boundary_channel = false;

  std::size_t epochs = 12;
  std::size_t batch_size = 4;
  double learning_rate = 0.5;
  std::size_t lr_step = 8;   ///< multiply the rate by lr_decay every lr_step epochs (0: never)
  double lr_decay = 0.3;
  std::uint64_t seed = 1;

  std::size_t stem_width = 8;
  std::size_t body_width = 16;
  std::size_t body_layers = 2;

  std::size_t train_count = 500;
  std::size_t test_count = 100;
  Frame frame{64, 64};

  void validate() const {
    loss.validate();
    if (coords.needs_boundary() && !boundary_channel) {
      throw DomainError("boundary coordinate channels need the boundary channel");
    }
    if (batch_size == 0) throw DomainError("batch size must be positive");
    if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
    if (!(lr_decay > 0.0)) throw DomainError("learning-rate decay must be positive");
    if (!(map_weight > 0.0)) throw DomainError("map weight must be positive");
    Net::check_frame(frame);
  }

  std::size_t output_channels() const { return kFaceTemplate.size() + (boundary_channel ? 1 : 0); }
  std::size_t input_channels() const { return 1 + coords.count(); }

  NetShape net_shape() const {
    return {input_channels(), output_channels(), stem_width, body_width, body_layers};
  }

  SyntheticSpec data_spec() const {
    SyntheticSpec spec;
    spec.frame = frame;
    return spec;
  }
};

/// Applies `key = value` overrides; unknown keys are rejected.
inline TrainConfig apply_config(TrainConfig cfg, const io::KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "loss") {
      auto k = parse_loss_kind(value);
      if (!k) throw ParseError("unknown loss '" + value + "'");
      cfg.loss.kind = *k;
    } else if (key == "omega") cfg.loss.omega = io::parse_double(value, key);
    else if (key == "epsilon") cfg.loss.epsilon = io::parse_double(value, key);
    else if (key == "theta") cfg.loss.theta = io::parse_double(value, key);
    else if (key == "alpha") cfg.loss.alpha = io::parse_double(value, key);
    else if (key == "weighting") {
      if (value == "none") cfg.weighting = WeightMode::None;
      else if (value == "map") cfg.weighting = WeightMode::LossMap;
      else if (value == "baseline") cfg.weighting = WeightMode::Baseline;
      else throw ParseError("weighting must be none|map|baseline, got '" + value + "'");
    } else if (key == "map_weight") cfg.map_weight = io::parse_double(value, key);
    else if (key == "mask_threshold") cfg.mask_threshold = io::parse_double(value, key);
    else if (key == "coords") cfg.coords = parse_coord_selection(value);
    else if (key == "boundary_channel") {
      if (value == "true" || value == "1") cfg.boundary_channel = true;
      else if (value == "false" || value == "0") cfg.boundary_channel = false;
      else throw ParseError("boundary_channel must be true|false");
    } else if (key == "epochs") cfg.epochs = io::parse_size(value, key);
    else if (key == "batch_size") cfg.batch_size = io::parse_size(value, key);
    else if (key == "learning_rate") cfg.learning_rate = io::parse_double(value, key);
    else if (key == "lr_step") cfg.lr_step = io::parse_size(value, key);
    else if (key == "lr_decay") cfg.lr_decay = io::parse_double(value, key);
    else if (key == "seed") cfg.seed = io::parse_size(value, key);
    else if (key == "stem_width") cfg.stem_width = io::parse_size(value, key);
    else if (key == "body_width") cfg.body_width = io::parse_size(value, key);
    else if (key == "body_layers") cfg.body_layers = io::parse_size(value, key);
    else if (key == "train_count") cfg.train_count = io::parse_size(value, key);
    else if (key == "test_count") cfg.test_count = io::parse_size(value, key);
    else if (key == "frame") {
      auto parts = io::split(value, 'x');
      if (parts.size() != 2) throw ParseError("frame must be HxW");
      cfg.frame = {io::parse_size(parts[0], "frame height"), io::parse_size(parts[1], "frame width")};
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline std::string format_config(const TrainConfig& c) {
  using io::format_double;
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  line("loss", std::string(to_string(c.loss.kind)));
  line("omega", format_double(c.loss.omega));
  line("epsilon", format_double(c.loss.epsilon));
  line("theta", format_double(c.loss.theta));
  line("alpha", format_double(c.loss.alpha));
  line("weighting", std::string(to_string(c.weighting)));
  line("map_weight", format_double(c.map_weight));
  line("mask_threshold", format_double(c.mask_threshold));
  line("coords", to_string(c.coords));
  line("boundary_channel", c.boundary_channel ? "true" : "false");
  line("epochs", std::to_string(c.epochs));
  line("batch_size", std::to_string(c.batch_size));
  line("learning_rate", format_double(c.learning_rate));
  line("lr_step", std::to_string(c.lr_step));
  line("lr_decay", format_double(c.lr_decay));
  line("seed", std::to_string(c.seed));
  line("stem_width", std::to_string(c.stem_width));
  line("body_width", std::to_string(c.body_width));
  line("body_layers", std::to_string(c.body_layers));
  line("train_count", std::to_string(c.train_count));
  line("test_count", std::to_string(c.test_count));
  line("frame", std::to_string(c.frame.height) + "x" + std::to_string(c.frame.width));
  return s;
}

/// Training data prepared once per run: network inputs, targets and
/// per-pixel loss multipliers.
struct PreparedSample {
  std::vector<Scalar> input;  ///< image + selected coord channels (bx, by zero until masked)
  HeatmapStack target;
  std::vector<double> multiplier;  ///< empty when unweighted
  LandmarkSet landmarks;
};

namespace detail {

inline HeatmapStack select_target(const SyntheticSample& s, bool boundary_channel) {
  if (boundary_channel) return s.heatmaps;
  HeatmapStack t(s.heatmaps.landmark_channels(), s.heatmaps.frame());
  std::copy_n(s.heatmaps.values().begin(), t.size(), t.values().begin());
  return t;
}

inline std::vector<Scalar> to_scalar(const HeatmapStack& s) {
  std::vector<Scalar> out(s.size());
  std::transform(s.values().begin(), s.values().end(), out.begin(), [](double v) { return static_cast<Scalar>(v); });
  return out;
}

}  // namespace detail

inline PreparedSample prepare_sample(const SyntheticSample& s, const TrainConfig& cfg, const CoordChannels& coords) {
  PreparedSample p;
  p.input = detail::to_scalar(concat_channels(s.input, coords, cfg.coords));
  p.target = detail::select_target(s, cfg.boundary_channel);
  p.landmarks = s.landmarks;
  switch (cfg.weighting) {
    case WeightMode::None: break;
    case WeightMode::LossMap: {
      const auto m = build_mask(p.target, cfg.map_weight, cfg.mask_threshold).multiplier_stack();
      p.multiplier.assign(m.values().begin(), m.values().end());
      break;
    }
    case WeightMode::Baseline: {
      const auto m = baseline_weight_map(p.target, cfg.map_weight);
      p.multiplier.assign(m.values().begin(), m.values().end());
      break;
    }
  }
  return p;
}

/// Runs the network on a prepared input. With boundary coordinate channels
/// selected, a first pass predicts the boundary, which then masks the
/// coordinates for the second pass; gradients flow through the second pass only.
inline void run_network(const Net& net, const TrainConfig& cfg, const CoordChannels& coords, std::vector<Scalar>& input,
                        Net::Workspace& ws) {
  const Frame frame = cfg.frame;
  if (cfg.coords.needs_boundary()) {
    const std::size_t area = frame.area();
    const std::size_t bx_at = 1 + (cfg.coords.cx ? 1 : 0) + (cfg.coords.cy ? 1 : 0) + (cfg.coords.radius ? 1 : 0);
    std::fill(input.begin() + static_cast<std::ptrdiff_t>(bx_at * area), input.end(), Scalar(0));
    net.forward(input, frame, ws);
    Grid boundary(frame);
    const std::size_t bch = cfg.output_channels() - 1;
    for (std::size_t i = 0; i < area; ++i) boundary.values()[i] = static_cast<double>(ws.output[bch * area + i]);
    const CoordChannels masked = mask_boundary_coords(coords, boundary);
    std::size_t at = bx_at;
    if (cfg.coords.bx) {
      std::transform(masked.bx.values().begin(), masked.bx.values().end(), input.begin() + static_cast<std::ptrdiff_t>(at++ * area),
                     [](double v) { return static_cast<Scalar>(v); });
    }
    if (cfg.coords.by) {
      std::transform(masked.by.values().begin(), masked.by.values().end(), input.begin() + static_cast<std::ptrdiff_t>(at * area),
                     [](double v) { return static_cast<Scalar>(v); });
    }
  }
  net.forward(input, frame, ws);
}

struct EpochStats {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double objective = 0.0;  ///< mean weighted training loss
  double mse_all = 0.0;    ///< pixel-mean squared error over all pixels
  double mse_fg = 0.0;     ///< pixel-mean squared error over pixels with target > 0
};

struct TrainResult {
  Net net;
  std::vector<EpochStats> trace;
};

inline double learning_rate_at(const TrainConfig& cfg, std::size_t epoch) {
  double lr = cfg.learning_rate;
  if (cfg.lr_step > 0) {
    for (std::size_t e = cfg.lr_step; e <= epoch; e += cfg.lr_step) lr *= cfg.lr_decay;
  }
  return lr;
}

/// Mini-batch gradient descent with step decay on the mean weighted loss.
/// Each epoch's trace entry is accumulated from the forward passes made
/// during that epoch and evaluated with squared error regardless of the
/// training loss.
inline TrainResult train(const TrainConfig& cfg, const std::vector<SyntheticSample>& data) {
  cfg.validate();
  TrainResult result{Net(cfg.net_shape(), cfg.seed), {}};
  if (cfg.epochs == 0 || data.empty()) return result;

  const CoordChannels coords = make_xy_radius(cfg.frame);
  std::vector<PreparedSample> prepared;
  prepared.reserve(data.size());
  for (const auto& s : data) prepared.push_back(prepare_sample(s, cfg, coords));

  Net& net = result.net;
  Net::Workspace ws;
  std::vector<Scalar> grad(net.parameter_count());
  std::vector<Scalar> dout;
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  const std::size_t n_pixels = prepared.front().target.size();
  const double inv_pixels = 1.0 / static_cast<double>(n_pixels);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double obj_sum = 0.0;
    double sq_sum = 0.0;
    double fg_sum = 0.0;
    std::size_t fg_count = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double batch_scale = inv_pixels / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), Scalar(0));
      for (std::size_t b = start; b < end; ++b) {
        PreparedSample& s = prepared[order[b]];
        run_network(net, cfg, coords, s.input, ws);
        auto y = s.target.values();
        dout.resize(ws.output.size());
        double obj = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double yhat = static_cast<double>(ws.output[i]);
          const LossSurface l = evaluate_loss(y[i], yhat, cfg.loss);
          const double m = s.multiplier.empty() ? 1.0 : s.multiplier[i];
          obj += m * l.value;
          dout[i] = static_cast<Scalar>(m * l.gradient * batch_scale);
          const double e = yhat - y[i];
          sq_sum += e * e;
          if (y[i] > 0.0) {
            fg_sum += e * e;
            ++fg_count;
          }
        }
        if (!std::isfinite(obj)) {
          throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                                    std::to_string(step),
                                epoch, step);
        }
        obj_sum += obj * inv_pixels;
        net.backward(ws, dout, grad);
      }
      auto params = net.parameters();
      const auto lr_s = static_cast<Scalar>(lr);
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_s * grad[i];
      ++step;
    }
    const auto n = static_cast<double>(prepared.size());
    EpochStats st{epoch + 1, lr, obj_sum / n, sq_sum / (n * static_cast<double>(n_pixels)),
                  fg_count ? fg_sum / static_cast<double>(fg_count) : 0.0};
    if (!std::isfinite(st.objective) || !std::isfinite(st.mse_all)) {
      throw DivergenceError("non-finite loss after epoch " + std::to_string(epoch + 1), epoch, step);
    }
    result.trace.push_back(st);
  }
  return result;
}

/// Predicted heatmaps for one sample.
inline HeatmapStack predict(const Net& net, const TrainConfig& cfg, const SyntheticSample& sample) {
  static thread_local Net::Workspace ws;
  const CoordChannels coords = make_xy_radius(cfg.frame);
  std::vector<Scalar> input = detail::to_scalar(concat_channels(sample.input, coords, cfg.coords));
  run_network(net, cfg, coords, input, ws);
  HeatmapStack out(cfg.output_channels(), cfg.frame, cfg.boundary_channel);
  std::transform(ws.output.begin(), ws.output.end(), out.values().begin(), [](Scalar v) { return static_cast<double>(v); });
  return out;
}

struct HeldOutScore {
  std::vector<double> per_image_nme;
  double mean_nme = 0.0;
  double mse_all = 0.0;
  double mse_fg = 0.0;
};

/// Decodes each prediction and scores it with inter-ocular NME (landmarks 0 and 1).
inline HeldOutScore evaluate_model(const Net& net, const TrainConfig& cfg, const std::vector<SyntheticSample>& test) {
  HeldOutScore score;
  double sq = 0.0, fg = 0.0;
  std::size_t n_all = 0, n_fg = 0;
  for (const auto& s : test) {
    const HeatmapStack pred = predict(net, cfg, s);
    const auto decoded = decode_landmarks(pred);
    score.per_image_nme.push_back(nme(s.landmarks, decoded.landmarks, InterOcular{0, 1}));
    const HeatmapStack target = detail::select_target(s, cfg.boundary_channel);
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double e = pred.values()[i] - target.values()[i];
      sq += e * e;
      ++n_all;
      if (target.values()[i] > 0.0) {
        fg += e * e;
        ++n_fg;
      }
    }
  }
  if (!score.per_image_nme.empty()) {
    score.mean_nme = std::accumulate(score.per_image_nme.begin(), score.per_image_nme.end(), 0.0) /
                     static_cast<double>(score.per_image_nme.size());
  }
  score.mse_all = n_all ? sq / static_cast<double>(n_all) : 0.0;
  score.mse_fg = n_fg ? fg / static_cast<double>(n_fg) : 0.0;
  return score;
}

/// Train and test splits for a seed: disjoint index ranges of one stream.
struct Splits {
  std::vector<SyntheticSample> train;
  std::vector<SyntheticSample> test;
};

inline Splits make_splits(const TrainConfig& cfg) {
  const SyntheticSpec spec = cfg.data_spec();
  return {generate_dataset(cfg.seed, cfg.train_count, spec, 0),
          generate_dataset(cfg.seed, cfg.test_count, spec, cfg.train_count)};
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw UndefinedMetricError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AblationVariant {
  std::string name;
  LossKind loss;
  WeightMode weighting;
  bool boundary_and_coords;
};

/// The ablation ladder, from the plain MSE baseline to the full model.
inline std::vector<AblationVariant> ablation_variants() {
  return {{"MSE", LossKind::MSE, WeightMode::None, false},
          {"MSE+WM", LossKind::MSE, WeightMode::LossMap, false},
          {"AW", LossKind::AWing, WeightMode::None, false},
          {"AW+WM_base", LossKind::AWing, WeightMode::Baseline, false},
          {"AW+WM", LossKind::AWing, WeightMode::LossMap, false},
          {"AW+WM+B+C+CB", LossKind::AWing, WeightMode::LossMap, true}};
}

inline TrainConfig variant_config(TrainConfig base, const AblationVariant& v) {
  base.loss.kind = v.loss;
  base.weighting = v.weighting;
  base.boundary_channel = v.boundary_and_coords;
  base.coords = v.boundary_and_coords ? CoordSelection::all() : CoordSelection::none();
  return base;
}

struct AblationRow {
  std::string variant;
  std::vector<double> nme_per_seed;
  double median_nme = 0.0;
};

struct AblationTable {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;

  const AblationRow& row(std::string_view name) const {
    for (const auto& r : rows) {
      if (r.variant == name) return r;
    }
    throw DomainError("no ablation row '" + std::string(name) + "'");
  }
};

/// Trains every variant on the same data and initialization per seed and
/// reports held-out mean NME per seed and its median.
inline AblationTable ablation_run(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                                  const std::vector<AblationVariant>& variants = ablation_variants()) {
  AblationTable table;
  table.seeds = seeds;
  for (const auto& v : variants) table.rows.push_back({v.name, {}, 0.0});
  for (std::uint64_t seed : seeds) {
    TrainConfig seeded = base;
    seeded.seed = seed;
    const Splits splits = make_splits(seeded);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      const TrainConfig cfg = variant_config(seeded, variants[i]);
      const TrainResult r = train(cfg, splits.train);
      table.rows[i].nme_per_seed.push_back(evaluate_model(r.net, cfg, splits.test).mean_nme);
    }
  }
  for (auto& row : table.rows) row.median_nme = median(row.nme_per_seed);
  return table;
}

inline std::string format_ablation(const AblationTable& t) {
  std::string s = "variant";
  for (auto seed : t.seeds) s += ",nme_seed_" + std::to_string(seed);
  s += ",median_nme\n";
  for (const auto& r : t.rows) {
    s += r.variant;
    for (double v : r.nme_per_seed) s += "," + io::format_double(v);
    s += "," + io::format_double(r.median_nme) + "\n";
  }
  return s;
}

inline std::string format_trace(const std::vector<EpochStats>& trace) {
  std::string s = "epoch,learning_rate,objective,mse_all,mse_fg\n";
  for (const auto& e : trace) {
    s += std::to_string(e.epoch) + "," + io::format_double(e.learning_rate) + "," + io::format_double(e.objective) +
         "," + io::format_double(e.mse_all) + "," + io::format_double(e.mse_fg) + "\n";
  }
  return s;
}

struct SweepGrid {
  std::vector<double> omega{14.0};
  std::vector<double> epsilon{1.0};
  std::vector<double> theta{0.5};
};

struct SweepCell {
  double omega;
  double epsilon;
  double theta;
  double nme;
};

/// One train + held-out evaluation per (θ, ε, ω) cell, in grid order.
inline std::vector<SweepCell> run_sweep(const TrainConfig& base, const SweepGrid& grid) {
  if (grid.omega.empty() || grid.epsilon.empty() || grid.theta.empty()) throw DomainError("sweep grid must be non-empty");
  const Splits splits = make_splits(base);
  std::vector<SweepCell> cells;
  for (double theta : grid.theta) {
    for (double eps : grid.epsilon) {
      for (double omega : grid.omega) {
        TrainConfig cfg = base;
        cfg.loss.kind = LossKind::AWing;
        cfg.loss.omega = omega;
        cfg.loss.epsilon = eps;
        cfg.loss.theta = theta;
        const TrainResult r = train(cfg, splits.train);
        cells.push_back({omega, eps, theta, evaluate_model(r.net, cfg, splits.test).mean_nme});
      }
    }
  }
  return cells;
}

/// ε rows × ω columns per θ block.
inline std::string format_sweep(const SweepGrid& grid, const std::vector<SweepCell>& cells) {
  std::string s = "theta,epsilon\\omega";
  for (double w : grid.omega) s += "," + io::format_double(w);
  s += "\n";
  std::size_t i = 0;
  for (double theta : grid.theta) {
    for (double eps : grid.epsilon) {
      s += io::format_double(theta) + "," + io::format_double(eps);
      for (std::size_t k = 0; k < grid.omega.size(); ++k) s += "," + io::format_double(cells[i++].nme);
      s += "\n";
    }
  }
  return s;
}

// Model dump: "TNET", u32 version, u32 in/out/stem/body/layers widths,
// u32 tensor count, then per tensor u32 rank, u32 dims..., followed by all
// parameters as little-endian float32.

inline std::string encode_model(const Net& net) {
  std::string out = "TNET";
  auto u32 = [&](std::size_t v) { io::detail::put_u32(out, io::detail::checked_u32(v, "model field")); };
  u32(1);
  const NetShape& s = net.shape();
  u32(s.in_channels);
  u32(s.out_channels);
  u32(s.stem_width);
  u32(s.body_width);
  u32(s.body_layers);
  u32(net.tensors().size());
  for (const auto& t : net.tensors()) {
    u32(t.shape.size());
    for (auto d : t.shape) u32(d);
  }
  for (Scalar v : net.parameters()) io::detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

inline Net decode_model(std::string_view bytes) {
  std::size_t at = 0;
  auto u32 = [&]() {
    if (at + 4 > bytes.size()) throw ParseError("truncated model dump");
    const auto v = io::detail::get_u32(bytes, at);
    at += 4;
    return static_cast<std::size_t>(v);
  };
  if (bytes.substr(0, 4) != "TNET") throw ParseError("not a model dump (missing TNET header)");
  at = 4;
  if (u32() != 1) throw ParseError("unsupported model dump version");
  NetShape shape;
  shape.in_channels = u32();
  shape.out_channels = u32();
  shape.stem_width = u32();
  shape.body_width = u32();
  shape.body_layers = u32();
  Net net(shape, 0);
  const std::size_t count = u32();
  if (count != net.tensors().size()) throw ParseError("model tensor count does not match its shape header");
  for (const auto& t : net.tensors()) {
    const std::size_t rank = u32();
    std::vector<std::size_t> dims;
    for (std::size_t r = 0; r < rank; ++r) dims.push_back(u32());
    if (dims != t.shape) throw ParseError("model tensor '" + t.name + "' has unexpected shape");
  }
  if (bytes.size() != at + 4 * net.parameter_count()) throw ParseError("model dump size mismatch");
  std::vector<Scalar> values(net.parameter_count());
  for (auto& v : values) {
    v = static_cast<Scalar>(std::bit_cast<float>(io::detail::get_u32(bytes, at)));
    at += 4;
  }
  net.set_parameters(values);
  return net;
}

}  // namespace awing::trainer
