// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: awing_acceptance <path-to-awing-cli> [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "awing/boundary.hpp"
#include "awing/heatmap_codec.hpp"
#include "awing/io.hpp"
#include "awing/loss_map.hpp"
#include "awing/losses.hpp"
#include "awing/metrics.hpp"
#include "awing/trainer/trainer.hpp"

using namespace awing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  for (LossKind k : {LossKind::MSE, LossKind::L1, LossKind::Wing, LossKind::AWing}) {
    LossParams p;
    p.kind = k;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double y = i / 49.0, yhat = j / 49.0;
        const double ad = std::fabs(yhat - y);
        if (ad < 1e-4) continue;
        if (k == LossKind::AWing && std::fabs(ad - p.theta) < 1e-4) continue;
        const double h = 1e-6;
        const double fd = (evaluate_loss(y, yhat + h, p).value - evaluate_loss(y, yhat - h, p).value) / (2 * h);
        const double g = evaluate_loss(y, yhat, p).gradient;
        worst = std::max(worst, std::fabs(g - fd) / std::max(std::fabs(g), 1e-3));
        ++checked;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-5 && secs < 5.0,
          std::to_string(checked) + " points, max rel err " + fmt("%.2e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome continuity() {
  const LossParams p;
  double value_gap = 0.0, slope_gap = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double y = k / 10.0;
    value_gap = std::max(value_gap, std::fabs(detail::awing_nonlinear_value(y, p.theta, p) - detail::awing_linear_value(y, p.theta, p)));
    slope_gap = std::max(slope_gap, std::fabs(detail::awing_nonlinear_slope(y, p.theta, p) - detail::awing_constants(y, p).a));
  }
  LossParams w;
  w.kind = LossKind::Wing;
  w.omega = 10.0;
  w.epsilon = 2.0;
  const double wing_gap = std::fabs(detail::wing_nonlinear_value(w.omega, w) - detail::wing_linear_value(w.omega, w));
  return {value_gap < 1e-9 && slope_gap < 1e-6 && wing_gap < 1e-9,
          "AWing value gap " + fmt("%.1e", value_gap) + ", slope gap " + fmt("%.1e", slope_gap) + ", Wing value gap " +
              fmt("%.1e", wing_gap)};
}

Outcome adaptation() {
  const LossParams p;
  // ω(α−y)(Δ/ε)^(α−y−1) / (ε(1+(Δ/ε)^(α−y))), written out independently.
  auto oracle = [&](double y) {
    const double e = p.alpha - y, u = 0.05 / p.epsilon;
    return p.omega * e * std::pow(u, e - 1.0) / (p.epsilon * (1.0 + std::pow(u, e)));
  };
  const double a = influence(0.05, 0.0, p), b = influence(0.05, 0.5, p), c = influence(0.05, 1.0, p);
  const bool match = std::fabs(a - oracle(0.0)) < 1e-12 && std::fabs(b - oracle(0.5)) < 1e-12 && std::fabs(c - oracle(1.0)) < 1e-12;
  return {a < b && b < c && match, "influence " + fmt("%.6f", a) + " < " + fmt("%.6f", b) + " < " + fmt("%.6f", c)};
}

Outcome foreground_fraction() {
  const HeatmapStack s = render_heatmap(LandmarkSet({64, 64}, {{31.4, 29.8}}), {64, 64});
  std::size_t n = 0;
  for (double v : s.channel(0)) n += v != 0.0;
  return {n == 49, std::to_string(n) + "/4096 nonzero (" + fmt("%.3f", 100.0 * static_cast<double>(n) / 4096.0) + "%)"};
}

Outcome loss_map_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LossParams p;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    HeatmapStack gt(3, {8, 8}), pred(3, {8, 8});
    for (auto& v : gt.values()) v = u(rng) < 0.6 ? 0.0 : u(rng);
    for (auto& v : pred.values()) v = u(rng);
    const double got = apply_weighted_loss(batch_loss(gt, pred, p).values, build_mask(gt, 10.0, 0.2)).mean;
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
      for (long r = 0; r < 8; ++r)
        for (long x = 0; x < 8; ++x) {
          double m = 0.0;
          for (long rr = std::max(0L, r - 1); rr <= std::min(7L, r + 1); ++rr)
            for (long xx = std::max(0L, x - 1); xx <= std::min(7L, x + 1); ++xx) m = std::max(m, gt(c, rr, xx));
          const double y = gt(c, r, x), yh = pred(c, r, x);
          const double d = std::fabs(y - yh);
          double l;
          if (d < 0.5) {
            l = 14.0 * std::log(1.0 + std::pow(d, 2.1 - y));
          } else {
            const double a = 14.0 / (1.0 + std::pow(0.5, 2.1 - y)) * (2.1 - y) * std::pow(0.5, 1.1 - y);
            l = a * d - (0.5 * a - 14.0 * std::log(1.0 + std::pow(0.5, 2.1 - y)));
          }
          sum += l * (m >= 0.2 ? 11.0 : 1.0);
        }
    worst = std::max(worst, std::fabs(got - sum / 192.0));
  }
  return {worst < 1e-12, "200 stacks, max abs diff " + fmt("%.2e", worst)};
}

Outcome decode_accuracy() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(8.0, 55.0);
  GaussianSpec k;
  k.subpixel = true;
  const Frame f{64, 64};
  double qx = 0, qy = 0, ax = 0, ay = 0;
  for (int i = 0; i < 1000; ++i) {
    const Point p{u(rng), u(rng)};
    const HeatmapStack s = render_heatmap(LandmarkSet(f, {p}), f, k);
    const Point q = decode_landmarks(s).landmarks[0];
    const Point a = argmax_location(s.channel(0), f);
    qx += std::fabs(q.x - p.x);
    qy += std::fabs(q.y - p.y);
    ax += std::fabs(a.x - p.x);
    ay += std::fabs(a.y - p.y);
  }
  double round_trip = 0.0;
  for (std::size_t y = 1; y < 63; ++y)
    for (std::size_t x = 1; x < 63; ++x) {
      const Point q = decode_landmarks(render_heatmap(LandmarkSet(f, {{double(x), double(y)}}), f)).landmarks[0];
      round_trip = std::max({round_trip, std::fabs(q.x - double(x)), std::fabs(q.y - double(y))});
    }
  return {qx < ax && qy < ay && round_trip <= 0.25,
          "MAE decode (" + fmt("%.4f", qx / 1000) + ", " + fmt("%.4f", qy / 1000) + ") vs argmax (" + fmt("%.4f", ax / 1000) +
              ", " + fmt("%.4f", ay / 1000) + "), integer round trip max " + fmt("%.3f", round_trip)};
}

Outcome metrics_oracle() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 99.0);
  std::normal_distribution<double> g(0.0, 3.0);
  const Frame f{100, 100};
  double worst = 0.0;
  std::vector<double> nmes;
  std::vector<LandmarkSet> gts, preds;
  for (int t = 0; t < 100; ++t) {
    std::vector<Point> a, b;
    for (int i = 0; i < 8; ++i) {
      a.push_back({u(rng), u(rng)});
      b.push_back({std::clamp(a.back().x + g(rng), 0.0, 99.0), std::clamp(a.back().y + g(rng), 0.0, 99.0)});
    }
    gts.emplace_back(f, a);
    preds.emplace_back(f, b);
    const double d = std::sqrt((a[0].x - a[1].x) * (a[0].x - a[1].x) + (a[0].y - a[1].y) * (a[0].y - a[1].y));
    double s = 0.0, hit = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double e = std::sqrt((a[i].x - b[i].x) * (a[i].x - b[i].x) + (a[i].y - b[i].y) * (a[i].y - b[i].y));
      s += e;
      hit += e <= 0.1 * d ? 1.0 : 0.0;
    }
    const double oracle = s / 8.0 / d;
    nmes.push_back(oracle);
    worst = std::max(worst, std::fabs(nme(gts.back(), preds.back(), InterOcular{0, 1}) - oracle));
    worst = std::max(worst, std::fabs(pck(gts.back(), preds.back(), InterOcular{0, 1}, 0.1) - hit / 8.0));
  }
  for (double th : {0.02, 0.05, 0.08, 0.1}) {
    double fails = 0;
    for (double v : nmes) fails += v > th ? 1.0 : 0.0;
    worst = std::max(worst, std::fabs(failure_rate(nmes, th) - fails / 100.0));
    auto cdf = [&](double x) {
      double n = 0;
      for (double v : nmes) n += v <= x ? 1.0 : 0.0;
      return n / 100.0;
    };
    double area = 0.0;
    for (int i = 0; i < 1000; ++i) area += 0.5 * (cdf(th * i / 1000.0) + cdf(th * (i + 1) / 1000.0));
    worst = std::max(worst, std::fabs(ced_auc(nmes, th).auc - area / 1000.0));
  }
  const LandmarkSet g345(f, {{10, 10}, {20, 10}}), p345(f, {{10, 10}, {23, 14}});
  const bool exact = nme(g345, p345, ConstantNorm{10.0}) == 0.25 && ced_auc(std::vector<double>(5, 0.0), 0.1).auc == 1.0;
  return {worst < 1e-12 && exact, "max abs diff " + fmt("%.2e", worst) + (exact ? ", analytic cases exact" : ", analytic cases WRONG")};
}

Outcome directional_ablation() {
  const auto t0 = std::chrono::steady_clock::now();
  const trainer::TrainConfig base;
  std::vector<trainer::AblationVariant> picked;
  for (const auto& v : trainer::ablation_variants())
    if (v.name == "MSE" || v.name == "AW" || v.name == "AW+WM") picked.push_back(v);
  const auto table = trainer::ablation_run(base, {1, 2, 3, 4, 5}, picked);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double mse = table.row("MSE").median_nme, aw = table.row("AW").median_nme, awwm = table.row("AW+WM").median_nme;
  std::fputs(trainer::format_ablation(table).c_str(), stderr);
  return {awwm < aw && aw < mse && secs < 900.0,
          "median NME AW+WM " + fmt("%.4f", awwm) + " < AW " + fmt("%.4f", aw) + " < MSE " + fmt("%.4f", mse) + ", " +
              fmt("%.0f", secs) + " s"};
}

Outcome foreground_reduction() {
  trainer::TrainConfig base;
  base.train_count = 40;
  base.epochs = 50;
  base.learning_rate = 1.0;
  base.lr_step = 0;
  std::vector<double> ratios;
  for (std::uint64_t seed : {1, 2, 3}) {
    trainer::TrainConfig c = base;
    c.seed = seed;
    const auto data = trainer::generate_dataset(seed, c.train_count, c.data_spec());
    c.loss.kind = LossKind::MSE;
    const double fg_mse = trainer::train(c, data).trace.back().mse_fg;
    c.loss.kind = LossKind::AWing;
    const double fg_aw = trainer::train(c, data).trace.back().mse_fg;
    ratios.push_back(1.0 - fg_aw / fg_mse);
  }
  const double m = trainer::median(ratios);
  std::string per;
  for (double r : ratios) per += fmt(" %.1f%%", 100 * r);
  return {m >= 0.10, "foreground MSE reduction at epoch 50, median " + fmt("%.1f%%", 100 * m) + " (per seed" + per + ")"};
}

// AWing with defaults in extended precision, for the finite-difference side.
long double awing_ld(long double y, long double yhat) {
  const long double d = std::fabs(yhat - y), e = 2.1L - y;
  if (d < 0.5L) return 14.0L * std::log1p(std::pow(d, e));
  const long double a = 14.0L / (1.0L + std::pow(0.5L, e)) * e * std::pow(0.5L, e - 1.0L);
  return a * d - (0.5L * a - 14.0L * std::log1p(std::pow(0.5L, e)));
}

Outcome backprop_check() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const trainer::NetShape shape{1, 5, 8, 16, 2};
  trainer::TinyNet<double> net(shape, 7);
  const Frame f{4, 4};
  std::vector<double> input(16), target(5 * 16);
  for (auto& v : input) v = u(rng);
  for (auto& v : target) v = u(rng) < 0.5 ? 0.0 : u(rng);
  const LossParams lp;
  trainer::TinyNet<double>::Workspace ws;
  net.forward(input, f, ws);
  std::vector<double> dout(target.size()), grad(net.parameter_count(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) dout[i] = awing_loss(target[i], ws.output[i], lp).gradient;
  net.backward(ws, dout, grad);

  trainer::TinyNet<long double> wide(shape, 0);
  std::vector<long double> params(net.parameters().begin(), net.parameters().end());
  const std::vector<long double> input_ld(input.begin(), input.end());
  trainer::TinyNet<long double>::Workspace wws;
  auto objective = [&]() {
    wide.set_parameters(params);
    wide.forward(input_ld, f, wws);
    long double j = 0.0L;
    for (std::size_t i = 0; i < target.size(); ++i) j += awing_ld(target[i], wws.output[i]);
    return j;
  };
  const long double h = 1e-6L;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const long double keep = params[i];
    params[i] = keep + h;
    const long double up = objective();
    params[i] = keep - h;
    const long double down = objective();
    params[i] = keep;
    const double fd = static_cast<double>((up - down) / (2.0L * h));
    worst = std::max(worst, std::fabs(fd - grad[i]) / std::max(std::fabs(fd), 1e-3));
  }
  return {worst < 1e-4, std::to_string(net.parameter_count()) + " parameters, max rel err " + fmt("%.2e", worst)};
}

Outcome cli_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "awing_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_file_atomic(dir / "gt.txt", "a 64 64 20,24 40,24 30,35 22,44 38,44\nb 64 64 18,22 41,25 29,33 21,45 39,43\n");
  io::write_file_atomic(dir / "pred.txt", "a 64 64 21,24 40,25 30,35 22,43 38,44\nb 64 64 18,23 40,25 29,33 22,45 39,44\n");
  const std::string small = " --set train_count=4 --set test_count=2 --set epochs=1 --set frame=32x32";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"curves", "curves --kinds mse,l1,wing,awing --y 0,0.5,1 --steps 41"},
      {"render", "render " + (dir / "gt.txt").string() + " --boundary --heatmap " + (dir / "h_RUN.bin").string()},
      {"decode", "decode " + (dir / "h_1.bin").string() + " --boundary"},
      {"mask", "mask " + (dir / "h_1.bin").string()},
      {"boundary", "boundary " + (dir / "gt.txt").string() + " --id b"},
      {"coords", "coords --frame 64x64 --select all --boundary-pred " + (dir / "h_1.bin").string()},
      {"train", "train --seed 3" + small + " --score " + (dir / "score_RUN.csv").string()},
      {"ablate", "ablate --seeds 1,2 --variants MSE,AW+WM+B+C+CB" + small},
      {"sweep", "sweep --omegas 10,14 --thetas 0.5" + small},
      {"evaluate", "evaluate " + (dir / "gt.txt").string() + " " + (dir / "pred.txt").string() + " --pck 0.1 --ced " +
                       (dir / "ced_RUN.csv").string()},
  };
  std::vector<std::string> bad;
  for (const auto& [name, args] : commands) {
    std::string outs[2];
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
      std::string a = args;
      for (std::size_t at; (at = a.find("RUN")) != std::string::npos;) a.replace(at, 3, std::to_string(run + 1));
      const fs::path out = dir / (name + "_" + std::to_string(run + 1) + ".csv");
      const std::string cmd = "\"" + cli + "\" " + a + " -o " + out.string() + " 2>/dev/null";
      if (std::system(cmd.c_str()) != 0 || !fs::exists(out)) {
        ok = false;
        break;
      }
      outs[run] = io::read_file(out);
      if (outs[run].empty()) ok = false;
    }
    if (!ok || outs[0] != outs[1]) bad.push_back(name);
  }
  for (const char* side : {"h", "score", "ced"}) {
    const std::string ext = std::string(side) == "h" ? ".bin" : ".csv";
    if (io::read_file(dir / (std::string(side) + "_1" + ext)) != io::read_file(dir / (std::string(side) + "_2" + ext))) {
      bad.push_back(std::string(side) + " side output");
    }
  }
  fs::remove_all(dir);
  if (bad.empty()) return {true, std::to_string(commands.size()) + " commands byte-identical across reruns"};
  std::string list;
  for (const auto& b : bad) list += " " + b;
  return {false, "differing or failing:" + list};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <awing-cli> [criteria...]\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient suite", gradient_suite},
      {"AWing continuity and smoothness", continuity},
      {"adaptation of influence", adaptation},
      {"foreground fraction", foreground_fraction},
      {"weighted loss map oracle", loss_map_oracle},
      {"decode accuracy", decode_accuracy},
      {"metrics oracle", metrics_oracle},
      {"directional ablation", directional_ablation},
      {"foreground loss reduction", foreground_reduction},
      {"backprop finite differences", backprop_check},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
