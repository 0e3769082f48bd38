// Copyright 2026 The m2mt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "m2mt_cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "m2mt/attribution.hpp"
#include "m2mt/config.hpp"
#include "m2mt/ensemble.hpp"
#include "m2mt/image_io.hpp"
#include "m2mt/metrics.hpp"
#include "m2mt/network.hpp"
#include "m2mt/tensor_io.hpp"
#include "m2mt/training.hpp"
#include "m2mt/weights_io.hpp"

namespace m2mt::cli {

namespace {

std::vector<std::size_t> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument(flag + ": expected " + std::to_string(n) + " comma-separated integers, got '" +
                                  text + "'");
    }
    out.push_back(std::stoul(item));
  }
  if (out.size() != n) {
    throw std::invalid_argument(flag + ": expected " + std::to_string(n) + " comma-separated integers, got '" + text +
                                "'");
  }
  return out;
}

NetConfig config_or_default(const std::string& path) { return path.empty() ? NetConfig() : load_config(path); }

bool is_lft_path(const std::filesystem::path& p) { return p.extension() == ".lft"; }

template <class T>
void write_lf(const LfTensor<T>& lf, const std::filesystem::path& path, int bitdepth) {
  if (is_lft_path(path)) {
    write_lft(path, lf.tensor());
  } else {
    save_lf(lf, path, bitdepth);
  }
}

Dtype weight_dtype(const WeightFile& file) {
  if (file.manifest.empty()) throw FormatError("weights: empty manifest");
  return file.manifest.front().dtype;
}

Dtype parse_dtype_flag(const std::string& s) {
  if (s == "f32") return Dtype::kF32;
  if (s == "f64") return Dtype::kF64;
  throw std::invalid_argument("--dtype must be f32 or f64, got '" + s + "'");
}

// ---------------------------------------------------------------------------
// sr

struct SrArgs {
  std::string weights, input, output;
  std::size_t scale = 0;
  std::size_t central = 0;
  int bitdepth = 8;
  bool ensemble = false;
};

template <class T>
void run_sr(const SrArgs& a, const WeightFile& file, std::ostream& out) {
  const LfTensor<T> lr = load_lf_any<T>(a.input, a.central);
  const LfShape s = lr.shape();
  NetKind kind = NetKind::kM2mt;
  const NetConfig cfg = infer_config(file, s.u, s.v, &kind);
  if (a.scale != 0 && a.scale != cfg.r) {
    throw std::invalid_argument("--scale " + std::to_string(a.scale) + " does not match the weights (r=" +
                                std::to_string(cfg.r) + ")");
  }
  LfMap<T> f;
  if (kind == NetKind::kO2o) {
    auto net = std::make_shared<O2OBaseline<T>>(load_o2o<T>(file, cfg));
    f = [net](const LfTensor<T>& x) { return forward_o2o(*net, x); };
  } else {
    auto net = std::make_shared<Network<T>>(load_network<T>(file, cfg));
    f = [net](const LfTensor<T>& x) { return forward(*net, x); };
  }
  LfTensor<T> sr;
  std::size_t members = 1;
  if (a.ensemble) {
    std::vector<LfTransform> group;
    const bool square = s.u == s.v && s.w == s.h;
    for (const LfTransform& t : dihedral_group())
      if (square || !t.transpose) group.push_back(t);
    members = group.size();
    sr = self_ensemble<T>(f, lr, group);
  } else {
    sr = f(lr);
  }
  write_lf(sr, a.output, a.bitdepth);
  const LfShape o = sr.shape();
  out << "views=" << o.u << "x" << o.v << "\nwidth=" << o.w << "\nheight=" << o.h << "\nscale=" << cfg.r
      << "\nensemble_members=" << members << "\noutput=" << a.output << "\n";
}

void add_sr(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  auto args = std::make_shared<SrArgs>();
  CLI::App* sub = app.add_subcommand("sr", "Super-resolve a light field with stored weights");
  sub->add_option("--weights", args->weights, "M2MW1 weight file")->required();
  sub->add_option("--input", args->input, "Low-resolution light field (view directory or .lft)")->required();
  sub->add_option("--output", args->output, "Output directory, or a .lft file")->required();
  sub->add_option("--scale", args->scale, "Expected upscaling factor; must match the weights");
  sub->add_option("--central", args->central, "Crop the input to its central NxN views");
  sub->add_option("--bitdepth", args->bitdepth, "PGM bit depth of the output views")->check(CLI::IsMember({8, 16}));
  sub->add_flag("--ensemble", args->ensemble, "Average over the eight flips and transposes");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      const WeightFile file = read_weights(args->weights);
      if (weight_dtype(file) == Dtype::kF64) {
        run_sr<double>(*args, file, out);
      } else {
        run_sr<float>(*args, file, out);
      }
    };
  });
}

// ---------------------------------------------------------------------------
// metrics

void add_metrics(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string a, b, format = "both";
    std::size_t central = 0;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("metrics", "Per-view PSNR and SSIM between two light fields");
  sub->add_option("--a", args->a, "Test light field")->required();
  sub->add_option("--b", args->b, "Reference light field")->required();
  sub->add_option("--central", args->central, "Crop both inputs to their central NxN views");
  sub->add_option("--format", args->format, "table, kv or both")->check(CLI::IsMember({"table", "kv", "both"}));
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      const MetricReport rep =
          lf_metrics(load_lf_any<double>(args->a, args->central), load_lf_any<double>(args->b, args->central));
      if (args->format != "kv") out << format_table(rep);
      if (args->format != "table") out << format_kv(rep);
    };
  });
}

// ---------------------------------------------------------------------------
// lam

void add_lam(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string weights, input, window, view, heatmap;
    double sigma = 4.0;
    std::size_t steps = 50;
    std::size_t central = 0;
    bool literal = true;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("lam", "Local attribution map for a window of the super-resolved output");
  sub->add_option("--weights", args->weights, "M2MW1 weight file")->required();
  sub->add_option("--input", args->input, "Low-resolution light field")->required();
  sub->add_option("--window", args->window, "x,y,l of the output window")->required();
  sub->add_option("--sigma", args->sigma, "Blur width at the start of the path");
  sub->add_option("--steps", args->steps, "Path steps");
  sub->add_option("--view", args->view, "u,v of the target view (default: central view)");
  sub->add_option("--heatmap", args->heatmap, "Write the map as an 8-bit PGM");
  sub->add_option("--central", args->central, "Crop the input to its central NxN views");
  sub->add_flag("--literal,!--no-literal", args->literal, "Forward-difference path weighting (default on)");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      const auto w = parse_list(args->window, 3, "--window");
      LamConfig cfg;
      cfg.m = args->steps;
      cfg.sigma = args->sigma;
      cfg.window = {w[0], w[1], w[2]};
      cfg.literal = args->literal;
      if (!args->view.empty()) {
        const auto uv = parse_list(args->view, 2, "--view");
        cfg.view_u = uv[0];
        cfg.view_v = uv[1];
      }
      const WeightFile file = read_weights(args->weights);
      const LfTensor<double> lr = load_lf_any<double>(args->input, args->central);
      NetKind kind = NetKind::kM2mt;
      const NetConfig net_cfg = infer_config(file, lr.shape().u, lr.shape().v, &kind);
      LamModel model;
      if (kind == NetKind::kO2o) {
        auto net = std::make_shared<O2OBaselineT<Var<double>>>(bind_constant<double>(load_o2o<double>(file, net_cfg)));
        model = [net](const Var<double>& x) { return forward_o2o(*net, x); };
      } else {
        auto net = std::make_shared<NetworkT<Var<double>>>(bind_constant<double>(load_network<double>(file, net_cfg)));
        model = [net](const Var<double>& x) { return forward(*net, x); };
      }
      const LamResult res = lam(model, lr, cfg);
      if (!args->heatmap.empty()) write_heatmap_pgm(args->heatmap, res.map);
      out << "model=" << (kind == NetKind::kO2o ? "o2o" : "m2mt") << "\ngini=" << format_number(res.gini)
          << "\ndi=" << format_number(res.di) << "\ndegenerate=" << (res.degenerate ? "true" : "false") << "\n";
    };
  });
}

// ---------------------------------------------------------------------------
// params, flops

void add_params(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  auto config = std::make_shared<std::string>();
  CLI::App* sub = app.add_subcommand("params", "Parameter count per registry entry");
  sub->add_option("--config", *config, "key=value network config (default: 4x reference config)");
  sub->callback([config, &action, &out] {
    action = [config, &out] {
      const ParamReport rep = count_params(config_or_default(*config));
      for (const ParamEntry& e : rep.entries)
        out << e.name << " " << to_string(e.dims) << " " << format_number(static_cast<double>(e.count)) << "\n";
      for (std::size_t i = 0; i < rep.per_block.size(); ++i)
        out << "block_" << i << "=" << format_number(static_cast<double>(rep.per_block[i])) << "\n";
      out << "head_tail=" << format_number(static_cast<double>(rep.head_tail))
          << "\ntotal=" << format_number(static_cast<double>(rep.total))
          << "\ntotal_M=" << format_number(static_cast<double>(rep.total) / 1e6) << "\n";
    };
  });
}

void add_flops(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string config, patch = "32";
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("flops", "Analytic FLOP count for one forward pass");
  sub->add_option("--config", args->config, "key=value network config (default: 4x reference config)");
  sub->add_option("--patch", args->patch, "Input view size N or WxH (default 32)");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      std::string p = args->patch;
      const auto xpos = p.find('x');
      if (xpos != std::string::npos) p[xpos] = ',';
      const auto dims = parse_list(p, xpos == std::string::npos ? 1 : 2, "--patch");
      const FlopReport rep = count_flops(config_or_default(args->config), dims[0], dims.back());
      for (const FlopEntry& e : rep.entries) out << e.name << " " << format_number(e.flops) << "\n";
      out << "head_tail=" << format_number(rep.head_tail) << "\nper_block=" << format_number(rep.per_block)
          << "\ntotal=" << format_number(rep.total) << "\ntotal_G=" << format_number(rep.total / 1e9) << "\n";
    };
  });
}

// ---------------------------------------------------------------------------
// gradcheck

void add_gradcheck(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::uint64_t seed = 0;
    std::string dims = "2,2,4,4";
    double tol = 1e-5;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("gradcheck", "Finite-difference check of the toy network under an L1 loss");
  sub->add_option("--seed", args->seed, "Seed for weights, input and target");
  sub->add_option("--dims", args->dims, "U,V,W,H of the low-resolution input");
  sub->add_option("--tol", args->tol, "Maximum accepted scaled error (max |analytic - numeric| over max |analytic|)");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      const auto d = parse_list(args->dims, 4, "--dims");
      NetConfig cfg;
      cfg.u = d[0];
      cfg.v = d[1];
      cfg.c = 3;
      cfg.c_cor = 5;
      cfg.d = 5;
      cfg.n1 = 2;
      cfg.n2 = 1;
      cfg.r = 2;
      cfg.seed = args->seed;
      const auto net = bind_constant<double>(build<double>(cfg));
      std::mt19937_64 rng(args->seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      Tensor<double> x({d[0], d[1], d[2], d[3], 1});
      for (double& e : x.data()) e = uni(rng);
      // The target sits 0.5 from the output in either direction, so |sr - hr|
      // has no kinks within the finite-difference step and the loss stays
      // small enough for the step to resolve it.
      Tensor<double> hr = forward(net, Var<double>::constant(x)).value();
      for (double& e : hr.data()) e += rng() % 2 ? 0.5 : -0.5;
      const Var<double> target = Var<double>::constant(hr);
      const GradcheckReport rep = gradcheck<double>(
          [&](const Var<double>& in) { return l1_loss(forward(net, in), target); }, x, 1e-5);
      const bool ok = rep.finite && rep.scaled_error <= args->tol;
      out << "scaled_error=" << format_number(rep.scaled_error) << "\nmax_rel_error=" << format_number(rep.max_rel_error)
          << "\nworst_index=" << rep.worst_index
          << "\nworst_analytic=" << format_number(rep.worst_analytic)
          << "\nworst_numeric=" << format_number(rep.worst_numeric) << "\nstatus=" << (ok ? "pass" : "fail") << "\n";
      if (!ok) throw std::runtime_error("gradcheck exceeded tolerance " + format_number(args->tol));
    };
  });
}

// ---------------------------------------------------------------------------
// train-toy, init

NetConfig toy_config() {
  NetConfig cfg;
  cfg.c = 16;
  cfg.c_cor = 32;
  cfg.d = 32;
  cfg.n1 = 2;
  cfg.n2 = 1;
  cfg.r = 2;
  return cfg;
}

template <class T>
void run_train(const NetConfig& cfg, const std::string& input, const TrainConfig& tc, const std::string& weights,
               const std::string& curve_path, std::ostream& out) {
  const LfTensor<T> hr = load_lf_any<T>(input);
  if (hr.shape().u != cfg.u || hr.shape().v != cfg.v) {
    throw std::invalid_argument("train-toy: input grid " + std::to_string(hr.shape().u) + "x" +
                                std::to_string(hr.shape().v) + " does not match the config");
  }
  const std::vector<TrainPair<T>> pairs{make_pair(hr, cfg.r)};
  Network<T> net = build<T>(cfg);
  const std::vector<double> curve = train_toy<T>(net, pairs, tc);
  std::ofstream file;
  if (!curve_path.empty()) {
    file.open(curve_path);
    if (!file) throw IoError("cannot open '" + curve_path + "' for writing");
  }
  std::ostream& csv = curve_path.empty() ? out : file;
  csv << "iter,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) csv << i << "," << format_number(curve[i]) << "\n";
  if (!weights.empty()) save_weights<T>(weights, net);
  if (!curve_path.empty()) {
    out << "initial_loss=" << format_number(curve.front()) << "\nfinal_loss=" << format_number(curve.back()) << "\n";
  }
}

void add_train(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string config, input, weights, curve, loss = "l1", dtype = "f32";
    TrainConfig tc;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("train-toy", "Fit a small network to one light field");
  sub->add_option("--config", args->config, "key=value network config (default: C=16, C_Cor=D=32, n1=2, n2=1, r=2)");
  sub->add_option("--input", args->input, "High-resolution light field; the input is its bicubic downsampling")
      ->required();
  sub->add_option("--iters", args->tc.iters, "Adam steps");
  sub->add_option("--lr", args->tc.lr, "Learning rate");
  sub->add_option("--batch", args->tc.batch, "Samples per step");
  sub->add_option("--loss", args->loss, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  sub->add_option("--dtype", args->dtype, "f32 or f64");
  sub->add_option("--out-weights", args->weights, "Write the trained weights");
  sub->add_option("--curve", args->curve, "Write the loss curve CSV here instead of stdout");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      const NetConfig cfg = args->config.empty() ? toy_config() : load_config(args->config);
      TrainConfig tc = args->tc;
      tc.loss = args->loss == "l2" ? LossKind::kL2 : LossKind::kL1;
      tc.seed = cfg.seed;
      if (parse_dtype_flag(args->dtype) == Dtype::kF64) {
        run_train<double>(cfg, args->input, tc, args->weights, args->curve, out);
      } else {
        run_train<float>(cfg, args->input, tc, args->weights, args->curve, out);
      }
    };
  });
}

void add_init(CLI::App& app, std::function<void()>& action, std::ostream& out) {
  struct Args {
    std::string config, weights, dtype = "f32";
    std::optional<std::uint64_t> seed;
    bool o2o = false, zero = false;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub = app.add_subcommand("init", "Write freshly initialized weights");
  sub->add_option("--config", args->config, "key=value network config (default: 4x reference config)");
  sub->add_option("--seed", args->seed, "Overrides the config seed");
  sub->add_option("--out-weights", args->weights, "Output M2MW1 file")->required();
  sub->add_option("--dtype", args->dtype, "f32 or f64");
  sub->add_flag("--o2o", args->o2o, "Build the one-to-one baseline instead");
  sub->add_flag("--zero", args->zero, "Zero every parameter (the network then reduces to bicubic upsampling)");
  sub->callback([args, &action, &out] {
    action = [args, &out] {
      NetConfig cfg = config_or_default(args->config);
      if (args->seed) cfg.seed = *args->seed;
      auto emit = [&](auto tag) {
        using T = decltype(tag);
        if (args->o2o) {
          O2OBaseline<T> net = build_o2o<T>(cfg);
          if (args->zero) zero_parameters<T>(net);
          save_weights<T>(args->weights, net);
          out << "params=" << format_number(static_cast<double>(count_params<T>(net).total)) << "\n";
        } else {
          Network<T> net = build<T>(cfg);
          if (args->zero) zero_parameters<T>(net);
          save_weights<T>(args->weights, net);
          out << "params=" << format_number(static_cast<double>(count_params<T>(net).total)) << "\n";
        }
      };
      if (parse_dtype_flag(args->dtype) == Dtype::kF64) {
        emit(double{});
      } else {
        emit(float{});
      }
      out << "seed=" << cfg.seed << "\nweights=" << args->weights << "\n";
    };
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Light field super-resolution with many-to-many attention", "m2mt");
  app.require_subcommand(1);
  std::function<void()> action;
  add_sr(app, action, out);
  add_metrics(app, action, out);
  add_lam(app, action, out);
  add_params(app, action, out);
  add_flops(app, action, out);
  add_gradcheck(app, action, out);
  add_train(app, action, out);
  add_init(app, action, out);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "m2mt: error: " << e.what() << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }
  try {
    if (action) action();
  } catch (const std::exception& e) {
    err << "m2mt: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace m2mt::cli
