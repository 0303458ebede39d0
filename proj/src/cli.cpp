#include "salient/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "salient/episode.hpp"
#include "salient/error.hpp"
#include "salient/network.hpp"
#include "salient/render.hpp"
#include "salient/rollout.hpp"
#include "salient/saliency.hpp"

namespace salient {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RangeOptions {
  long t_start = 0;
  long t_end = -1;  // exclusive; -1 means episode end
};

struct OverlayOptions {
  double gain = 1.0;
  std::string norm = "episode-max";
  std::size_t upscale = 1;
};

struct SaliencyOptions {
  std::string weights, episode, out;
  std::string head = "both";
  std::size_t stride = 5;
  double blur_sigma = 3.0;
  double mask_var = 25.0;
  RangeOptions range;
  int workers = 1;
  OverlayOptions overlay;
  bool oracle_check = false;
};

struct MemoryOptions {
  std::string weights, episode, out;
  double factor = 0.99;
  bool perturb_hidden = false;
  RangeOptions range;
};

struct JacobianOptions {
  std::string weights, episode, out;
  std::string head = "both";
  double epsilon = 1e-3;
  RangeOptions range;
  int workers = 1;
  OverlayOptions overlay;
};

struct PreprocessOptions {
  std::string input, out, source;
  std::size_t crop_top = 0, crop_left = 0;
  std::vector<double> gray_weights{0.299, 0.587, 0.114};
};

struct SynthEpisodeOptions {
  std::uint64_t seed = 7;
  std::size_t frames = 16;
  std::string pattern = "bouncing_dot";
  std::string out;
  std::size_t hint_rows = 0;
  std::size_t n_actions = 6;
};

struct SynthWeightsOptions {
  std::uint64_t seed = 42;
  std::size_t n_actions = 6;
  std::string activation = "elu";
  double scale = 0.1;
  std::string out;
};

struct StatsOptions {
  std::string maps, out;
  std::string head = "actor";
  std::string region = "0:16,0:80";
};

struct TimeRange {
  std::size_t begin = 0, end = 0;
};

TimeRange resolve_range(const RangeOptions& r, std::size_t length) {
  const long end = r.t_end < 0 ? static_cast<long>(length) : r.t_end;
  if (r.t_start < 0 || r.t_start >= end || end > static_cast<long>(length)) {
    throw ConfigError("timestep range [" + std::to_string(r.t_start) + ", " + std::to_string(end) +
                      ") is empty or outside the episode (T = " + std::to_string(length) + ")");
  }
  return {static_cast<std::size_t>(r.t_start), static_cast<std::size_t>(end)};
}

std::vector<Head> resolve_heads(const std::string& head) {
  if (head == "both") return {Head::actor, Head::critic};
  return {parse_head(head)};
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string map_stem(Head head, std::size_t t) {
  char name[32];
  std::snprintf(name, sizeof name, "%s_t%06zu", head_name(head).c_str(), t);
  return name;
}

ActorCritic load_network(const std::string& path) {
  if (path.empty()) throw ConfigError("--weights is required");
  LoadedWeights w = load_weights(path);
  try {
    return ActorCritic(w.config, std::move(w.params));
  } catch (const ShapeError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

Episode load_input_episode(const std::string& path) {
  if (path.empty()) throw ConfigError("--episode is required");
  return load_episode(path);
}

void require_out(const std::string& out) {
  if (out.empty()) throw ConfigError("--out is required");
}

void check_workers(int workers) {
  if (workers < 1) throw ConfigError("--workers must be at least 1, got " + std::to_string(workers));
}

// Overlays and series shared by the saliency and jacobian commands.
void emit_maps(const fs::path& out, const Episode& episode, const TimeRange& range, const std::vector<Head>& heads,
               const std::vector<SaliencyMap>& actor_maps, const std::vector<SaliencyMap>& critic_maps,
               const OverlayConfig& overlay_cfg, std::size_t upscale) {
  const OverlayScales scales = resolve_scales(actor_maps, critic_maps, overlay_cfg.normalization);
  const bool has_actor = !actor_maps.empty(), has_critic = !critic_maps.empty();
  std::vector<Image8> frames;
  Series series;
  for (Head h : heads) {
    series.names.push_back(head_name(h) + "_max");
    series.names.push_back(head_name(h) + "_total");
  }
  series.columns.resize(series.names.size());
  for (std::size_t t = range.begin; t < range.end; ++t) {
    const std::size_t k = t - range.begin;
    const SaliencyMap* actor = has_actor ? &actor_maps[k] : nullptr;
    const SaliencyMap* critic = has_critic ? &critic_maps[k] : nullptr;
    frames.push_back(to_image8(overlay(episode.frames[t], actor, critic, overlay_cfg, scales), upscale));
    series.t.push_back(t);
    std::size_t col = 0;
    for (Head h : heads) {
      const SaliencyMap& m = h == Head::actor ? *actor : *critic;
      series.columns[col++].push_back(m.scores.max_value());
      series.columns[col++].push_back(m.scores.sum());
    }
  }
  write_frames(frames, out / "overlays", range.begin);
  write_series(series, out / "series.csv");
}

int cmd_saliency(const SaliencyOptions& o) {
  SaliencyConfig cfg;
  cfg.patch_stride = o.stride;
  cfg.blur_sigma = o.blur_sigma;
  cfg.mask_variance = o.mask_var;
  cfg.validate();
  const std::vector<Head> heads = resolve_heads(o.head);
  OverlayConfig overlay_cfg{parse_normalization(o.overlay.norm), o.overlay.gain};
  if (!(overlay_cfg.intensity_gain > 0.0)) throw ConfigError("--gain must be positive");
  if (o.overlay.upscale < 1) throw ConfigError("--upscale must be at least 1");
  check_workers(o.workers);
  require_out(o.out);

  const ActorCritic net = load_network(o.weights);
  const Episode episode = load_input_episode(o.episode);
  const TimeRange range = resolve_range(o.range, episode.length());

  const fs::path out = o.out;
  make_dir(out / "maps");
  const RolloutCache cache = rollout(net, episode);

  std::vector<SaliencyMap> actor_maps, critic_maps;
  bool oracle_ok = true;
  for (std::size_t t = range.begin; t < range.end; ++t) {
    SaliencyPair pair = saliency_maps(cache, net, episode, t, cfg, o.workers);
    for (Head h : heads) {
      SaliencyMap& map = h == Head::actor ? pair.actor : pair.critic;
      if (o.oracle_check) {
        SaliencyConfig oracle_cfg = cfg;
        oracle_cfg.head = h;
        const SaliencyMap oracle = brute_force_map(cache, net, episode, t, oracle_cfg, o.workers);
        const std::size_t extent = cfg.grid_extent();
        for (std::size_t gi = 0; gi < extent; ++gi) {
          for (std::size_t gj = 0; gj < extent; ++gj) {
            const float grid = map.grid_scores.at(gi, gj);
            const float ref = oracle.scores.at(gi * cfg.patch_stride, gj * cfg.patch_stride);
            if (grid != ref) {
              std::cerr << "oracle mismatch: " << head_name(h) << " t=" << t << " (" << gi * cfg.patch_stride << ", "
                        << gj * cfg.patch_stride << ") grid=" << grid << " brute-force=" << ref << '\n';
              oracle_ok = false;
            }
          }
        }
        if (cfg.patch_stride == 1 && !(map.scores == oracle.scores)) {
          std::cerr << "oracle mismatch: " << head_name(h) << " t=" << t << " upsampled stride-1 map differs\n";
          oracle_ok = false;
        }
      }
      export_map(map, cfg, out / "maps" / map_stem(h, t));
      (h == Head::actor ? actor_maps : critic_maps).push_back(std::move(map));
    }
  }
  emit_maps(out, episode, range, heads, actor_maps, critic_maps, overlay_cfg, o.overlay.upscale);

  write_json(out / "run.json", {{"command", "saliency"},
                                {"weights", o.weights},
                                {"episode", o.episode},
                                {"head", o.head},
                                {"stride", o.stride},
                                {"blur_sigma", o.blur_sigma},
                                {"mask_var", o.mask_var},
                                {"t_start", range.begin},
                                {"t_end", range.end},
                                {"workers", o.workers},
                                {"gain", o.overlay.gain},
                                {"norm", normalization_string(overlay_cfg.normalization)},
                                {"upscale", o.overlay.upscale},
                                {"oracle_check", o.oracle_check},
                                {"oracle_ok", oracle_ok}});
  if (!oracle_ok) {
    std::cerr << "oracle check FAILED\n";
    return kExitFailure;
  }
  if (o.oracle_check) std::cout << "oracle check passed\n";
  return kExitOk;
}

int cmd_memory(const MemoryOptions& o) {
  if (!(o.factor > 0.0 && o.factor <= 1.0)) throw ConfigError("--factor must be in (0, 1]");
  require_out(o.out);
  const ActorCritic net = load_network(o.weights);
  const Episode episode = load_input_episode(o.episode);
  const TimeRange range = resolve_range(o.range, episode.length());

  const fs::path out = o.out;
  make_dir(out);
  const RolloutCache cache = rollout(net, episode);
  Series series;
  series.names = {"memory_saliency_half_sq_dlogits"};
  series.columns.resize(1);
  for (std::size_t t = range.begin; t < range.end; ++t) {
    series.t.push_back(t);
    series.columns[0].push_back(memory_saliency(cache, net, episode, t, o.factor, o.perturb_hidden));
  }
  write_series(series, out / "series.csv");
  write_json(out / "run.json", {{"command", "memory"},
                                {"weights", o.weights},
                                {"episode", o.episode},
                                {"factor", o.factor},
                                {"perturb_hidden", o.perturb_hidden},
                                {"metric", "0.5*||delta logits||^2"},
                                {"t_start", range.begin},
                                {"t_end", range.end}});
  return kExitOk;
}

int cmd_jacobian(const JacobianOptions& o) {
  if (!(o.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
  const std::vector<Head> heads = resolve_heads(o.head);
  OverlayConfig overlay_cfg{parse_normalization(o.overlay.norm), o.overlay.gain};
  if (!(overlay_cfg.intensity_gain > 0.0)) throw ConfigError("--gain must be positive");
  if (o.overlay.upscale < 1) throw ConfigError("--upscale must be at least 1");
  check_workers(o.workers);
  require_out(o.out);
  const ActorCritic net = load_network(o.weights);
  const Episode episode = load_input_episode(o.episode);
  const TimeRange range = resolve_range(o.range, episode.length());

  const fs::path out = o.out;
  make_dir(out / "maps");
  const RolloutCache cache = rollout(net, episode);
  SaliencyConfig cfg;
  cfg.patch_stride = 1;
  std::vector<SaliencyMap> actor_maps, critic_maps;
  for (std::size_t t = range.begin; t < range.end; ++t) {
    for (Head h : heads) {
      SaliencyMap map = jacobian_saliency(cache, net, episode, t, h, o.epsilon, o.workers);
      export_map(map, cfg, out / "maps" / map_stem(h, t), "jacobian-central-difference");
      (h == Head::actor ? actor_maps : critic_maps).push_back(std::move(map));
    }
  }
  emit_maps(out, episode, range, heads, actor_maps, critic_maps, overlay_cfg, o.overlay.upscale);
  write_json(out / "run.json", {{"command", "jacobian"},
                                {"weights", o.weights},
                                {"episode", o.episode},
                                {"head", o.head},
                                {"epsilon", o.epsilon},
                                {"t_start", range.begin},
                                {"t_end", range.end},
                                {"workers", o.workers},
                                {"gain", o.overlay.gain},
                                {"norm", normalization_string(overlay_cfg.normalization)}});
  return kExitOk;
}

int cmd_preprocess(const PreprocessOptions& o) {
  if (o.input.empty()) throw ConfigError("--input is required");
  require_out(o.out);
  if (o.gray_weights.size() != 3) throw ConfigError("--gray-weights needs exactly three values");
  PreprocessConfig cfg;
  cfg.crop_top = o.crop_top;
  cfg.crop_left = o.crop_left;
  cfg.grayscale_weights = {o.gray_weights[0], o.gray_weights[1], o.gray_weights[2]};
  if (std::abs(o.gray_weights[0] + o.gray_weights[1] + o.gray_weights[2] - 1.0) > 1e-6) {
    throw ConfigError("--gray-weights must sum to 1");
  }
  if (!fs::is_directory(o.input)) throw LoadError("raw frame directory not found: " + o.input);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw LoadError("no .png frames in " + o.input);

  Episode episode;
  episode.source = o.source.empty() ? fs::path(o.input).filename().string() : o.source;
  for (const auto& file : files) {
    try {
      episode.frames.push_back(preprocess(read_png(file), cfg));
    } catch (const ParameterError& e) {
      throw ConfigError(file.string() + ": " + e.what());
    }
  }
  save_episode(episode, o.out);
  std::cout << "wrote " << episode.length() << " frames to " << o.out << '\n';
  return kExitOk;
}

int cmd_synth_episode(const SynthEpisodeOptions& o) {
  const SynthPattern pattern = parse_pattern(o.pattern);
  if (o.frames < 1) throw ConfigError("--frames must be at least 1");
  if (o.hint_rows > 5) throw ConfigError("--hint-rows must be in [0, 5]");
  if (o.hint_rows > 0 && (o.n_actions < 2 || o.n_actions > kFrameSize)) {
    throw ConfigError("--n-actions must be in [2, 80]");
  }
  require_out(o.out);
  Episode episode = synth_episode(o.seed, o.frames, pattern);
  if (o.hint_rows > 0) {
    std::mt19937_64 rng(o.seed ^ 0x9E3779B97F4A7C15ull);
    std::vector<int> actions;
    for (auto& frame : episode.frames) {
      const auto action = static_cast<std::size_t>(rng() % o.n_actions);
      actions.push_back(static_cast<int>(action));
      frame = inject_hint_pixels(frame, action, o.n_actions, o.hint_rows);
    }
    episode.actions = std::move(actions);
    episode.source += ":hints";
  }
  save_episode(episode, o.out);
  std::cout << "wrote " << episode.length() << " frames to " << o.out << '\n';
  return kExitOk;
}

int cmd_synth_weights(const SynthWeightsOptions& o) {
  NetworkConfig config;
  config.n_actions = o.n_actions;
  config.activation = parse_activation(o.activation);
  config.validate();
  if (!(o.scale >= 0.0)) throw ConfigError("--scale must be non-negative");
  require_out(o.out);
  save_weights(o.out, config, synth_weights(o.seed, config, o.scale));
  std::cout << "wrote weights to " << o.out << '\n';
  return kExitOk;
}

int cmd_stats(const StatsOptions& o) {
  const RegionSpec region = parse_region(o.region);
  const Head head = parse_head(o.head);
  if (o.maps.empty()) throw ConfigError("--maps is required");
  fs::path dir = o.maps;
  if (fs::is_directory(dir / "maps")) dir /= "maps";
  if (!fs::is_directory(dir)) throw LoadError("maps directory not found: " + o.maps);

  std::vector<fs::path> stems;
  const std::string prefix = head_name(head) + "_t";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".json") {
      stems.push_back(entry.path().parent_path() / entry.path().stem());
    }
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw LoadError("no " + head_name(head) + " maps in " + dir.string());

  Series series;
  series.names = {"region_mass"};
  series.columns.resize(1);
  for (const auto& stem : stems) {
    const SaliencyMap map = import_map(stem);
    series.t.push_back(map.t);
    series.columns[0].push_back(region_mass(map, region));
  }
  const fs::path out = o.out.empty() ? fs::path(o.maps) / ("stats_" + head_name(head) + ".csv") : fs::path(o.out);
  if (out.has_parent_path()) make_dir(out.parent_path());
  write_series(series, out);
  std::cout << "wrote " << series.t.size() << " rows to " << out.string() << '\n';
  return kExitOk;
}

void add_range(CLI::App* cmd, RangeOptions& r) {
  cmd->add_option("--t-start", r.t_start, "First timestep (0-based)")->capture_default_str();
  cmd->add_option("--t-end", r.t_end, "One past the last timestep; -1 = episode end")->capture_default_str();
}

void add_overlay(CLI::App* cmd, OverlayOptions& o) {
  cmd->add_option("--gain", o.gain, "Overlay intensity gain")->capture_default_str();
  cmd->add_option("--norm", o.norm, "Overlay normalization: episode-max or fixed:<s>")->capture_default_str();
  cmd->add_option("--upscale", o.upscale, "Integer upscale factor for overlay PNGs")->capture_default_str();
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << '\n';
    return kExitLoad;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kExitLoad;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r\"'");
  if (b == std::string::npos) return "";
  const auto e = text.find_last_not_of(" \t\r\"'");
  return text.substr(b, e - b + 1);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Appends `--key value` for every config entry whose flag is absent from args.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> extra;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string content = trim(line.substr(0, line.find_first_of("#;")));
    if (content.empty() || content.front() == '[') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    std::string key = trim(content.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(content.substr(eq + 1));
    const std::string flag = "--" + key;
    if (key == "config" || has_flag(args, flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Perturbation saliency maps for recurrent actor-critic agents"};
  app.require_subcommand(1);
  const int workers_default = default_workers();
  std::string config_file;

  SaliencyOptions sal;
  sal.workers = workers_default;
  auto* s = app.add_subcommand("saliency", "Blur-perturbation saliency maps, overlays and per-frame statistics");
  s->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  s->add_option("--weights", sal.weights, "Weight container directory");
  s->add_option("--episode", sal.episode, "Episode directory");
  s->add_option("--out", sal.out, "Output directory");
  s->add_option("--head", sal.head, "actor, critic or both")->capture_default_str();
  s->add_option("--stride", sal.stride, "Patch stride k")->capture_default_str();
  s->add_option("--blur-sigma", sal.blur_sigma, "Gaussian blur sigma")->capture_default_str();
  s->add_option("--mask-var", sal.mask_var, "Perturbation mask variance")->capture_default_str();
  add_range(s, sal.range);
  s->add_option("--workers", sal.workers, "Worker threads")->capture_default_str();
  add_overlay(s, sal.overlay);
  s->add_flag("--oracle-check", sal.oracle_check, "Compare grid points against the stride-1 brute-force map");

  MemoryOptions mem;
  auto* m = app.add_subcommand("memory", "Memory saliency: shrink the LSTM cell vector and measure the logit change");
  m->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  m->add_option("--weights", mem.weights, "Weight container directory");
  m->add_option("--episode", mem.episode, "Episode directory");
  m->add_option("--out", mem.out, "Output directory");
  m->add_option("--factor", mem.factor, "Cell-vector scale factor")->capture_default_str();
  m->add_flag("--perturb-hidden", mem.perturb_hidden, "Scale the hidden vector as well");
  add_range(m, mem.range);

  JacobianOptions jac;
  jac.workers = workers_default;
  auto* j = app.add_subcommand("jacobian", "Finite-difference Jacobian saliency baseline");
  j->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  j->add_option("--weights", jac.weights, "Weight container directory");
  j->add_option("--episode", jac.episode, "Episode directory");
  j->add_option("--out", jac.out, "Output directory");
  j->add_option("--head", jac.head, "actor, critic or both")->capture_default_str();
  j->add_option("--epsilon", jac.epsilon, "Central-difference step")->capture_default_str();
  add_range(j, jac.range);
  j->add_option("--workers", jac.workers, "Worker threads")->capture_default_str();
  add_overlay(j, jac.overlay);

  PreprocessOptions pre;
  auto* p = app.add_subcommand("preprocess", "Raw PNG frames to an 80x80 episode directory");
  p->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  p->add_option("--input", pre.input, "Directory of raw grayscale or RGB PNG frames");
  p->add_option("--out", pre.out, "Episode output directory");
  p->add_option("--crop-top", pre.crop_top, "Crop row offset after downsampling")->capture_default_str();
  p->add_option("--crop-left", pre.crop_left, "Crop column offset after downsampling")->capture_default_str();
  p->add_option("--gray-weights", pre.gray_weights, "R,G,B grayscale weights")->delimiter(',')->capture_default_str();
  p->add_option("--source", pre.source, "Source name recorded in episode.json");

  SynthEpisodeOptions se;
  auto* e = app.add_subcommand("synth-episode", "Deterministic synthetic episode");
  e->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  e->add_option("--seed", se.seed, "RNG seed")->capture_default_str();
  e->add_option("--frames", se.frames, "Number of frames T")->capture_default_str();
  e->add_option("--pattern", se.pattern, "bouncing_dot or drifting_bar")->capture_default_str();
  e->add_option("--hint-rows", se.hint_rows, "Inject one-hot hint pixels in this many top rows (0 = none)")
      ->capture_default_str();
  e->add_option("--n-actions", se.n_actions, "Action count for hint blocks")->capture_default_str();
  e->add_option("--out", se.out, "Episode output directory");

  SynthWeightsOptions sw;
  auto* w = app.add_subcommand("synth-weights", "Deterministic random weight container");
  w->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  w->add_option("--seed", sw.seed, "RNG seed")->capture_default_str();
  w->add_option("--n-actions", sw.n_actions, "Action-space size n")->capture_default_str();
  w->add_option("--activation", sw.activation, "elu, relu or tanh")->capture_default_str();
  w->add_option("--scale", sw.scale, "Uniform weight range [-scale, scale]")->capture_default_str();
  w->add_option("--out", sw.out, "Weight container output directory");

  StatsOptions st;
  auto* t = app.add_subcommand("stats", "Region-mass time series from saved saliency maps");
  t->add_option("--config", config_file, "key = value file using flag names; flags on the command line win");
  t->add_option("--maps", st.maps, "Saliency output directory (or its maps/ subdirectory)");
  t->add_option("--head", st.head, "actor or critic")->capture_default_str();
  t->add_option("--region", st.region, "Half-open rows and columns r0:r1,c0:c1")->capture_default_str();
  t->add_option("--out", st.out, "CSV path (default <maps>/stats_<head>.csv)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  return guarded([&] {
    if (*s) return cmd_saliency(sal);
    if (*m) return cmd_memory(mem);
    if (*j) return cmd_jacobian(jac);
    if (*p) return cmd_preprocess(pre);
    if (*e) return cmd_synth_episode(se);
    if (*w) return cmd_synth_weights(sw);
    return cmd_stats(st);
  });
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"salient"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace salient
