#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "agrl/errors.hpp"
#include "agrl/trainer.hpp"

namespace agrl {

using nlohmann::json;

namespace {

const std::set<std::string> kMethods = {"uvfa_pqn", "uvfa_pqn_her", "leo",         "dual_leo_pqn",
                                        "ppo",      "dual_leo_ppo", "leo_dpg"};
const std::set<std::string> kEnvs = {"gridcraft_small", "gridcraft_full", "pointmaze"};

json train_to_json(const TrainConfig& t) {
  return json{{"gamma", t.gamma},
              {"lambda_q", t.lambda_q},
              {"eps_start", t.eps_start},
              {"eps_final", t.eps_final},
              {"eps_decay_frac", t.eps_decay_frac},
              {"alpha", t.alpha},
              {"acting_mode", acting_mode_to_string(t.acting_mode)},
              {"pc_coef", t.pc_coef},
              {"vc_coef", t.vc_coef},
              {"anneal_clone", t.anneal_clone},
              {"clip_eps", t.clip_eps},
              {"gae_lambda", t.gae_lambda},
              {"ent_coef", t.ent_coef},
              {"vf_coef", t.vf_coef},
              {"mask_keep_prob", t.mask_keep_prob},
              {"lr", t.lr},
              {"beta1", t.beta1},
              {"beta2", t.beta2},
              {"adam_eps", t.adam_eps},
              {"minibatch_size", t.minibatch_size},
              {"num_epochs", t.num_epochs},
              {"num_steps", t.num_steps},
              {"num_lanes", t.num_lanes},
              {"net_width", t.net_width},
              {"net_layers", t.net_layers},
              {"dpg_noise", t.dpg_noise}};
}

void train_from_json(const json& j, TrainConfig& t) {
  t.gamma = j.value("gamma", t.gamma);
  t.lambda_q = j.value("lambda_q", t.lambda_q);
  t.eps_start = j.value("eps_start", t.eps_start);
  t.eps_final = j.value("eps_final", t.eps_final);
  t.eps_decay_frac = j.value("eps_decay_frac", t.eps_decay_frac);
  t.alpha = j.value("alpha", t.alpha);
  if (j.contains("acting_mode")) {
    t.acting_mode = acting_mode_from_string(j.at("acting_mode").get<std::string>());
  }
  t.pc_coef = j.value("pc_coef", t.pc_coef);
  t.vc_coef = j.value("vc_coef", t.vc_coef);
  t.anneal_clone = j.value("anneal_clone", t.anneal_clone);
  t.clip_eps = j.value("clip_eps", t.clip_eps);
  t.gae_lambda = j.value("gae_lambda", t.gae_lambda);
  t.ent_coef = j.value("ent_coef", t.ent_coef);
  t.vf_coef = j.value("vf_coef", t.vf_coef);
  t.mask_keep_prob = j.value("mask_keep_prob", t.mask_keep_prob);
  t.lr = j.value("lr", t.lr);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.adam_eps = j.value("adam_eps", t.adam_eps);
  t.minibatch_size = j.value("minibatch_size", t.minibatch_size);
  t.num_epochs = j.value("num_epochs", t.num_epochs);
  t.num_steps = j.value("num_steps", t.num_steps);
  t.num_lanes = j.value("num_lanes", t.num_lanes);
  t.net_width = j.value("net_width", t.net_width);
  t.net_layers = j.value("net_layers", t.net_layers);
  t.dpg_noise = j.value("dpg_noise", t.dpg_noise);
}

json to_json(const RunConfig& cfg) {
  json j{{"method", cfg.method},
         {"env", cfg.env},
         {"train", train_to_json(cfg.train)},
         {"total_steps", cfg.total_steps},
         {"eval_every", cfg.eval_every},
         {"seed", cfg.seed},
         {"autocurriculum", cfg.autocurriculum},
         {"out_dir", cfg.out_dir},
         {"eval_episodes", cfg.eval_episodes},
         {"checkpoint_fracs", cfg.checkpoint_fracs},
         {"component_eval_fracs", cfg.component_eval_fracs},
         {"her_strategy", cfg.her_strategy},
         {"her_n", cfg.her_n},
         {"her_m", cfg.her_m},
         {"her_per_trajectory", cfg.her_per_trajectory},
         {"grid_spacing", cfg.grid_spacing},
         {"eps_reach", cfg.eps_reach},
         {"world_size", cfg.world_size}};
  if (cfg.has_goal_subsample) {
    j["goal_subsample"] = json{{"k", cfg.subsample_k}, {"must_include", cfg.subsample_must_include}};
  }
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.method = j.value("method", cfg.method);
    cfg.env = j.value("env", cfg.env);
    if (j.contains("train")) train_from_json(j.at("train"), cfg.train);
    cfg.total_steps = j.value("total_steps", cfg.total_steps);
    cfg.eval_every = j.value("eval_every", cfg.eval_every);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.autocurriculum = j.value("autocurriculum", cfg.autocurriculum);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.eval_episodes = j.value("eval_episodes", cfg.eval_episodes);
    if (j.contains("checkpoint_fracs")) {
      cfg.checkpoint_fracs = j.at("checkpoint_fracs").get<std::vector<double>>();
    }
    if (j.contains("component_eval_fracs")) {
      cfg.component_eval_fracs = j.at("component_eval_fracs").get<std::vector<double>>();
    }
    cfg.her_strategy = j.value("her_strategy", cfg.her_strategy);
    cfg.her_n = j.value("her_n", cfg.her_n);
    cfg.her_m = j.value("her_m", cfg.her_m);
    cfg.her_per_trajectory = j.value("her_per_trajectory", cfg.her_per_trajectory);
    cfg.grid_spacing = j.value("grid_spacing", cfg.grid_spacing);
    cfg.eps_reach = j.value("eps_reach", cfg.eps_reach);
    cfg.world_size = j.value("world_size", cfg.world_size);
    if (j.contains("goal_subsample") && !j.at("goal_subsample").is_null()) {
      cfg.has_goal_subsample = true;
      cfg.subsample_k = j.at("goal_subsample").at("k").get<int>();
      if (j.at("goal_subsample").contains("must_include")) {
        cfg.subsample_must_include =
            j.at("goal_subsample").at("must_include").get<std::vector<std::string>>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace

void RunConfig::validate() const {
  if (!kMethods.count(method)) throw ConfigError("config.method: unknown method '" + method + "'");
  if (!kEnvs.count(env)) throw ConfigError("config.env: unknown env '" + env + "'");
  const bool continuous = (env == "pointmaze");
  if ((method == "leo_dpg") != continuous) {
    throw ConfigError("config: method '" + method + "' is incompatible with env '" + env +
                      "' (leo_dpg pairs with pointmaze only)");
  }
  if (total_steps < 1) throw ConfigError("config.total_steps must be >= 1");
  if (eval_every < 1) throw ConfigError("config.eval_every must be >= 1");
  if (eval_episodes < 1) throw ConfigError("config.eval_episodes must be >= 1");
  if (has_goal_subsample && continuous) {
    throw ConfigError("config.goal_subsample: not applicable to the quantized pointmaze goal set");
  }
  if (has_goal_subsample && subsample_k < 1) throw ConfigError("config.goal_subsample.k must be >= 1");
  for (double f : checkpoint_fracs) {
    if (f <= 0.0 || f > 1.0) throw ConfigError("config.checkpoint_fracs must be in (0, 1]");
  }
  for (double f : component_eval_fracs) {
    if (f <= 0.0 || f > 1.0) throw ConfigError("config.component_eval_fracs must be in (0, 1]");
  }
  (void)algos::her_strategy_from_string(her_strategy);
  if (grid_spacing <= 0.0) throw ConfigError("config.grid_spacing must be > 0");
  if (world_size != 0 && world_size < 6) throw ConfigError("config.world_size must be 0 or >= 6");
  if (eps_reach <= 0.0) throw ConfigError("config.eps_reach must be > 0");
  train.validate();
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return from_json(j);
}

RunConfig run_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_json(j);
}

std::string run_config_to_json_text(const RunConfig& cfg) { return to_json(cfg).dump(2); }

void apply_override(RunConfig& cfg, const std::string& key_eq_value) {
  const size_t eq = key_eq_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + key_eq_value + "'");
  }
  const std::string path = key_eq_value.substr(0, eq);
  const std::string value = key_eq_value.substr(eq + 1);
  json doc = to_json(cfg);
  json* node = &doc;
  size_t start = 0;
  std::vector<std::string> parts;
  while (true) {
    const size_t dot = path.find('.', start);
    parts.push_back(path.substr(start, dot == std::string::npos ? dot : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    node = &(*node)[parts[i]];
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings are fine
  }
  (*node)[parts.back()] = parsed;
  cfg = from_json(doc);
}

}  // namespace agrl
