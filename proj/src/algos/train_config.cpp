#include "agrl/train_config.hpp"

#include "agrl/errors.hpp"

namespace agrl {

ActingMode acting_mode_from_string(const std::string& s) {
  if (s == "max") return ActingMode::Max;
  if (s == "min") return ActingMode::Min;
  if (s == "linear") return ActingMode::Linear;
  throw ConfigError("unknown acting mode: " + s);
}

const char* acting_mode_to_string(ActingMode m) {
  switch (m) {
    case ActingMode::Max: return "max";
    case ActingMode::Min: return "min";
    case ActingMode::Linear: return "linear";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0f && gamma <= 1.0f)) throw ConfigError("train.gamma must be in (0, 1]");
  if (!(alpha >= 0.0f && alpha <= 1.0f)) throw ConfigError("train.alpha must be in [0, 1]");
  if (!(lambda_q >= 0.0f && lambda_q <= 1.0f)) throw ConfigError("train.lambda_q must be in [0, 1]");
  if (!(gae_lambda >= 0.0f && gae_lambda <= 1.0f)) throw ConfigError("train.gae_lambda must be in [0, 1]");
  if (!(mask_keep_prob >= 0.0f && mask_keep_prob <= 1.0f)) {
    throw ConfigError("train.mask_keep_prob must be in [0, 1]");
  }
  if (!(eps_start >= 0.0f && eps_start <= 1.0f && eps_final >= 0.0f && eps_final <= 1.0f)) {
    throw ConfigError("train epsilon bounds must be in [0, 1]");
  }
  if (!(eps_decay_frac >= 0.0f && eps_decay_frac <= 1.0f)) {
    throw ConfigError("train.eps_decay_frac must be in [0, 1]");
  }
  if (!(beta1 >= 0.0f && beta1 < 1.0f && beta2 >= 0.0f && beta2 < 1.0f)) {
    throw ConfigError("train.betas must be in [0, 1)");
  }
  if (minibatch_size < 1 || num_epochs < 1 || num_steps < 1 || num_lanes < 1) {
    throw ConfigError("train loop sizes must be >= 1");
  }
  if (net_width < 1 || net_layers < 1) throw ConfigError("train net sizes must be >= 1");
}

}  // namespace agrl
