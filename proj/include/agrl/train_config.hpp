#pragma once

#include <cstdint>
#include <string>

namespace agrl {

enum class ActingMode { Max, Min, Linear };

ActingMode acting_mode_from_string(const std::string& s);
const char* acting_mode_to_string(ActingMode m);

// Every scalar the learning algorithms consume. Defaults are the tuned
// values where the source experiments report one, shrunk to desk scale for
// the loop sizes (segment length, lane count, net width).
struct TrainConfig {
  float gamma = 0.995f;
  float lambda_q = 0.65f;  // Q(lambda) mixing for the PQN-style targets

  float eps_start = 0.2f;
  float eps_final = 0.01f;
  float eps_decay_frac = 0.5f;

  float alpha = 0.3f;  // dual acting mix
  ActingMode acting_mode = ActingMode::Linear;

  float pc_coef = 0.1f;  // policy cloning
  float vc_coef = 0.0f;  // value cloning
  bool anneal_clone = true;

  float clip_eps = 0.2f;
  float gae_lambda = 0.95f;
  float ent_coef = 0.005f;
  float vf_coef = 0.5f;

  float mask_keep_prob = 1.0f;  // many-goals masking; 1.0 = all heads

  float lr = 2e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float adam_eps = 1e-8f;
  int minibatch_size = 256;
  int num_epochs = 1;

  // Loop and network sizing (desk scale).
  int num_steps = 16;  // rollout segment length
  int num_lanes = 64;
  int net_width = 256;
  int net_layers = 2;

  float dpg_noise = 0.2f;  // exploration sigma on the commanded action

  void validate() const;
};

}  // namespace agrl
