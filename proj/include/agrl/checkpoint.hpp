#pragma once

#include <string>

#include "agrl/net.hpp"

namespace agrl {

// Checkpoint = <prefix>.json manifest + <prefix>.bin blob.
// Manifest: format version "AGRL1", head shape, per-layer name/shape/
// layer-norm flag, and the 64-bit byte length of the blob. The blob is every
// layer's weight then bias, little-endian float32, in manifest order.
void save_checkpoint(const std::string& prefix, const NetParams& params);

NetParams load_checkpoint(const std::string& prefix);

}  // namespace agrl
