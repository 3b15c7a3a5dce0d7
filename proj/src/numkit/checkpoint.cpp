#include "agrl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "agrl/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian; big-endian hosts need a swap path");

namespace agrl {

using nlohmann::json;

void save_checkpoint(const std::string& prefix, const NetParams& params) {
  params.validate();
  json manifest;
  manifest["format"] = "AGRL1";
  manifest["head_shape"] = {params.head.num_goals, params.head.num_actions};
  manifest["blob_bytes"] = static_cast<uint64_t>(params.param_count()) * sizeof(float);
  json layers = json::array();
  for (size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    layers.push_back({{"name", "dense" + std::to_string(i)},
                      {"in", l.in()},
                      {"out", l.out()},
                      {"layer_norm", l.layer_norm}});
  }
  manifest["layers"] = std::move(layers);

  std::ofstream mf(prefix + ".json");
  if (!mf) throw IoError("cannot write manifest " + prefix + ".json");
  mf << manifest.dump(2) << "\n";
  mf.close();
  if (!mf) throw IoError("failed writing manifest " + prefix + ".json");

  std::ofstream bf(prefix + ".bin", std::ios::binary);
  if (!bf) throw IoError("cannot write blob " + prefix + ".bin");
  for (const auto& l : params.layers) {
    bf.write(reinterpret_cast<const char*>(l.weight.data.data()),
             static_cast<std::streamsize>(l.weight.data.size() * sizeof(float)));
    bf.write(reinterpret_cast<const char*>(l.bias.data.data()),
             static_cast<std::streamsize>(l.bias.data.size() * sizeof(float)));
  }
  bf.close();
  if (!bf) throw IoError("failed writing blob " + prefix + ".bin");
}

NetParams load_checkpoint(const std::string& prefix) {
  std::ifstream mf(prefix + ".json");
  if (!mf) throw IoError("cannot open manifest " + prefix + ".json");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + prefix + ".json: " + e.what());
  }
  if (manifest.value("format", "") != std::string("AGRL1")) {
    throw IoError("manifest " + prefix + ".json: unsupported format version");
  }

  NetParams params;
  params.head.num_goals = manifest.at("head_shape").at(0).get<int>();
  params.head.num_actions = manifest.at("head_shape").at(1).get<int>();
  for (const auto& jl : manifest.at("layers")) {
    LayerParams l;
    const int in = jl.at("in").get<int>();
    const int out = jl.at("out").get<int>();
    l.weight = Tensor::zeros({in, out});
    l.bias = Tensor::zeros({out});
    l.layer_norm = jl.at("layer_norm").get<bool>();
    params.layers.push_back(std::move(l));
  }

  const uint64_t expect_bytes = manifest.at("blob_bytes").get<uint64_t>();
  if (expect_bytes != static_cast<uint64_t>(params.param_count()) * sizeof(float)) {
    throw IoError("manifest " + prefix + ".json: blob_bytes inconsistent with layer shapes");
  }

  std::ifstream bf(prefix + ".bin", std::ios::binary);
  if (!bf) throw IoError("cannot open blob " + prefix + ".bin");
  for (auto& l : params.layers) {
    bf.read(reinterpret_cast<char*>(l.weight.data.data()),
            static_cast<std::streamsize>(l.weight.data.size() * sizeof(float)));
    bf.read(reinterpret_cast<char*>(l.bias.data.data()),
            static_cast<std::streamsize>(l.bias.data.size() * sizeof(float)));
  }
  if (!bf) throw IoError("blob " + prefix + ".bin shorter than manifest promises");
  char extra;
  if (bf.read(&extra, 1)) throw IoError("blob " + prefix + ".bin longer than manifest promises");

  params.validate();
  return params;
}

}  // namespace agrl
