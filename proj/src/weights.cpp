#include "patchxfer/weights.hpp"

#include <fstream>
#include <sstream>

#include "patchxfer/error.hpp"
#include "patchxfer/tensor_io.hpp"

namespace patchxfer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

const ConvParams& WeightManifest::at(const std::string& layer) const {
  const auto it = layers_.find(layer);
  if (it == layers_.end()) throw FormatError("manifest: missing layer '" + layer + "'");
  return it->second;
}

void WeightManifest::set(const std::string& layer, ConvParams params) {
  params.validate();
  layers_[layer] = std::move(params);
}

void WeightManifest::validate(const std::vector<LayerSpec>& specs) const {
  for (const auto& spec : specs) {
    const ConvParams& p = at(spec.name);
    if (p.out_channels() != spec.out_channels || p.in_channels() != spec.in_channels)
      throw FormatError("manifest: layer '" + spec.name + "' has shape " +
                        shape_string(p.weight.shape()) + ", expected (" +
                        std::to_string(spec.out_channels) + ", " +
                        std::to_string(spec.in_channels) + ", 3, 3)");
  }
}

WeightManifest WeightManifest::random(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
  UniformSource rng(seed);
  WeightManifest m;
  for (const auto& spec : specs) {
    ConvParams p{Tensor(Shape{spec.out_channels, spec.in_channels, 3, 3}),
                 Tensor(Shape{spec.out_channels})};
    for (auto& v : p.weight.data()) v = rng.next(-0.1f, 0.1f);
    for (auto& v : p.bias.data()) v = rng.next(-0.1f, 0.1f);
    m.set(spec.name, std::move(p));
  }
  return m;
}

WeightManifest WeightManifest::load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("cannot open manifest " + manifest_path.string());
  const auto base = manifest_path.parent_path();

  std::map<std::string, Tensor> weights, biases;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = manifest_path.string() + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw FormatError(where + ": expected 'name = path'");
    const std::string name = trim(line.substr(0, eq));
    const std::string rel = trim(line.substr(eq + 1));
    if (name.empty() || rel.empty()) throw FormatError(where + ": empty name or path");
    if (ends_with(name, ".weight")) {
      weights[name.substr(0, name.size() - 7)] = load_tensor(base / rel);
    } else if (ends_with(name, ".bias")) {
      biases[name.substr(0, name.size() - 5)] = load_tensor(base / rel);
    } else {
      throw FormatError(where + ": tensor name '" + name + "' must end in .weight or .bias");
    }
  }

  WeightManifest m;
  for (auto& [layer, w] : weights) {
    auto b = biases.find(layer);
    if (b == biases.end()) throw FormatError("manifest: layer '" + layer + "' has no bias");
    try {
      m.set(layer, ConvParams{std::move(w), std::move(b->second)});
    } catch (const ShapeError& e) {
      throw FormatError("manifest: layer '" + layer + "': " + e.what());
    }
    biases.erase(b);
  }
  if (!biases.empty())
    throw FormatError("manifest: layer '" + biases.begin()->first + "' has no weight");
  return m;
}

void WeightManifest::save(const std::filesystem::path& manifest_path) const {
  const auto base = manifest_path.parent_path();
  std::ostringstream text;
  for (const auto& [layer, p] : layers_) {
    const std::string w = layer + ".weight.tnsr";
    const std::string b = layer + ".bias.tnsr";
    save_tensor(base / w, p.weight);
    save_tensor(base / b, p.bias);
    text << layer << ".weight = " << w << '\n' << layer << ".bias = " << b << '\n';
  }
  std::ofstream out(manifest_path);
  if (!out) throw Error("cannot write manifest " + manifest_path.string());
  out << text.str();
}

}  // namespace patchxfer
