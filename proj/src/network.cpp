// Copyright 2026 The bsplan Authors
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

#include "bsplan/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace bsplan
{

namespace
{

constexpr char kMagic[8] = {'B', 'S', 'P', 'L', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

double unit_uniform(std::mt19937_64 & rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void NetworkShape::validate() const
{
  const bool ok = grid_width > 0 && grid_height > 0 && pool > 0 && conv1_channels > 0 && conv2_channels > 0 &&
                  hidden > 0 && depth >= 1 && depth <= 8 && grid_width % pool == 0 && grid_height % pool == 0 &&
                  pooled_width() % 4 == 0 && pooled_height() % 4 == 0;
  if (!ok) {
    throw ContractError("invalid network shape: grid/pool must give pooled sides divisible by 4");
  }
}

NetworkModel::NetworkModel(const NetworkShape & shape, const VehicleParams & vehicle) : shape_(shape), vehicle_(vehicle)
{
  shape_.validate();
  vehicle_.validate();
  const auto c1 = static_cast<std::size_t>(shape_.conv1_channels);
  const auto c2 = static_cast<std::size_t>(shape_.conv2_channels);
  const auto h = static_cast<std::size_t>(shape_.hidden);
  const auto in = static_cast<std::size_t>(shape_.map_features() + kConfigFeatures);
  const auto p = static_cast<std::size_t>(shape_.outputs());
  std::size_t offset = 0;
  auto add = [&](const char * name, std::size_t size) {
    blocks_.push_back({name, offset, size});
    offset += size;
  };
  add("conv1.w", c1 * 9);
  add("conv1.b", c1);
  add("conv2.w", c2 * c1 * 9);
  add("conv2.b", c2);
  add("fc1.w", h * in);
  add("fc1.b", h);
  add("fc2.w", p * h);
  add("fc2.b", p);
  params_.assign(offset, 0.0);
}

NetworkModel NetworkModel::random(
  const NetworkShape & shape, const VehicleParams & vehicle, std::uint64_t seed, double head_scale)
{
  NetworkModel model(shape, vehicle);
  std::mt19937_64 rng(seed);
  auto fill = [&](const char * name, double fan_in, double scale) {
    const double limit = scale * std::sqrt(6.0 / fan_in);
    for (double & w : model.block(name)) {
      w = (2.0 * unit_uniform(rng) - 1.0) * limit;
    }
  };
  fill("conv1.w", 9.0, 1.0);
  fill("conv2.w", 9.0 * shape.conv1_channels, 1.0);
  fill("fc1.w", static_cast<double>(shape.map_features() + kConfigFeatures), 1.0);
  fill("fc2.w", static_cast<double>(shape.hidden), head_scale);
  return model;
}

std::span<double> NetworkModel::block(const std::string & name)
{
  for (const auto & b : blocks_) {
    if (b.name == name) {
      return std::span<double>(params_).subspan(b.offset, b.size);
    }
  }
  throw ContractError("no parameter block '" + name + "'");
}

std::span<const double> NetworkModel::block(const std::string & name) const
{
  return const_cast<NetworkModel *>(this)->block(name);
}

bool operator==(const NetworkModel & a, const NetworkModel & b)
{
  if (!(a.shape_ == b.shape_ && a.vehicle_ == b.vehicle_ && a.params_.size() == b.params_.size())) {
    return false;
  }
  return std::memcmp(a.params_.data(), b.params_.data(), a.params_.size() * sizeof(double)) == 0;
}

std::vector<double> config_features(
  const Configuration & q0, const Configuration & qd, const OccupancyGrid & grid, double kappa_max)
{
  const double wm = grid.width_m();
  const double hm = grid.height_m();
  const Vec2 delta = qd.position() - q0.position();
  const double c = std::cos(q0.theta);
  const double s = std::sin(q0.theta);
  const double scale = std::max(wm, hm);
  const double dtheta = qd.theta - q0.theta;
  return {q0.x / wm,
          q0.y / hm,
          std::cos(q0.theta),
          std::sin(q0.theta),
          q0.kappa / kappa_max,
          qd.x / wm,
          qd.y / hm,
          std::cos(qd.theta),
          std::sin(qd.theta),
          (c * delta.x + s * delta.y) / scale,
          (-s * delta.x + c * delta.y) / scale,
          std::cos(dtheta),
          std::sin(dtheta)};
}

namespace
{

// 3x3 convolution, stride 2, zero padding 1, followed by ReLU.
void conv_forward(
  std::span<const double> in, int in_c, int in_w, int in_h, std::span<const double> w, std::span<const double> b,
  int out_c, std::vector<double> & out)
{
  const int ow = in_w / 2;
  const int oh = in_h / 2;
  out.assign(static_cast<std::size_t>(out_c) * ow * oh, 0.0);
  for (int o = 0; o < out_c; ++o) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double acc = b[static_cast<std::size_t>(o)];
        for (int i = 0; i < in_c; ++i) {
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = 2 * y + ky - 1;
            if (iy < 0 || iy >= in_h) {
              continue;
            }
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = 2 * x + kx - 1;
              if (ix < 0 || ix >= in_w) {
                continue;
              }
              acc += w[static_cast<std::size_t>(((o * in_c + i) * 3 + ky) * 3 + kx)] *
                     in[static_cast<std::size_t>((i * in_h + iy) * in_w + ix)];
            }
          }
        }
        out[static_cast<std::size_t>((o * oh + y) * ow + x)] = std::max(acc, 0.0);
      }
    }
  }
}

// Backward of conv_forward given dL/d(post-ReLU output). Accumulates weight
// and bias gradients; writes dL/d(input) when `grad_in` is non-null.
void conv_backward(
  std::span<const double> in, int in_c, int in_w, int in_h, std::span<const double> w, std::span<const double> out,
  std::span<const double> grad_out, int out_c, std::span<double> grad_w, std::span<double> grad_b,
  std::vector<double> * grad_in)
{
  const int ow = in_w / 2;
  const int oh = in_h / 2;
  if (grad_in != nullptr) {
    grad_in->assign(static_cast<std::size_t>(in_c) * in_w * in_h, 0.0);
  }
  for (int o = 0; o < out_c; ++o) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const auto oi = static_cast<std::size_t>((o * oh + y) * ow + x);
        if (out[oi] <= 0.0) {
          continue;
        }
        const double g = grad_out[oi];
        if (g == 0.0) {
          continue;
        }
        grad_b[static_cast<std::size_t>(o)] += g;
        for (int i = 0; i < in_c; ++i) {
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = 2 * y + ky - 1;
            if (iy < 0 || iy >= in_h) {
              continue;
            }
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = 2 * x + kx - 1;
              if (ix < 0 || ix >= in_w) {
                continue;
              }
              const auto wi = static_cast<std::size_t>(((o * in_c + i) * 3 + ky) * 3 + kx);
              const auto ii = static_cast<std::size_t>((i * in_h + iy) * in_w + ix);
              grad_w[wi] += g * in[ii];
              if (grad_in != nullptr) {
                (*grad_in)[ii] += g * w[wi];
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

LatentParams network_forward(const NetworkModel & model, const Scenario & scenario, ForwardCache * cache)
{
  const NetworkShape & sh = model.shape();
  const OccupancyGrid & grid = *scenario.grid;
  if (grid.width() != sh.grid_width || grid.height() != sh.grid_height) {
    throw ContractError(
      "grid is " + std::to_string(grid.width()) + "x" + std::to_string(grid.height()) + ", model expects " +
      std::to_string(sh.grid_width) + "x" + std::to_string(sh.grid_height));
  }
  ForwardCache local;
  ForwardCache & c = cache != nullptr ? *cache : local;

  const int pw = sh.pooled_width();
  const int ph = sh.pooled_height();
  const double inv_area = 1.0 / (sh.pool * sh.pool);
  c.pooled.assign(static_cast<std::size_t>(pw) * ph, 0.0);
  for (int cy = 0; cy < grid.height(); ++cy) {
    for (int cx = 0; cx < grid.width(); ++cx) {
      if (grid.occupied(cx, cy)) {
        c.pooled[static_cast<std::size_t>((cy / sh.pool) * pw + cx / sh.pool)] += inv_area;
      }
    }
  }

  conv_forward(c.pooled, 1, pw, ph, model.block("conv1.w"), model.block("conv1.b"), sh.conv1_channels, c.conv1);
  conv_forward(
    c.conv1, sh.conv1_channels, sh.conv1_width(), sh.conv1_height(), model.block("conv2.w"), model.block("conv2.b"),
    sh.conv2_channels, c.conv2);

  c.features = c.conv2;
  const auto cfg = config_features(scenario.q0, scenario.qd, grid, model.vehicle().kappa_max);
  c.features.insert(c.features.end(), cfg.begin(), cfg.end());

  const auto in = c.features.size();
  const auto h = static_cast<std::size_t>(sh.hidden);
  const auto w1 = model.block("fc1.w");
  const auto b1 = model.block("fc1.b");
  c.hidden.assign(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    double acc = b1[r];
    for (std::size_t k = 0; k < in; ++k) {
      acc += w1[r * in + k] * c.features[k];
    }
    c.hidden[r] = std::max(acc, 0.0);
  }

  const auto p = static_cast<std::size_t>(sh.outputs());
  const auto w2 = model.block("fc2.w");
  const auto b2 = model.block("fc2.b");
  c.output.assign(p, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    double acc = b2[r];
    for (std::size_t k = 0; k < h; ++k) {
      acc += w2[r * h + k] * c.hidden[k];
    }
    c.output[r] = std::tanh(acc);
  }
  return LatentParams{sh.depth, c.output};
}

std::vector<double> network_backward(
  const NetworkModel & model, const ForwardCache & cache, std::span<const double> grad_phi)
{
  const NetworkShape & sh = model.shape();
  const auto p = static_cast<std::size_t>(sh.outputs());
  if (grad_phi.size() != p || cache.output.size() != p) {
    throw ContractError("network_backward: gradient does not match the model output");
  }
  std::vector<double> grad(model.params().size(), 0.0);
  auto gblock = [&](const char * name) {
    for (const auto & b : model.blocks()) {
      if (b.name == name) {
        return std::span<double>(grad).subspan(b.offset, b.size);
      }
    }
    throw ContractError("missing block");
  };

  const auto h = static_cast<std::size_t>(sh.hidden);
  const auto in = cache.features.size();
  const auto w2 = model.block("fc2.w");
  auto gw2 = gblock("fc2.w");
  auto gb2 = gblock("fc2.b");
  std::vector<double> g_hidden(h, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    const double y = cache.output[r];
    const double gz = grad_phi[r] * (1.0 - y * y);
    gb2[r] += gz;
    for (std::size_t k = 0; k < h; ++k) {
      gw2[r * h + k] += gz * cache.hidden[k];
      g_hidden[k] += gz * w2[r * h + k];
    }
  }

  const auto w1 = model.block("fc1.w");
  auto gw1 = gblock("fc1.w");
  auto gb1 = gblock("fc1.b");
  std::vector<double> g_features(in, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    if (cache.hidden[r] <= 0.0) {
      continue;
    }
    const double gz = g_hidden[r];
    gb1[r] += gz;
    for (std::size_t k = 0; k < in; ++k) {
      gw1[r * in + k] += gz * cache.features[k];
      g_features[k] += gz * w1[r * in + k];
    }
  }

  const std::span<const double> g_conv2(g_features.data(), static_cast<std::size_t>(sh.map_features()));
  std::vector<double> g_conv1;
  conv_backward(
    cache.conv1, sh.conv1_channels, sh.conv1_width(), sh.conv1_height(), model.block("conv2.w"), cache.conv2, g_conv2,
    sh.conv2_channels, gblock("conv2.w"), gblock("conv2.b"), &g_conv1);
  conv_backward(
    cache.pooled, 1, sh.pooled_width(), sh.pooled_height(), model.block("conv1.w"), cache.conv1, g_conv1,
    sh.conv1_channels, gblock("conv1.w"), gblock("conv1.b"), nullptr);
  return grad;
}

namespace
{

void put_u32(std::ostream & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_u64(std::ostream & out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_f64(std::ostream & out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream & in, int n)
{
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw ParseError("model checkpoint truncated");
    }
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::uint32_t get_u32(std::istream & in) { return static_cast<std::uint32_t>(get_bytes(in, 4)); }
std::int32_t get_i32(std::istream & in) { return static_cast<std::int32_t>(get_u32(in)); }
double get_f64(std::istream & in) { return std::bit_cast<double>(get_bytes(in, 8)); }

}  // namespace

void save_model(std::ostream & out, const NetworkModel & model)
{
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  const auto & s = model.shape();
  for (int v : {s.grid_width, s.grid_height, s.pool, s.conv1_channels, s.conv2_channels, s.hidden, s.depth}) {
    put_u32(out, static_cast<std::uint32_t>(v));
  }
  const auto & veh = model.vehicle();
  for (double v : {veh.length, veh.width, veh.rear_axle_offset, veh.kappa_max}) {
    put_f64(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(model.blocks().size()));
  for (const auto & b : model.blocks()) {
    put_u32(out, static_cast<std::uint32_t>(b.name.size()));
    out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    put_u64(out, b.size);
    for (double v : model.params().subspan(b.offset, b.size)) {
      put_f64(out, v);
    }
  }
}

NetworkModel load_model(std::istream & in)
{
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ParseError("not a bsplan model checkpoint");
  }
  if (get_u32(in) != kVersion) {
    throw ParseError("unsupported model checkpoint version");
  }
  NetworkShape s;
  s.grid_width = get_i32(in);
  s.grid_height = get_i32(in);
  s.pool = get_i32(in);
  s.conv1_channels = get_i32(in);
  s.conv2_channels = get_i32(in);
  s.hidden = get_i32(in);
  s.depth = get_i32(in);
  VehicleParams veh;
  veh.length = get_f64(in);
  veh.width = get_f64(in);
  veh.rear_axle_offset = get_f64(in);
  veh.kappa_max = get_f64(in);
  NetworkModel model = [&] {
    try {
      return NetworkModel(s, veh);
    } catch (const ContractError & e) {
      throw ParseError(std::string("model checkpoint: ") + e.what());
    }
  }();
  const std::uint32_t nblocks = get_u32(in);
  if (nblocks != model.blocks().size()) {
    throw ParseError("model checkpoint: block count mismatch");
  }
  for (const auto & b : model.blocks()) {
    const std::uint32_t len = get_u32(in);
    std::string name(len, '\0');
    if (len > 64 || !in.read(name.data(), len) || name != b.name) {
      throw ParseError("model checkpoint: unexpected block name");
    }
    if (get_bytes(in, 8) != b.size) {
      throw ParseError("model checkpoint: block '" + b.name + "' has the wrong size");
    }
    for (double & v : model.params().subspan(b.offset, b.size)) {
      v = get_f64(in);
    }
  }
  return model;
}

void save_model(const std::filesystem::path & path, const NetworkModel & model)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  save_model(out, model);
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

NetworkModel load_model(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return load_model(in);
}

}  // namespace bsplan
