#include "eegrid/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "eegrid/binio.hpp"
#include "eegrid/util.hpp"

namespace eegrid {

LayerSpec LayerSpec::conv2d(int filters, int kh, int kw) {
  LayerSpec s;
  s.kind = LayerKind::Conv2d;
  s.out_filters = filters;
  s.kernel_h = kh;
  s.kernel_w = kw;
  return s;
}
LayerSpec LayerSpec::max_pool(int size) {
  LayerSpec s;
  s.kind = LayerKind::MaxPool;
  s.pool_size = size;
  return s;
}
LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = LayerKind::Relu;
  return s;
}
LayerSpec LayerSpec::batch_norm() {
  LayerSpec s;
  s.kind = LayerKind::BatchNorm;
  return s;
}
LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.rate = rate;
  return s;
}
LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  return s;
}
LayerSpec LayerSpec::dense(int out_dim) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.out_dim = out_dim;
  return s;
}
LayerSpec LayerSpec::softmax() {
  LayerSpec s;
  s.kind = LayerKind::Softmax;
  return s;
}

std::vector<LayerSpec> preset_layers(Preset p) {
  using L = LayerSpec;
  if (p == Preset::SadNet) {
    return {L::batch_norm(), L::conv2d(64, 3, 3), L::relu(),    L::conv2d(64, 3, 3),
            L::relu(),       L::max_pool(2),      L::dropout(0.25), L::flatten(),
            L::dense(128),   L::relu(),           L::dropout(0.2),  L::dense(2),
            L::softmax()};
  }
  return {L::batch_norm(), L::conv2d(32, 3, 3), L::relu(),        L::max_pool(2),
          L::conv2d(64, 3, 3), L::relu(),       L::max_pool(2),   L::dropout(0.45),
          L::flatten(),    L::dense(64),        L::relu(),        L::dropout(0.25),
          L::dense(2),     L::softmax()};
}

NetworkSpec build_preset(Preset p) {
  return build_preset(p, p == Preset::SadNet ? Shape3{15, 15, 10} : Shape3{15, 15, 8});
}

NetworkSpec build_preset(Preset p, Shape3 input) {
  return {input, preset_layers(p)};
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::runtime_error("train config: batch_size must be positive");
  if (learning_rate <= 0.0) throw std::runtime_error("train config: learning rate must be positive");
  if (max_epochs < 1) throw std::runtime_error("train config: max_epochs must be positive");
  if (patience < 1) throw std::runtime_error("train config: patience must be positive");
  if (patience >= max_epochs)
    throw std::runtime_error("train config: patience must be smaller than max_epochs");
}

// ---------------------------------------------------------------------------
// Layers

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Shape3 infer(Shape3 in) = 0;  // called once at build time
  virtual void init(Rng&) {}
  virtual Tensor4 forward(const Tensor4& in, bool train, Rng& rng, bool update_running) = 0;
  virtual Tensor4 backward(const Tensor4& grad_out) = 0;
  virtual std::vector<ParamRef> params() { return {}; }
  virtual std::vector<ParamRef> extra_state() { return {}; }
};

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.9;

class Conv2dLayer final : public Layer {
 public:
  explicit Conv2dLayer(const LayerSpec& s) : spec_(s) {}

  Shape3 infer(Shape3 in) override {
    in_shape_ = in;
    const int oh = in.h - spec_.kernel_h + 1;
    const int ow = in.w - spec_.kernel_w + 1;
    if (spec_.kernel_h < 1 || spec_.kernel_w < 1 || spec_.out_filters < 1)
      throw std::runtime_error("conv2d: kernel and filter counts must be >= 1");
    if (oh < 1 || ow < 1)
      throw std::runtime_error("conv2d: kernel does not fit input (valid convolution)");
    out_shape_ = {oh, ow, spec_.out_filters};
    weights_.assign(static_cast<std::size_t>(spec_.out_filters) * spec_.kernel_h *
                        spec_.kernel_w * in.c,
                    0.0);
    bias_.assign(static_cast<std::size_t>(spec_.out_filters), 0.0);
    wgrad_.assign(weights_.size(), 0.0);
    bgrad_.assign(bias_.size(), 0.0);
    return out_shape_;
  }

  void init(Rng& rng) override {
    const double scale =
        std::sqrt(2.0 / (static_cast<double>(spec_.kernel_h) * spec_.kernel_w * in_shape_.c));
    for (auto& w : weights_) w = scale * rng.normal();
    std::fill(bias_.begin(), bias_.end(), 0.0);
  }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    cached_in_ = in;
    Tensor4 out(in.n, out_shape_);
    const int kh = spec_.kernel_h;
    const int kw = spec_.kernel_w;
    const int ic = in_shape_.c;
    for (int n = 0; n < in.n; ++n) {
      for (int oy = 0; oy < out_shape_.h; ++oy) {
        for (int ox = 0; ox < out_shape_.w; ++ox) {
          for (int f = 0; f < spec_.out_filters; ++f) {
            double acc = bias_[static_cast<std::size_t>(f)];
            const double* wf = weights_.data() +
                               static_cast<std::size_t>(f) * kh * kw * ic;
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const double* src = in.ptr(n, oy + ky, ox + kx);
                const double* wrow = wf + (static_cast<std::size_t>(ky) * kw + kx) * ic;
                for (int c = 0; c < ic; ++c) acc += wrow[c] * src[c];
              }
            }
            out.at(n, oy, ox, f) = acc;
          }
        }
      }
    }
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    const Tensor4& in = cached_in_;
    Tensor4 grad_in(in.n, in_shape_);
    std::fill(wgrad_.begin(), wgrad_.end(), 0.0);
    std::fill(bgrad_.begin(), bgrad_.end(), 0.0);
    const int kh = spec_.kernel_h;
    const int kw = spec_.kernel_w;
    const int ic = in_shape_.c;
    for (int n = 0; n < in.n; ++n) {
      for (int oy = 0; oy < out_shape_.h; ++oy) {
        for (int ox = 0; ox < out_shape_.w; ++ox) {
          for (int f = 0; f < spec_.out_filters; ++f) {
            const double g = grad_out.at(n, oy, ox, f);
            if (g == 0.0) continue;
            bgrad_[static_cast<std::size_t>(f)] += g;
            double* wgf = wgrad_.data() + static_cast<std::size_t>(f) * kh * kw * ic;
            const double* wf = weights_.data() + static_cast<std::size_t>(f) * kh * kw * ic;
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const double* src = in.ptr(n, oy + ky, ox + kx);
                double* gin = grad_in.ptr(n, oy + ky, ox + kx);
                double* wgrow = wgf + (static_cast<std::size_t>(ky) * kw + kx) * ic;
                const double* wrow = wf + (static_cast<std::size_t>(ky) * kw + kx) * ic;
                for (int c = 0; c < ic; ++c) {
                  wgrow[c] += g * src[c];
                  gin[c] += g * wrow[c];
                }
              }
            }
          }
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> params() override {
    return {{"conv.weight", &weights_, &wgrad_}, {"conv.bias", &bias_, &bgrad_}};
  }

 private:
  LayerSpec spec_;
  Shape3 in_shape_{};
  Shape3 out_shape_{};
  std::vector<double> weights_, bias_, wgrad_, bgrad_;
  Tensor4 cached_in_;
};

class MaxPoolLayer final : public Layer {
 public:
  explicit MaxPoolLayer(const LayerSpec& s) : size_(s.pool_size) {}

  Shape3 infer(Shape3 in) override {
    if (size_ < 1) throw std::runtime_error("max_pool: size must be >= 1");
    in_shape_ = in;
    out_shape_ = {in.h / size_, in.w / size_, in.c};  // floor, trailing rows dropped
    if (out_shape_.h < 1 || out_shape_.w < 1)
      throw std::runtime_error("max_pool: input smaller than pool window");
    return out_shape_;
  }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    Tensor4 out(in.n, out_shape_);
    argmax_.assign(out.v.size(), 0);
    std::size_t oi = 0;
    for (int n = 0; n < in.n; ++n) {
      for (int oy = 0; oy < out_shape_.h; ++oy) {
        for (int ox = 0; ox < out_shape_.w; ++ox) {
          for (int c = 0; c < out_shape_.c; ++c, ++oi) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t best_idx = 0;
            for (int py = 0; py < size_; ++py) {
              for (int px = 0; px < size_; ++px) {
                const int iy = oy * size_ + py;
                const int ix = ox * size_ + px;
                const double v = in.at(n, iy, ix, c);
                if (v > best) {
                  best = v;
                  best_idx =
                      ((static_cast<std::size_t>(n) * in_shape_.h + iy) * in_shape_.w + ix) *
                          in_shape_.c +
                      c;
                }
              }
            }
            out.v[oi] = best;
            argmax_[oi] = best_idx;
          }
        }
      }
    }
    batch_n_ = in.n;
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    Tensor4 grad_in(batch_n_, in_shape_);
    for (std::size_t i = 0; i < grad_out.v.size(); ++i) grad_in.v[argmax_[i]] += grad_out.v[i];
    return grad_in;
  }

 private:
  int size_;
  Shape3 in_shape_{}, out_shape_{};
  std::vector<std::size_t> argmax_;
  int batch_n_{0};
};

class ReluLayer final : public Layer {
 public:
  Shape3 infer(Shape3 in) override { return in; }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    Tensor4 out = in;
    mask_.assign(in.v.size(), false);
    for (std::size_t i = 0; i < in.v.size(); ++i) {
      if (in.v[i] > 0.0)
        mask_[i] = true;
      else
        out.v[i] = 0.0;
    }
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    Tensor4 grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.v.size(); ++i) {
      if (!mask_[i]) grad_in.v[i] = 0.0;
    }
    return grad_in;
  }

 private:
  std::vector<bool> mask_;
};

class BatchNormLayer final : public Layer {
 public:
  Shape3 infer(Shape3 in) override {
    shape_ = in;
    const auto c = static_cast<std::size_t>(in.c);
    gamma_.assign(c, 1.0);
    beta_.assign(c, 0.0);
    ggrad_.assign(c, 0.0);
    bgrad_.assign(c, 0.0);
    running_mean_.assign(c, 0.0);
    running_var_.assign(c, 1.0);
    return in;
  }

  Tensor4 forward(const Tensor4& in, bool train, Rng&, bool update_running) override {
    const int c = shape_.c;
    const std::size_t per_channel = in.v.size() / static_cast<std::size_t>(c);
    Tensor4 out = in;
    if (train) {
      if (in.n < 2) throw std::runtime_error("batch norm: train mode needs batch size >= 2");
      cached_in_ = in;
      mean_.assign(static_cast<std::size_t>(c), 0.0);
      var_.assign(static_cast<std::size_t>(c), 0.0);
      for (std::size_t i = 0; i < in.v.size(); ++i) mean_[i % c] += in.v[i];
      for (auto& m : mean_) m /= static_cast<double>(per_channel);
      for (std::size_t i = 0; i < in.v.size(); ++i) {
        const double d = in.v[i] - mean_[i % c];
        var_[i % c] += d * d;
      }
      for (auto& v : var_) v /= static_cast<double>(per_channel);
      inv_sd_.resize(static_cast<std::size_t>(c));
      for (int j = 0; j < c; ++j)
        inv_sd_[static_cast<std::size_t>(j)] =
            1.0 / std::sqrt(var_[static_cast<std::size_t>(j)] + kBnEps);
      xhat_.resize(in.v.size());
      for (std::size_t i = 0; i < in.v.size(); ++i) {
        const std::size_t j = i % c;
        xhat_[i] = (in.v[i] - mean_[j]) * inv_sd_[j];
        out.v[i] = gamma_[j] * xhat_[i] + beta_[j];
      }
      if (update_running) {
        for (int j = 0; j < c; ++j) {
          const auto js = static_cast<std::size_t>(j);
          running_mean_[js] = kBnMomentum * running_mean_[js] + (1.0 - kBnMomentum) * mean_[js];
          running_var_[js] = kBnMomentum * running_var_[js] + (1.0 - kBnMomentum) * var_[js];
        }
      }
      train_cached_ = true;
    } else {
      for (std::size_t i = 0; i < in.v.size(); ++i) {
        const std::size_t j = i % c;
        const double xhat = (in.v[i] - running_mean_[j]) / std::sqrt(running_var_[j] + kBnEps);
        out.v[i] = gamma_[j] * xhat + beta_[j];
      }
      train_cached_ = false;
    }
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    if (!train_cached_) throw std::runtime_error("batch norm: backward without train forward");
    const int c = shape_.c;
    const std::size_t per_channel = grad_out.v.size() / static_cast<std::size_t>(c);
    const double m = static_cast<double>(per_channel);

    std::fill(ggrad_.begin(), ggrad_.end(), 0.0);
    std::fill(bgrad_.begin(), bgrad_.end(), 0.0);
    std::vector<double> sum_dxhat(static_cast<std::size_t>(c), 0.0);
    std::vector<double> sum_dxhat_xhat(static_cast<std::size_t>(c), 0.0);
    for (std::size_t i = 0; i < grad_out.v.size(); ++i) {
      const std::size_t j = i % c;
      const double dy = grad_out.v[i];
      ggrad_[j] += dy * xhat_[i];
      bgrad_[j] += dy;
      const double dxhat = dy * gamma_[j];
      sum_dxhat[j] += dxhat;
      sum_dxhat_xhat[j] += dxhat * xhat_[i];
    }

    Tensor4 grad_in = grad_out;
    for (std::size_t i = 0; i < grad_out.v.size(); ++i) {
      const std::size_t j = i % c;
      const double dxhat = grad_out.v[i] * gamma_[j];
      grad_in.v[i] =
          inv_sd_[j] * (dxhat - sum_dxhat[j] / m - xhat_[i] * sum_dxhat_xhat[j] / m);
    }
    return grad_in;
  }

  std::vector<ParamRef> params() override {
    return {{"bn.gamma", &gamma_, &ggrad_}, {"bn.beta", &beta_, &bgrad_}};
  }

  std::vector<ParamRef> extra_state() override {
    return {{"bn.running_mean", &running_mean_, nullptr},
            {"bn.running_var", &running_var_, nullptr}};
  }

 private:
  Shape3 shape_{};
  std::vector<double> gamma_, beta_, ggrad_, bgrad_;
  std::vector<double> running_mean_, running_var_;
  std::vector<double> mean_, var_, inv_sd_, xhat_;
  Tensor4 cached_in_;
  bool train_cached_{false};
};

class DropoutLayer final : public Layer {
 public:
  explicit DropoutLayer(const LayerSpec& s) : rate_(s.rate) {}

  Shape3 infer(Shape3 in) override {
    if (rate_ < 0.0 || rate_ >= 1.0) throw std::runtime_error("dropout: rate must be in [0,1)");
    return in;
  }

  Tensor4 forward(const Tensor4& in, bool train, Rng& rng, bool) override {
    if (!train || rate_ == 0.0) {
      active_ = false;
      return in;
    }
    active_ = true;
    const double keep = 1.0 - rate_;
    const double scale = 1.0 / keep;
    mask_.assign(in.v.size(), 0.0);
    Tensor4 out = in;
    for (std::size_t i = 0; i < in.v.size(); ++i) {
      // Inverted dropout: survivors are scaled so eval is a no-op.
      mask_[i] = rng.uniform01() < keep ? scale : 0.0;
      out.v[i] *= mask_[i];
    }
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    if (!active_) return grad_out;
    Tensor4 grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.v.size(); ++i) grad_in.v[i] *= mask_[i];
    return grad_in;
  }

 private:
  double rate_;
  bool active_{false};
  std::vector<double> mask_;
};

class FlattenLayer final : public Layer {
 public:
  Shape3 infer(Shape3 in) override {
    in_shape_ = in;
    return {1, 1, in.count()};
  }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    Tensor4 out(in.n, {1, 1, in_shape_.count()});
    out.v = in.v;  // NHWC is already contiguous per sample
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    Tensor4 grad_in(grad_out.n, in_shape_);
    grad_in.v = grad_out.v;
    return grad_in;
  }

 private:
  Shape3 in_shape_{};
};

class DenseLayer final : public Layer {
 public:
  explicit DenseLayer(const LayerSpec& s) : out_dim_(s.out_dim) {}

  Shape3 infer(Shape3 in) override {
    if (in.h != 1 || in.w != 1)
      throw std::runtime_error("dense: input must be flattened first");
    if (out_dim_ < 1) throw std::runtime_error("dense: output dimension must be >= 1");
    in_dim_ = in.c;
    weights_.assign(static_cast<std::size_t>(out_dim_) * in_dim_, 0.0);
    bias_.assign(static_cast<std::size_t>(out_dim_), 0.0);
    wgrad_.assign(weights_.size(), 0.0);
    bgrad_.assign(bias_.size(), 0.0);
    return {1, 1, out_dim_};
  }

  void init(Rng& rng) override {
    const double scale = std::sqrt(2.0 / static_cast<double>(in_dim_));
    for (auto& w : weights_) w = scale * rng.normal();
    std::fill(bias_.begin(), bias_.end(), 0.0);
  }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    cached_in_ = in;
    Tensor4 out(in.n, {1, 1, out_dim_});
    for (int n = 0; n < in.n; ++n) {
      const double* x = in.v.data() + static_cast<std::size_t>(n) * in_dim_;
      double* y = out.v.data() + static_cast<std::size_t>(n) * out_dim_;
      for (int j = 0; j < out_dim_; ++j) {
        const double* wrow = weights_.data() + static_cast<std::size_t>(j) * in_dim_;
        double acc = bias_[static_cast<std::size_t>(j)];
        for (int i = 0; i < in_dim_; ++i) acc += wrow[i] * x[i];
        y[j] = acc;
      }
    }
    return out;
  }

  Tensor4 backward(const Tensor4& grad_out) override {
    const Tensor4& in = cached_in_;
    Tensor4 grad_in(in.n, {1, 1, in_dim_});
    std::fill(wgrad_.begin(), wgrad_.end(), 0.0);
    std::fill(bgrad_.begin(), bgrad_.end(), 0.0);
    for (int n = 0; n < in.n; ++n) {
      const double* x = in.v.data() + static_cast<std::size_t>(n) * in_dim_;
      const double* g = grad_out.v.data() + static_cast<std::size_t>(n) * out_dim_;
      double* gx = grad_in.v.data() + static_cast<std::size_t>(n) * in_dim_;
      for (int j = 0; j < out_dim_; ++j) {
        const double gj = g[j];
        bgrad_[static_cast<std::size_t>(j)] += gj;
        double* wgrow = wgrad_.data() + static_cast<std::size_t>(j) * in_dim_;
        const double* wrow = weights_.data() + static_cast<std::size_t>(j) * in_dim_;
        for (int i = 0; i < in_dim_; ++i) {
          wgrow[i] += gj * x[i];
          gx[i] += gj * wrow[i];
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> params() override {
    return {{"dense.weight", &weights_, &wgrad_}, {"dense.bias", &bias_, &bgrad_}};
  }

 private:
  int out_dim_;
  int in_dim_{0};
  std::vector<double> weights_, bias_, wgrad_, bgrad_;
  Tensor4 cached_in_;
};

// Softmax is the terminal layer; its gradient is fused with the
// cross-entropy loss in Network::loss_and_backward.
class SoftmaxLayer final : public Layer {
 public:
  Shape3 infer(Shape3 in) override {
    if (in.h != 1 || in.w != 1)
      throw std::runtime_error("softmax: input must be flattened first");
    dim_ = in.c;
    return in;
  }

  Tensor4 forward(const Tensor4& in, bool, Rng&, bool) override {
    Tensor4 out = in;
    for (int n = 0; n < in.n; ++n) {
      double* row = out.v.data() + static_cast<std::size_t>(n) * dim_;
      double mx = row[0];
      for (int j = 1; j < dim_; ++j) mx = std::max(mx, row[j]);
      double sum = 0.0;
      for (int j = 0; j < dim_; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
      }
      for (int j = 0; j < dim_; ++j) row[j] /= sum;
    }
    return out;
  }

  Tensor4 backward(const Tensor4&) override {
    throw std::runtime_error("softmax backward is fused with the cross-entropy loss");
  }

 private:
  int dim_{0};
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::Conv2d: return std::make_unique<Conv2dLayer>(spec);
    case LayerKind::MaxPool: return std::make_unique<MaxPoolLayer>(spec);
    case LayerKind::Relu: return std::make_unique<ReluLayer>();
    case LayerKind::BatchNorm: return std::make_unique<BatchNormLayer>();
    case LayerKind::Dropout: return std::make_unique<DropoutLayer>(spec);
    case LayerKind::Flatten: return std::make_unique<FlattenLayer>();
    case LayerKind::Dense: return std::make_unique<DenseLayer>(spec);
    case LayerKind::Softmax: return std::make_unique<SoftmaxLayer>();
  }
  throw std::runtime_error("unknown layer kind");
}

}  // namespace

// ---------------------------------------------------------------------------
// Network

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  if (spec_.layers.empty()) throw std::runtime_error("network: no layers");
  if (spec_.input.h < 1 || spec_.input.w < 1 || spec_.input.c < 1)
    throw std::runtime_error("network: invalid input shape");
  Shape3 shape = spec_.input;
  for (const auto& ls : spec_.layers) {
    layers_.push_back(make_layer(ls));
    shape = layers_.back()->infer(shape);
  }
  if (spec_.layers.back().kind != LayerKind::Softmax)
    throw std::runtime_error("network: final layer must be softmax");
  if (shape != Shape3{1, 1, 2})
    throw std::runtime_error("network: output must have dimension 2");
}

Network::~Network() = default;

Network::Network(const Network& other) : Network(other.spec_) {
  // Copy every state tensor (parameters + running statistics).
  auto self = state();
  auto src = const_cast<Network&>(other).state();
  for (std::size_t i = 0; i < self.size(); ++i) *self[i].value = *src[i].value;
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

std::vector<Shape3> Network::shape_trace() const {
  std::vector<Shape3> trace;
  Shape3 shape = spec_.input;
  trace.push_back(shape);
  for (const auto& ls : spec_.layers) {
    auto probe = make_layer(ls);
    shape = probe->infer(shape);
    trace.push_back(shape);
  }
  return trace;
}

void Network::init_params(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : layers_) layer->init(rng);
}

std::vector<ParamRef> Network::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto p : layers_[i]->params()) {
      p.name = "layer" + std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<ParamRef> Network::state() {
  std::vector<ParamRef> out = parameters();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto p : layers_[i]->extra_state()) {
      p.name = "layer" + std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

Matrix Network::forward(const Tensor4& batch, Mode mode, std::uint64_t dropout_seed,
                        bool update_running) {
  if (batch.shape != spec_.input) throw std::runtime_error("network: batch shape mismatch");
  if (batch.n < 1) throw std::runtime_error("network: empty batch");
  Rng rng(dropout_seed);
  Tensor4 act = batch;
  for (auto& layer : layers_)
    act = layer->forward(act, mode == Mode::Train, rng, update_running);
  Matrix probs(static_cast<std::size_t>(act.n), 2);
  probs.v = act.v;
  return probs;
}

namespace {

double cross_entropy(const Matrix& probs, const std::vector<int>& labels) {
  if (labels.size() != probs.rows) throw std::runtime_error("network: label count mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::runtime_error("network: labels must be 0 or 1");
    loss -= std::log(std::max(probs.at(i, static_cast<std::size_t>(labels[i])), 1e-300));
  }
  return loss / static_cast<double>(labels.size());
}

}  // namespace

double Network::loss(const Tensor4& batch, const std::vector<int>& labels, Mode mode,
                     std::uint64_t dropout_seed, bool update_running) {
  return cross_entropy(forward(batch, mode, dropout_seed, update_running), labels);
}

double Network::loss_and_backward(const Tensor4& batch, const std::vector<int>& labels,
                                  std::uint64_t dropout_seed, bool update_running) {
  const Matrix probs = forward(batch, Mode::Train, dropout_seed, update_running);
  const double loss_value = cross_entropy(probs, labels);

  // Gradient at the softmax input: (p - onehot) / n.
  Tensor4 grad(batch.n, {1, 1, 2});
  const double inv_n = 1.0 / static_cast<double>(batch.n);
  for (int i = 0; i < batch.n; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double onehot = labels[static_cast<std::size_t>(i)] == j ? 1.0 : 0.0;
      grad.at(i, 0, 0, j) =
          (probs.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - onehot) * inv_n;
    }
  }
  for (auto it = layers_.rbegin() + 1; it != layers_.rend(); ++it)
    grad = (*it)->backward(grad);
  return loss_value;
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Optimizer {
 public:
  Optimizer(std::vector<ParamRef> params, const TrainConfig& cfg)
      : params_(std::move(params)), cfg_(cfg) {
    if (cfg_.optimizer == OptimizerKind::Adam) {
      for (const auto& p : params_) {
        m_.emplace_back(p.value->size(), 0.0);
        v_.emplace_back(p.value->size(), 0.0);
      }
    }
  }

  void step() {
    ++t_;
    if (cfg_.optimizer == OptimizerKind::Sgd) {
      for (const auto& p : params_) {
        for (std::size_t i = 0; i < p.value->size(); ++i)
          (*p.value)[i] -= cfg_.learning_rate * (*p.grad)[i];
      }
      return;
    }
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    const double bc1 = 1.0 - std::pow(beta1, t_);
    const double bc2 = 1.0 - std::pow(beta2, t_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      const auto& p = params_[k];
      for (std::size_t i = 0; i < p.value->size(); ++i) {
        const double g = (*p.grad)[i];
        m_[k][i] = beta1 * m_[k][i] + (1.0 - beta1) * g;
        v_[k][i] = beta2 * v_[k][i] + (1.0 - beta2) * g * g;
        const double mhat = m_[k][i] / bc1;
        const double vhat = v_[k][i] / bc2;
        (*p.value)[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }

 private:
  std::vector<ParamRef> params_;
  TrainConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  double t_{0.0};
};

Tensor4 gather(const Dataset& data, const std::vector<std::size_t>& idx, std::size_t begin,
               std::size_t end) {
  Tensor4 out(static_cast<int>(end - begin), data.x.shape);
  const std::size_t stride = static_cast<std::size_t>(data.x.shape.count());
  for (std::size_t i = begin; i < end; ++i) {
    std::copy_n(data.x.v.data() + idx[i] * stride, stride,
                out.v.data() + (i - begin) * stride);
  }
  return out;
}

std::vector<int> gather_labels(const Dataset& data, const std::vector<std::size_t>& idx,
                               std::size_t begin, std::size_t end) {
  std::vector<int> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(data.y[idx[i]]);
  return out;
}

}  // namespace

TrainHistory train(Network& net, const Dataset& train_set, const Dataset& validation_set,
                   const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0 || validation_set.size() == 0)
    throw std::runtime_error("train: empty train or validation set");
  if (static_cast<std::size_t>(train_set.x.n) != train_set.size() ||
      static_cast<std::size_t>(validation_set.x.n) != validation_set.size())
    throw std::runtime_error("train: dataset tensor/label size mismatch");

  net.init_params(derive_seed(cfg.seed, 0));
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  Optimizer optimizer(net.parameters(), cfg);

  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_state;
  int epochs_without_improvement = 0;
  std::uint64_t step = 0;

  std::vector<std::size_t> idx(train_set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  auto snapshot = [&]() {
    best_state.clear();
    for (const auto& p : net.state()) best_state.push_back(*p.value);
  };
  snapshot();  // epoch-0 weights in case validation never improves

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(idx);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < idx.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(idx.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const Tensor4 bx = gather(train_set, idx, begin, end);
      const std::vector<int> by = gather_labels(train_set, idx, begin, end);
      epoch_loss += net.loss_and_backward(bx, by, derive_seed(cfg.seed, 1000 + step));
      optimizer.step();
      ++step;
      ++batches;
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    const double val_loss =
        net.loss(validation_set.x, validation_set.y, Mode::Eval, 0, false);
    history.val_loss.push_back(val_loss);
    history.stopped_epoch = epoch;

    if (val_loss < best_val) {
      best_val = val_loss;
      history.best_epoch = epoch;
      snapshot();
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
      if (epochs_without_improvement >= cfg.patience) break;
    }
  }

  auto refs = net.state();
  for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].value = best_state[i];
  return history;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {
constexpr char kCheckpointMagic[8] = {'E', 'G', 'R', 'D', 'C', 'K', 'P', '1'};
}

void save_checkpoint(Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  binio::write_pod<std::uint32_t>(out, 1);  // version
  const auto& spec = net.spec();
  binio::write_pod<std::int32_t>(out, spec.input.h);
  binio::write_pod<std::int32_t>(out, spec.input.w);
  binio::write_pod<std::int32_t>(out, spec.input.c);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(spec.layers.size()));
  for (const auto& ls : spec.layers) {
    binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ls.kind));
    binio::write_pod<std::int32_t>(out, ls.out_filters);
    binio::write_pod<std::int32_t>(out, ls.kernel_h);
    binio::write_pod<std::int32_t>(out, ls.kernel_w);
    binio::write_pod<std::int32_t>(out, ls.pool_size);
    binio::write_pod<double>(out, ls.rate);
    binio::write_pod<std::int32_t>(out, ls.out_dim);
  }
  auto refs = net.state();
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(refs.size()));
  for (const auto& p : refs) {
    binio::write_string(out, p.name);
    binio::write_f32_array(out, *p.value);
  }
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw std::runtime_error(path.string() + ": not a checkpoint file");
  const auto version = binio::read_pod<std::uint32_t>(in, "version");
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");

  NetworkSpec spec;
  spec.input.h = binio::read_pod<std::int32_t>(in, "input h");
  spec.input.w = binio::read_pod<std::int32_t>(in, "input w");
  spec.input.c = binio::read_pod<std::int32_t>(in, "input c");
  const auto layer_count = binio::read_pod<std::uint32_t>(in, "layer count");
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    LayerSpec ls;
    ls.kind = static_cast<LayerKind>(binio::read_pod<std::uint32_t>(in, "layer kind"));
    ls.out_filters = binio::read_pod<std::int32_t>(in, "out_filters");
    ls.kernel_h = binio::read_pod<std::int32_t>(in, "kernel_h");
    ls.kernel_w = binio::read_pod<std::int32_t>(in, "kernel_w");
    ls.pool_size = binio::read_pod<std::int32_t>(in, "pool_size");
    ls.rate = binio::read_pod<double>(in, "rate");
    ls.out_dim = binio::read_pod<std::int32_t>(in, "out_dim");
    spec.layers.push_back(ls);
  }

  Network net(spec);
  auto refs = net.state();
  const auto tensor_count = binio::read_pod<std::uint32_t>(in, "tensor count");
  if (tensor_count != refs.size())
    throw std::runtime_error("checkpoint tensor count does not match architecture");
  for (auto& p : refs) {
    const std::string name = binio::read_string(in, "tensor name");
    if (name != p.name) throw std::runtime_error("checkpoint tensor order mismatch: " + name);
    const auto values = binio::read_f32_array(in, name);
    if (values.size() != p.value->size())
      throw std::runtime_error("checkpoint tensor size mismatch: " + name);
    *p.value = values;
  }
  return net;
}

}  // namespace eegrid
