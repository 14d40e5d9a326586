#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "eegrid/matrix.hpp"

namespace eegrid {

struct Shape3 {
  int h{0}, w{0}, c{0};

  int count() const { return h * w * c; }
  bool operator==(const Shape3&) const = default;
};

enum class LayerKind { Conv2d, MaxPool, Relu, BatchNorm, Dropout, Flatten, Dense, Softmax };

struct LayerSpec {
  LayerKind kind{LayerKind::Relu};
  int out_filters{0};
  int kernel_h{0}, kernel_w{0};
  int pool_size{0};
  double rate{0.0};
  int out_dim{0};

  static LayerSpec conv2d(int filters, int kh, int kw);
  static LayerSpec max_pool(int size);
  static LayerSpec relu();
  static LayerSpec batch_norm();
  static LayerSpec dropout(double rate);
  static LayerSpec flatten();
  static LayerSpec dense(int out_dim);
  static LayerSpec softmax();
};

struct NetworkSpec {
  Shape3 input;
  std::vector<LayerSpec> layers;
};

enum class Preset { SadNet, DeapNet };

// Layer stacks from the two reference architectures. SadNet expects
// 15x15x10 input by default, DeapNet 15x15x8; the two-argument form builds
// the same stack on another input shape (model-1 matrices, shrunken test
// inputs) as long as the shapes stay valid.
std::vector<LayerSpec> preset_layers(Preset p);
NetworkSpec build_preset(Preset p);
NetworkSpec build_preset(Preset p, Shape3 input);

// Batch of samples, NHWC, doubles throughout.
struct Tensor4 {
  int n{0};
  Shape3 shape{};
  std::vector<double> v;

  Tensor4() = default;
  Tensor4(int count, Shape3 s) : n(count), shape(s), v(static_cast<std::size_t>(count) * s.count(), 0.0) {}

  double& at(int i, int y, int x, int c) {
    return v[((static_cast<std::size_t>(i) * shape.h + y) * shape.w + x) * shape.c + c];
  }
  double at(int i, int y, int x, int c) const {
    return v[((static_cast<std::size_t>(i) * shape.h + y) * shape.w + x) * shape.c + c];
  }
  const double* ptr(int i, int y, int x) const {
    return v.data() + ((static_cast<std::size_t>(i) * shape.h + y) * shape.w + x) * shape.c;
  }
  double* ptr(int i, int y, int x) {
    return v.data() + ((static_cast<std::size_t>(i) * shape.h + y) * shape.w + x) * shape.c;
  }
};

enum class Mode { Train, Eval };
enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  int batch_size{32};
  double learning_rate{1e-3};
  int max_epochs{50};
  int patience{5};
  OptimizerKind optimizer{OptimizerKind::Adam};
  std::uint64_t seed{0};

  void validate() const;  // all positive, patience < max_epochs
};

struct Dataset {
  Tensor4 x;
  std::vector<int> y;  // 0/1

  std::size_t size() const { return y.size(); }
};

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;
  int best_epoch{0};     // 1-based epoch whose weights were kept
  int stopped_epoch{0};  // last epoch that ran
};

// Named parameter tensor with its gradient buffer.
struct ParamRef {
  std::string name;
  std::vector<double>* value;
  std::vector<double>* grad;
};

class Layer;

// Sequential feed-forward network. Shapes are checked end to end at
// construction; the final layer must be Softmax over 2 classes.
class Network {
 public:
  explicit Network(NetworkSpec spec);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;
  ~Network();

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Shape3> shape_trace() const;  // input + after every layer

  void init_params(std::uint64_t seed);
  std::vector<ParamRef> parameters();  // learnable only
  std::vector<ParamRef> state();       // learnable + running statistics

  // Class probabilities, one row per sample, rows sum to 1. Train mode draws
  // dropout masks from dropout_seed and (optionally) updates batch-norm
  // running statistics; eval mode is deterministic.
  Matrix forward(const Tensor4& batch, Mode mode, std::uint64_t dropout_seed = 0,
                 bool update_running = true);

  // Mean cross-entropy of the batch.
  double loss(const Tensor4& batch, const std::vector<int>& labels, Mode mode,
              std::uint64_t dropout_seed = 0, bool update_running = true);

  // Loss plus exact parameter gradients (written into the grad buffers).
  double loss_and_backward(const Tensor4& batch, const std::vector<int>& labels,
                           std::uint64_t dropout_seed, bool update_running = true);

 private:
  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

TrainHistory train(Network& net, const Dataset& train_set, const Dataset& validation_set,
                   const TrainConfig& cfg);

// Versioned binary checkpoint: layer specs plus every state tensor as
// little-endian f32.
void save_checkpoint(Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace eegrid
