#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "eegrid/cnn.hpp"
#include "eegrid/selfcheck.hpp"
#include "eegrid/util.hpp"

using namespace eegrid;

namespace {

Tensor4 random_batch(int n, Shape3 shape, std::uint64_t seed) {
  Tensor4 t(n, shape);
  Rng rng(seed);
  for (auto& v : t.v) v = rng.normal();
  return t;
}

std::vector<int> alternating_labels(int n) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i % 2;
  return y;
}

double max_grad_rel_error(Network& net, const Tensor4& batch, const std::vector<int>& labels,
                          std::uint64_t dropout_seed) {
  net.loss_and_backward(batch, labels, dropout_seed, false);
  auto params = net.parameters();
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) analytic.push_back(*p.grad);
  auto loss = [&]() { return net.loss(batch, labels, Mode::Train, dropout_seed, false); };
  const auto numeric = selfcheck::finite_difference_gradients(loss, params, 1e-5);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < analytic[k].size(); ++i) {
      const double denom = std::max({std::abs(analytic[k][i]), std::abs(numeric[k][i]), 1e-6});
      worst = std::max(worst, std::abs(analytic[k][i] - numeric[k][i]) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("preset shape traces match the valid-convolution arithmetic") {
  SUBCASE("sad net on 15x15x10") {
    Network net(build_preset(Preset::SadNet));
    const auto trace = net.shape_trace();
    // bn, conv, relu, conv, relu, pool, dropout, flatten, dense, relu, dropout, dense, softmax
    CHECK(trace[0] == Shape3{15, 15, 10});
    CHECK(trace[2] == Shape3{13, 13, 64});
    CHECK(trace[4] == Shape3{11, 11, 64});
    CHECK(trace[6] == Shape3{5, 5, 64});
    CHECK(trace[8] == Shape3{1, 1, 1600});
    CHECK(trace[9] == Shape3{1, 1, 128});
    CHECK(trace[12] == Shape3{1, 1, 2});
    CHECK(trace.back() == Shape3{1, 1, 2});
  }
  SUBCASE("deap net on 15x15x8") {
    Network net(build_preset(Preset::DeapNet));
    const auto trace = net.shape_trace();
    // bn, conv, relu, pool, conv, relu, pool, dropout, flatten, dense, relu, dropout, dense, softmax
    CHECK(trace[0] == Shape3{15, 15, 8});
    CHECK(trace[2] == Shape3{13, 13, 32});
    CHECK(trace[4] == Shape3{6, 6, 32});
    CHECK(trace[5] == Shape3{4, 4, 64});
    CHECK(trace[7] == Shape3{2, 2, 64});
    CHECK(trace[9] == Shape3{1, 1, 256});
    CHECK(trace[10] == Shape3{1, 1, 64});
    CHECK(trace.back() == Shape3{1, 1, 2});
  }
  SUBCASE("sad dropout rates are 0.25 and 0.2, deap 0.45 and 0.25") {
    const auto sad = preset_layers(Preset::SadNet);
    std::vector<double> sad_rates;
    for (const auto& l : sad)
      if (l.kind == LayerKind::Dropout) sad_rates.push_back(l.rate);
    CHECK(sad_rates == std::vector<double>{0.25, 0.2});
    const auto deap = preset_layers(Preset::DeapNet);
    std::vector<double> deap_rates;
    for (const auto& l : deap)
      if (l.kind == LayerKind::Dropout) deap_rates.push_back(l.rate);
    CHECK(deap_rates == std::vector<double>{0.45, 0.25});
  }
  SUBCASE("deap net cannot build on the 32x8 model-1 shape (valid convolutions)") {
    CHECK_THROWS(Network(build_preset(Preset::DeapNet, Shape3{32, 8, 1})));
    CHECK_NOTHROW(Network(build_preset(Preset::SadNet, Shape3{34, 10, 1})));
  }
}

TEST_CASE("forward produces probability rows and eval mode is deterministic") {
  Network net(build_preset(Preset::SadNet, Shape3{8, 8, 3}));
  net.init_params(1);
  const Tensor4 batch = random_batch(5, {8, 8, 3}, 2);
  Matrix p1 = net.forward(batch, Mode::Train, 7);
  for (std::size_t i = 0; i < p1.rows; ++i)
    CHECK(p1.at(i, 0) + p1.at(i, 1) == doctest::Approx(1.0).epsilon(1e-9));

  // warm the running stats once, then eval twice
  net.forward(batch, Mode::Train, 8);
  const Matrix e1 = net.forward(batch, Mode::Eval);
  const Matrix e2 = net.forward(batch, Mode::Eval);
  for (std::size_t i = 0; i < e1.v.size(); ++i) CHECK(e1.v[i] == e2.v[i]);
}

TEST_CASE("zero-weight network outputs the uniform distribution") {
  NetworkSpec spec;
  spec.input = {2, 2, 1};
  spec.layers = {LayerSpec::flatten(), LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);  // params start at zero
  const Matrix p = net.forward(random_batch(3, {2, 2, 1}, 3), Mode::Eval);
  for (std::size_t i = 0; i < p.rows; ++i) {
    CHECK(p.at(i, 0) == doctest::Approx(0.5));
    CHECK(p.at(i, 1) == doctest::Approx(0.5));
  }
}

TEST_CASE("gradients match finite differences for every layer kind in isolation") {
  struct Case {
    const char* name;
    NetworkSpec spec;
  };
  std::vector<Case> cases;
  cases.push_back({"dense+softmax",
                   {{1, 1, 6}, {LayerSpec::dense(2), LayerSpec::softmax()}}});
  cases.push_back({"conv",
                   {{4, 4, 2},
                    {LayerSpec::conv2d(2, 3, 3), LayerSpec::flatten(), LayerSpec::dense(2),
                     LayerSpec::softmax()}}});
  cases.push_back({"relu",
                   {{1, 1, 8},
                    {LayerSpec::dense(6), LayerSpec::relu(), LayerSpec::dense(2),
                     LayerSpec::softmax()}}});
  cases.push_back({"maxpool",
                   {{4, 4, 2},
                    {LayerSpec::max_pool(2), LayerSpec::flatten(), LayerSpec::dense(2),
                     LayerSpec::softmax()}}});
  cases.push_back({"batchnorm",
                   {{3, 3, 2},
                    {LayerSpec::batch_norm(), LayerSpec::flatten(), LayerSpec::dense(2),
                     LayerSpec::softmax()}}});
  cases.push_back({"dropout",
                   {{1, 1, 10},
                    {LayerSpec::dropout(0.3), LayerSpec::dense(2), LayerSpec::softmax()}}});
  for (auto& c : cases) {
    CAPTURE(c.name);
    Network net(c.spec);
    net.init_params(11);
    selfcheck::randomize_parameters(net, 12);
    const Tensor4 batch = random_batch(4, c.spec.input, 13);
    CHECK(max_grad_rel_error(net, batch, alternating_labels(4), 17) < 1e-4);
  }
}

TEST_CASE("gradient check passes for the composed tiny net (4x4x2, 2-filter conv)") {
  NetworkSpec spec;
  spec.input = {4, 4, 2};
  spec.layers = {LayerSpec::batch_norm(), LayerSpec::conv2d(2, 3, 3), LayerSpec::relu(),
                 LayerSpec::max_pool(2),  LayerSpec::dropout(0.25),   LayerSpec::flatten(),
                 LayerSpec::dense(4),     LayerSpec::relu(),          LayerSpec::dense(2),
                 LayerSpec::softmax()};
  Network net(spec);
  net.init_params(21);
  selfcheck::randomize_parameters(net, 24);
  const Tensor4 batch = random_batch(6, spec.input, 22);
  CHECK(max_grad_rel_error(net, batch, alternating_labels(6), 23) < 1e-4);
}

TEST_CASE("duplicated batch gives identical gradients (mean reduction)") {
  NetworkSpec spec;
  spec.input = {3, 3, 1};
  spec.layers = {LayerSpec::conv2d(2, 2, 2), LayerSpec::relu(), LayerSpec::flatten(),
                 LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);
  net.init_params(31);
  const Tensor4 batch = random_batch(3, spec.input, 32);
  const auto labels = alternating_labels(3);
  net.loss_and_backward(batch, labels, 0, false);
  std::vector<std::vector<double>> single;
  for (const auto& p : net.parameters()) single.push_back(*p.grad);

  Tensor4 doubled(6, spec.input);
  std::copy(batch.v.begin(), batch.v.end(), doubled.v.begin());
  std::copy(batch.v.begin(), batch.v.end(),
            doubled.v.begin() + static_cast<std::ptrdiff_t>(batch.v.size()));
  std::vector<int> doubled_labels = labels;
  doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());
  net.loss_and_backward(doubled, doubled_labels, 0, false);
  auto params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < single[k].size(); ++i)
      CHECK((*params[k].grad)[i] == doctest::Approx(single[k][i]).epsilon(1e-12));
  }
}

TEST_CASE("gradient vanishes at a saturated correct prediction") {
  NetworkSpec spec;
  spec.input = {1, 1, 2};
  spec.layers = {LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);
  auto params = net.parameters();
  // weights chosen so logits are (+20, -20) for the input (1, 0)
  (*params[0].value)[0] = 20.0;
  (*params[0].value)[1] = 0.0;
  (*params[0].value)[2] = -20.0;
  (*params[0].value)[3] = 0.0;
  Tensor4 batch(1, spec.input);
  batch.v = {1.0, 0.0};
  net.loss_and_backward(batch, {0}, 0, false);
  double norm = 0.0;
  for (const auto& p : net.parameters())
    for (double g : *p.grad) norm += g * g;
  CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("batch norm normalizes in train mode and converges running stats") {
  NetworkSpec spec;
  spec.input = {1, 1, 3};
  spec.layers = {LayerSpec::batch_norm(), LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);
  net.init_params(41);
  // capture the normalized activations through a probe: gamma=1, beta=0 after init
  const Tensor4 batch = random_batch(16, spec.input, 42);

  SUBCASE("train mode requires batch size >= 2") {
    Tensor4 one(1, spec.input);
    one.v = {1.0, 2.0, 3.0};
    CHECK_THROWS(net.forward(one, Mode::Train, 0));
    CHECK_NOTHROW(net.forward(one, Mode::Eval));
  }

  SUBCASE("constant feature survives via the epsilon guard") {
    Tensor4 constant(4, spec.input);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 3; ++c) constant.at(i, 0, 0, c) = 5.0;
    const Matrix p = net.forward(constant, Mode::Train, 0);
    for (double v : p.v) CHECK(std::isfinite(v));
  }

  SUBCASE("after many identical train batches, eval matches train output") {
    Matrix train_out;
    for (int reps = 0; reps < 200; ++reps) train_out = net.forward(batch, Mode::Train, 0);
    const Matrix eval_out = net.forward(batch, Mode::Eval);
    for (std::size_t i = 0; i < train_out.v.size(); ++i)
      CHECK(eval_out.v[i] == doctest::Approx(train_out.v[i]).epsilon(1e-3));
  }
}

TEST_CASE("inverted dropout zeroes the configured fraction and scales survivors") {
  // Dropout is the first layer; with an all-ones input, the dense weight
  // gradient is delta_j * activation_i and the bias gradient is delta_j, so
  // activation_i = wgrad[j][i] / bgrad[j]. Survivors must equal 1/(1-r).
  const double rate = 0.3;
  const double survivor = 1.0 / (1.0 - rate);
  NetworkSpec spec;
  spec.input = {1, 1, 100};
  spec.layers = {LayerSpec::dropout(rate), LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);
  net.init_params(51);
  Tensor4 ones(1, spec.input);
  for (auto& v : ones.v) v = 1.0;

  long dead = 0;
  long total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {  // 10^4 unit draws
    net.loss_and_backward(ones, {0}, seed, false);
    const auto refs = net.parameters();
    const auto& wgrad = *refs[0].grad;  // dense.weight, row-major 2x100
    const auto& bgrad = *refs[1].grad;
    const std::size_t row = std::abs(bgrad[0]) > std::abs(bgrad[1]) ? 0 : 1;
    REQUIRE(bgrad[row] != 0.0);
    for (std::size_t i = 0; i < 100; ++i) {
      const double act = wgrad[row * 100 + i] / bgrad[row];
      if (act == 0.0)
        ++dead;
      else
        CHECK(act == doctest::Approx(survivor).epsilon(1e-9));
      ++total;
    }
  }
  const double fraction = static_cast<double>(dead) / static_cast<double>(total);
  CHECK(std::abs(fraction - rate) < 0.02);

  // eval mode is a no-op
  const Matrix a = net.forward(ones, Mode::Eval);
  const Matrix b = net.forward(ones, Mode::Eval);
  for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(a.v[i] == b.v[i]);
}

namespace {

Dataset two_blob_dataset(int per_class, std::uint64_t seed) {
  Dataset d{Tensor4(2 * per_class, {1, 1, 2}), {}};
  Rng rng(seed);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 0 : 1;
    const double cx = label == 0 ? -1.5 : 1.5;
    d.x.at(i, 0, 0, 0) = cx + 0.3 * rng.normal();
    d.x.at(i, 0, 0, 1) = 0.3 * rng.normal();
    d.y.push_back(label);
  }
  return d;
}

NetworkSpec small_dense_spec() {
  NetworkSpec spec;
  spec.input = {1, 1, 2};
  spec.layers = {LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(2),
                 LayerSpec::softmax()};
  return spec;
}

}  // namespace

TEST_CASE("training reaches 99% accuracy on a separable toy set within 50 epochs") {
  const Dataset train_set = two_blob_dataset(40, 61);
  const Dataset valid_set = two_blob_dataset(10, 62);
  Network net(small_dense_spec());
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 50;
  cfg.patience = 49;
  cfg.seed = 7;
  train(net, train_set, valid_set, cfg);

  long correct = 0;
  const Matrix p = net.forward(train_set.x, Mode::Eval);
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const int pred = p.at(i, 1) >= p.at(i, 0) ? 1 : 0;
    if (pred == train_set.y[i]) ++correct;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(train_set.size()) >= 0.99);
}

TEST_CASE("full-batch sgd decreases the loss monotonically on a separable problem") {
  const Dataset d = two_blob_dataset(30, 71);
  Network net(small_dense_spec());
  net.init_params(72);
  // small learning rate, full batch, plain gradient steps
  const double lr = 0.05;
  double previous = net.loss(d.x, d.y, Mode::Eval);
  for (int step = 0; step < 10; ++step) {
    net.loss_and_backward(d.x, d.y, 0, false);
    for (const auto& p : net.parameters()) {
      for (std::size_t i = 0; i < p.value->size(); ++i)
        (*p.value)[i] -= lr * (*p.grad)[i];
    }
    const double current = net.loss(d.x, d.y, Mode::Eval);
    CHECK(current < previous);
    previous = current;
  }
}

TEST_CASE("early stopping keeps the best-validation epoch") {
  // Validation loss strictly increases from epoch 1 when the validation
  // labels are inverted: training improves the train fit and worsens the
  // inverted-validation loss each epoch.
  Dataset train_set = two_blob_dataset(40, 81);
  Dataset valid_set = two_blob_dataset(10, 82);
  for (auto& y : valid_set.y) y = 1 - y;

  Network net(small_dense_spec());
  TrainConfig cfg;
  cfg.batch_size = 80;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 40;
  cfg.patience = 3;
  cfg.optimizer = OptimizerKind::Sgd;
  cfg.seed = 5;
  const TrainHistory history = train(net, train_set, valid_set, cfg);

  REQUIRE(history.val_loss.size() >= 4);
  // strictly increasing validation loss from the start
  for (std::size_t e = 1; e < history.val_loss.size(); ++e)
    CHECK(history.val_loss[e] > history.val_loss[e - 1]);
  CHECK(history.best_epoch == 1);
  CHECK(history.stopped_epoch == 4);  // patience 3 exhausted at epoch 4

  // restored weights reproduce the epoch-1 validation loss
  const double val_loss = net.loss(valid_set.x, valid_set.y, Mode::Eval);
  CHECK(val_loss == doctest::Approx(history.val_loss.front()).epsilon(1e-12));
}

TEST_CASE("equal seeds give bit-identical trained weights") {
  const Dataset train_set = two_blob_dataset(30, 91);
  const Dataset valid_set = two_blob_dataset(8, 92);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 6;
  cfg.patience = 5;
  cfg.seed = 99;

  Network a(small_dense_spec());
  Network b(small_dense_spec());
  train(a, train_set, valid_set, cfg);
  train(b, train_set, valid_set, cfg);
  auto ra = a.state();
  auto rb = b.state();
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    REQUIRE(ra[k].value->size() == rb[k].value->size());
    for (std::size_t i = 0; i < ra[k].value->size(); ++i)
      CHECK((*ra[k].value)[i] == (*rb[k].value)[i]);
  }
}

TEST_CASE("checkpoints reload for inference") {
  Network net(build_preset(Preset::SadNet, Shape3{8, 8, 3}));
  net.init_params(3);
  const Tensor4 batch = random_batch(4, {8, 8, 3}, 4);
  net.forward(batch, Mode::Train, 5);  // move the running stats off init

  const auto path = std::filesystem::temp_directory_path() / "eegrid_ckpt.bin";
  save_checkpoint(net, path);
  Network loaded = load_checkpoint(path);

  const Matrix expect = net.forward(batch, Mode::Eval);
  const Matrix got = loaded.forward(batch, Mode::Eval);
  for (std::size_t i = 0; i < expect.v.size(); ++i)
    CHECK(got.v[i] == doctest::Approx(expect.v[i]).epsilon(1e-5));  // f32 storage

  CHECK_THROWS(load_checkpoint(std::filesystem::temp_directory_path() / "missing.bin"));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.patience = cfg.max_epochs;
  CHECK_THROWS(cfg.validate());
  cfg.patience = 1;
  cfg.batch_size = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("batch norm train output sums to zero per batch before scale/shift") {
  // Probe through a dense readout: row 0 of the dense weights sums every
  // normalized feature, so the batch mean of logit 0 equals the sum of the
  // per-feature batch means, which must vanish (gamma=1, beta=0 after
  // construction).
  NetworkSpec spec;
  spec.input = {1, 1, 5};
  spec.layers = {LayerSpec::batch_norm(), LayerSpec::dense(2), LayerSpec::softmax()};
  Network net(spec);
  auto params = net.parameters();  // bn.gamma, bn.beta, dense.weight, dense.bias
  REQUIRE(params[2].name.find("dense.weight") != std::string::npos);
  for (std::size_t i = 0; i < 5; ++i) (*params[2].value)[i] = 1.0;

  Tensor4 batch = random_batch(16, spec.input, 321);
  for (auto& v : batch.v) v = 3.0 + 10.0 * v;  // arbitrary offset and scale
  // logits are recovered from probabilities: logit0 - logit1 = ln(p0/p1),
  // and logit1 = 0 here (row 1 weights are zero, biases zero)
  const Matrix probs = net.forward(batch, Mode::Train, 0, false);
  double mean_logit0 = 0.0;
  for (std::size_t i = 0; i < probs.rows; ++i)
    mean_logit0 += std::log(probs.at(i, 0) / probs.at(i, 1));
  mean_logit0 /= static_cast<double>(probs.rows);
  CHECK(std::abs(mean_logit0) < 1e-9);
}
