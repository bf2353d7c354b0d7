#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "magaisil/common/error.hpp"
#include "magaisil/nn/adam.hpp"
#include "magaisil/nn/serialization.hpp"
#include "oracles.hpp"

using namespace magaisil;
using namespace magaisil::nn;

TEST(Mlp, ZeroWeightHeads) {
  const Mlp soft({6, 4, 5}, Head::Softmax);
  for (double p : soft.predict(std::vector<double>{1, -2, 3, 0.5, 9, -7})) EXPECT_DOUBLE_EQ(p, 0.2);
  const Mlp sig({3, 4, 1}, Head::Sigmoid);
  EXPECT_DOUBLE_EQ(sig.predict(std::vector<double>{4, 5, 6})[0], 0.5);
}

TEST(Mlp, HandComputedForward) {
  // One linear layer: [0.5, -1] . [1, 2] + 0.25
  Mlp lin({2, 1}, Head::Scalar);
  auto p = lin.mutable_params();
  p[0] = 0.5;
  p[1] = -1.0;
  p[2] = 0.25;
  EXPECT_DOUBLE_EQ(lin.predict(std::vector<double>{1, 2})[0], -1.25);

  // 2 -> 2 (tanh) -> 1: identity first layer, output weights [1, 2], bias -1.
  Mlp net({2, 2, 1}, Head::Scalar);
  auto q = net.mutable_params();
  q[0] = 1;  // W0 row 0
  q[3] = 1;  // W0 row 1
  q[6] = 1;  // W1
  q[7] = 2;
  q[8] = -1;  // b1
  EXPECT_NEAR(net.predict(std::vector<double>{1, 2})[0], std::tanh(1.0) + 2 * std::tanh(2.0) - 1, 1e-15);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  for (Head head : {Head::Softmax, Head::Scalar, Head::Sigmoid}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const oracle::GradCheck g = oracle::check_mlp_gradient(head, seed);
      EXPECT_LT(g.worst_relative_error, 1e-4) << to_string(head) << " seed " << seed;
    }
  }
}

TEST(Mlp, LogitGradientMatchesFiniteDifferences) {
  Rng rng(4);
  const Mlp net = Mlp::orthogonal({4, 6, 5}, Head::Softmax, 1.0, rng);
  const std::vector<double> x{0.3, -1.2, 2.0, 0.7};
  const std::vector<double> c{1.0, -2.0, 0.5, 0.0, 3.0};
  const Forward fw = net.forward(x);
  const Gradients g = net.backward_from_logits(fw.cache, c);
  const auto numeric = oracle::numeric_gradient(net, [&](const Mlp& n) {
    const auto z = n.logits(x);
    double s = 0;
    for (int i = 0; i < 5; ++i) s += c[i] * z[i];
    return s;
  });
  EXPECT_LT(oracle::max_relative_error(g.values, numeric), 1e-6);
}

TEST(Mlp, ZeroOutputGradientGivesZeroGradients) {
  Rng rng(2);
  const Mlp net = Mlp::orthogonal({3, 5, 5}, Head::Softmax, 1.0, rng);
  const Forward fw = net.forward(std::vector<double>{1, 2, 3});
  const Gradients g = net.backward(fw.cache, std::vector<double>(5, 0.0));
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, QuadraticLossOnSingleParameter) {
  Mlp net({1, 1}, Head::Scalar);
  net.mutable_params()[0] = 1.7;
  const double target = -0.4;
  const Forward fw = net.forward(std::vector<double>{1.0});
  const double dout = 2.0 * (fw.output[0] - target);
  const Gradients g = net.backward(fw.cache, std::vector<double>{dout});
  EXPECT_DOUBLE_EQ(g.values[0], 2.0 * (1.7 - target));
}

TEST(Mlp, StaleOrForeignCacheRejected) {
  Rng rng(1);
  Mlp net = Mlp::orthogonal({2, 3, 1}, Head::Scalar, 1.0, rng);
  const Forward fw = net.forward(std::vector<double>{1, 1});
  net.mutable_params()[0] += 1.0;
  EXPECT_THROW(net.backward(fw.cache, std::vector<double>{1.0}), ContractError);
  const Mlp other = Mlp::orthogonal({2, 4, 1}, Head::Scalar, 1.0, rng);
  const Forward fo = other.forward(std::vector<double>{1, 1});
  EXPECT_THROW(net.backward(fo.cache, std::vector<double>{1.0}), ContractError);
  EXPECT_THROW(net.forward(std::vector<double>{1, 2, 3}), ContractError);
}

TEST(Mlp, SoftmaxShiftInvariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 5);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> z(5);
    for (double& v : z) v = g(rng);
    const double shift = g(rng) * 10;
    std::vector<double> zs = z;
    for (double& v : zs) v += shift;
    const auto p = softmax(z), ps = softmax(zs);
    double sum = 0;
    for (int k = 0; k < 5; ++k) {
      EXPECT_NEAR(p[k], ps[k], 1e-12);
      sum += p[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Mlp, SigmoidOutputInOpenInterval) {
  Rng rng(3);
  const Mlp net = Mlp::orthogonal({2, 4, 1}, Head::Sigmoid, 1.0, rng);
  for (double x : {-1e3, -10.0, 0.0, 10.0, 1e3}) {
    const double d = net.predict(std::vector<double>{x, -x})[0];
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Mlp net({1, 1}, Head::Scalar);
  net.mutable_params()[0] = 0.3;
  AdamState st = AdamState::for_net(net, {0.001, 0.9, 0.999, 1e-8});
  Gradients g{{1.0, 0.0}};
  adam_step(net, st, g);
  // m_hat = 1, v_hat = 1 -> step = lr * 1 / (1 + 1e-8)
  EXPECT_NEAR(net.params()[0], 0.3 - 0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(net.params()[1], 0.0);  // zero gradient, zero moments, no motion
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, SecondStepMomentRecurrence) {
  Mlp net({1, 1}, Head::Scalar);
  AdamState st = AdamState::for_net(net, {0.01, 0.9, 0.999, 1e-8});
  Gradients g{{0.5, -2.0}};
  adam_step(net, st, g);
  const double w1 = net.params()[0];
  adam_step(net, st, g);
  // m2 = 0.9*0.05 + 0.1*0.5 = 0.095, v2 = 0.999*0.00025 + 0.001*0.25 = 0.00049975
  EXPECT_NEAR(st.first_moment[0], 0.095, 1e-15);
  EXPECT_NEAR(st.second_moment[0], 0.00049975, 1e-15);
  const double m_hat = 0.095 / (1 - 0.81);
  const double v_hat = 0.00049975 / (1 - 0.999 * 0.999);
  EXPECT_NEAR(net.params()[0], w1 - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8), 1e-15);
  EXPECT_EQ(st.step, 2);
}

TEST(Adam, NonFiniteGradientLeavesEverythingUntouched) {
  Rng rng(5);
  Mlp net = Mlp::orthogonal({2, 3, 1}, Head::Scalar, 1.0, rng);
  AdamState st = AdamState::for_net(net, {});
  const Mlp before = net;
  const AdamState st_before = st;
  Gradients g = net.zero_gradients();
  g.values[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adam_step(net, st, g), TrainingFault);
  EXPECT_TRUE(net == before);
  EXPECT_TRUE(st == st_before);
}

TEST(Adam, GlobalNormClip) {
  Gradients g{{3.0, 4.0}};
  EXPECT_DOUBLE_EQ(clip_global_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g.norm(), 1.0, 1e-15);
  Gradients small{{0.3, 0.4}};
  clip_global_norm(small, 1.0);
  EXPECT_DOUBLE_EQ(small.values[0], 0.3);
}

TEST(Serialization, BitExactRoundTrip) {
  for (Head head : {Head::Softmax, Head::Scalar, Head::Sigmoid}) {
    Rng rng(static_cast<std::uint64_t>(head) + 10);
    Mlp net = Mlp::orthogonal({8, 64, 64, head == Head::Softmax ? 5 : 1}, head, 0.01, rng);
    AdamState st = AdamState::for_net(net, {1e-3, 0.9, 0.999, 1e-8});
    for (int i = 0; i < 3; ++i) {
      Gradients g = net.zero_gradients();
      std::normal_distribution<double> n(0, 1);
      for (double& v : g.values) v = n(rng);
      adam_step(net, st, g);
    }
    const std::string text = to_json(net, &st).dump();
    const nlohmann::json back = nlohmann::json::parse(text);
    const Mlp net2 = mlp_from_json(back);
    const auto st2 = adam_from_json(back);
    ASSERT_TRUE(st2.has_value());
    EXPECT_TRUE(net2 == net);
    EXPECT_TRUE(*st2 == st);
    EXPECT_EQ(to_json(net2, &*st2).dump(), text);
  }
}

TEST(Serialization, SchemaAndErrors) {
  const Mlp net({2, 3, 1}, Head::Sigmoid);
  const nlohmann::json j = to_json(net);
  EXPECT_EQ(j.at("version"), kCheckpointVersion);
  EXPECT_EQ(j.at("head"), "sigmoid");
  EXPECT_EQ(j.at("layer_sizes"), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(j.at("weights").size(), 2u);
  EXPECT_FALSE(adam_from_json(j).has_value());
  nlohmann::json bad = j;
  bad["weights"][0]["w"][0].push_back(1.0);
  EXPECT_THROW(mlp_from_json(bad), ParseError);
  bad = j;
  bad["version"] = 99;
  EXPECT_THROW(mlp_from_json(bad), ParseError);
}

TEST(Determinism, SameSeedSameNetwork) {
  Rng a(77), b(77);
  EXPECT_TRUE(Mlp::orthogonal({6, 64, 64, 5}, Head::Softmax, 0.01, a) ==
              Mlp::orthogonal({6, 64, 64, 5}, Head::Softmax, 0.01, b));
}
