#include "magaisil/algo/learner.hpp"

#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

AgentLearner AgentLearner::create(AgentId agent, const TrainConfig& config,
                                  std::shared_ptr<const DemoSet> demos) {
  config.validate();
  AgentLearner l;
  l.agent = agent;
  l.rng.seed(derive_seed(config.seed, static_cast<std::uint64_t>(index_of(agent))));
  const int obs = algo::observation_size(agent);

  std::vector<int> policy_sizes{obs};
  policy_sizes.insert(policy_sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  std::vector<int> value_sizes = policy_sizes;
  std::vector<int> disc_sizes = policy_sizes;
  policy_sizes.push_back(world::kNumActions);
  value_sizes.push_back(1);
  disc_sizes.front() = obs + world::kNumActions;
  disc_sizes.push_back(1);

  l.policy = nn::Mlp::orthogonal(policy_sizes, nn::Head::Softmax, 0.01, l.rng);
  l.value = nn::Mlp::orthogonal(value_sizes, nn::Head::Scalar, 1.0, l.rng);
  l.discriminator = nn::Mlp::orthogonal(disc_sizes, nn::Head::Sigmoid, 0.01, l.rng);
  l.policy_opt = nn::AdamState::for_net(l.policy, {.learning_rate = config.policy_lr});
  l.value_opt = nn::AdamState::for_net(l.value, {.learning_rate = config.value_lr});
  l.disc_opt = nn::AdamState::for_net(l.discriminator, {.learning_rate = config.disc_lr});
  l.demos = std::move(demos);
  l.pool.capacity = static_cast<std::size_t>(config.pool_capacity_pairs);
  l.validate();
  return l;
}

void AgentLearner::validate() const {
  const int obs = algo::observation_size(agent);
  if (policy.input_size() != obs || value.input_size() != obs ||
      discriminator.input_size() != obs + world::kNumActions) {
    throw ContractError("network input sizes do not match agent " + std::string(to_string(agent)));
  }
  if (policy.output_size() != world::kNumActions || policy.head() != nn::Head::Softmax) {
    throw ContractError("policy must be a softmax over the 5 actions");
  }
  if (demos && demos->agent != agent) throw ContractError("demonstrations belong to another agent");
}

std::vector<double> action_probabilities(const nn::Mlp& policy, std::span<const double> observation) {
  return policy.predict(observation);
}

ActionSample select_action(const AgentLearner& learner, std::span<const double> observation,
                           Rng& rng) {
  const std::vector<double> logits = learner.policy.logits(observation);
  const std::vector<double> log_probs = nn::log_softmax(logits);
  const double value = learner.value.predict(observation)[0];
  for (double lp : log_probs) {
    if (!std::isfinite(lp)) throw TrainingFault("policy produced a non-finite output");
  }
  if (!std::isfinite(value)) throw TrainingFault("value network produced a non-finite output");

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  int chosen = world::kNumActions - 1;
  double cumulative = 0.0;
  for (int a = 0; a < world::kNumActions; ++a) {
    cumulative += std::exp(log_probs[a]);
    if (u < cumulative) {
      chosen = a;
      break;
    }
  }
  return {world::action_from_index(chosen), log_probs[chosen], value};
}

ActionSample select_action(AgentLearner& learner, std::span<const double> observation) {
  return select_action(learner, observation, learner.rng);
}

world::ActionId greedy_action(const nn::Mlp& policy, std::span<const double> observation) {
  const std::vector<double> logits = policy.logits(observation);
  int best = 0;
  for (int a = 1; a < static_cast<int>(logits.size()); ++a) {
    if (logits[a] > logits[best]) best = a;
  }
  return world::action_from_index(best);
}

}  // namespace magaisil::algo
