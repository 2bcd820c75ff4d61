#include "deeprf/policy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "deeprf/io.hpp"

namespace deeprf {

void adam_step(std::span<double> params, std::span<const double> grads,
               std::span<double> m, std::span<double> v, std::int64_t step,
               const AdamConfig& cfg) {
  const double c1 = 1.0 - std::pow(cfg.beta1, double(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

std::int64_t PolicyNetwork::n_params() const {
  std::int64_t n = 0;
  for (int l = 0; l < n_layers(); ++l)
    n += std::int64_t(weights[l].size()) + std::int64_t(biases[l].size());
  return n;
}

PolicyNetwork PolicyNetwork::create(std::vector<int> sizes, Rng& rng) {
  if (sizes.size() < 2) throw Error("policy net needs at least two layers");
  PolicyNetwork net;
  net.layer_sizes = std::move(sizes);
  const int layers = int(net.layer_sizes.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    const int fan_in = net.layer_sizes[l];
    const int fan_out = net.layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(double(fan_in));
    std::vector<double> w(std::size_t(fan_out) * fan_in);
    for (auto& x : w) x = rng.uniform_symmetric(scale);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(fan_out, 0.0);
    net.m_w.emplace_back(std::size_t(fan_out) * fan_in, 0.0);
    net.v_w.emplace_back(std::size_t(fan_out) * fan_in, 0.0);
    net.m_b.emplace_back(fan_out, 0.0);
    net.v_b.emplace_back(fan_out, 0.0);
  }
  return net;
}

PolicyNetwork PolicyNetwork::standard(int n_points, int n_root, Rng& rng) {
  std::vector<int> sizes{n_points};
  for (int i = 0; i < 7; ++i) sizes.push_back(256);
  sizes.push_back(n_root);
  return create(std::move(sizes), rng);
}

std::vector<double> PolicyNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(std::size_t(n_params()));
  for (int l = 0; l < n_layers(); ++l) {
    out.insert(out.end(), weights[l].begin(), weights[l].end());
    out.insert(out.end(), biases[l].begin(), biases[l].end());
  }
  return out;
}

void PolicyNetwork::unflatten(std::span<const double> p) {
  std::size_t pos = 0;
  for (int l = 0; l < n_layers(); ++l) {
    std::copy_n(p.begin() + pos, weights[l].size(), weights[l].begin());
    pos += weights[l].size();
    std::copy_n(p.begin() + pos, biases[l].size(), biases[l].begin());
    pos += biases[l].size();
  }
  if (pos != p.size()) throw Error("parameter vector length mismatch");
}

namespace {

struct ForwardTrace {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // activation per layer (post[0]=x)
  std::vector<double> probs;
};

ForwardTrace forward_trace(const PolicyNetwork& net,
                           std::span<const double> state,
                           const std::vector<std::uint8_t>& mask) {
  if (int(state.size()) != net.n_inputs())
    throw Error("state length does not match the input layer");
  ForwardTrace tr;
  tr.post.emplace_back(state.begin(), state.end());
  for (int l = 0; l < net.n_layers(); ++l) {
    const int nin = net.layer_sizes[l];
    const int nout = net.layer_sizes[l + 1];
    const auto& x = tr.post.back();
    std::vector<double> z(nout);
    for (int i = 0; i < nout; ++i) {
      double acc = net.biases[l][i];
      const double* row = net.weights[l].data() + std::size_t(i) * nin;
      for (int j = 0; j < nin; ++j) acc += row[j] * x[j];
      z[i] = acc;
    }
    if (l + 1 < net.n_layers()) {
      std::vector<double> a(nout);
      for (int i = 0; i < nout; ++i)
        a[i] = z[i] > 0.0 ? z[i] : net.leaky_slope * z[i];
      tr.pre.push_back(std::move(z));
      tr.post.push_back(std::move(a));
    } else {
      tr.pre.push_back(z);
      tr.post.push_back(std::move(z));
    }
  }

  // masked softmax over the logits
  const auto& logits = tr.post.back();
  const int n = int(logits.size());
  if (int(mask.size()) != n) throw Error("mask length mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (!mask[i]) mx = std::max(mx, logits[i]);
  if (!std::isfinite(mx)) throw AllMasked();
  tr.probs.assign(n, 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    if (!mask[i]) {
      tr.probs[i] = std::exp(logits[i] - mx);
      total += tr.probs[i];
    }
  for (double& p : tr.probs) p /= total;
  return tr;
}

std::vector<double> amplitude_state(const RfPulse& pulse, double norm) {
  std::vector<double> s(pulse.samples.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = std::abs(pulse.samples[i]) / norm;
  return s;
}

}  // namespace

std::vector<double> forward(const PolicyNetwork& net,
                            std::span<const double> state,
                            const std::vector<std::uint8_t>& mask) {
  return forward_trace(net, state, mask).probs;
}

int sample_action(std::span<const double> probs, Rng& rng) {
  return rng.categorical(probs);
}

EpisodeRecord run_episode(const PolicyNetwork& net, Evaluator& ev,
                          const RfPulse& baseline, Rng& rng,
                          const EpisodeOptions& opts) {
  const int n_root = net.n_actions();
  const double norm = opts.normalize_state ? peak_nutation(baseline) : 1.0;
  if (!(norm > 0.0)) throw ZeroPulse();

  EpisodeRecord ep;
  std::vector<std::uint8_t> mask(n_root, 0);
  RootPattern pattern(n_root, 0);
  std::vector<double> state = amplitude_state(baseline, norm);
  for (int t = 0; t < n_root; ++t) {
    auto tr = forward_trace(net, state, mask);
    const int a = sample_action(tr.probs, rng);
    ep.states.push_back(state);
    ep.actions.push_back(a);
    ep.log_probs.push_back(std::log(tr.probs[a]));
    mask[a] = 1;
    pattern[a] = 1;
    auto res = ev.evaluate_full(pattern);
    ep.peaks.push_back(res.peak);
    ep.patterns.push_back(pattern);
    state = amplitude_state(res.pulse, norm);
  }
  ep.reward = 1.0 / *std::min_element(ep.peaks.begin(), ep.peaks.end());
  return ep;
}

double episode_loss(const PolicyNetwork& net, const EpisodeRecord& episode) {
  const int n_root = net.n_actions();
  std::vector<std::uint8_t> mask(n_root, 0);
  double sum_log = 0.0;
  for (std::size_t t = 0; t < episode.actions.size(); ++t) {
    auto tr = forward_trace(net, episode.states[t], mask);
    sum_log += std::log(tr.probs[episode.actions[t]]);
    mask[episode.actions[t]] = 1;
  }
  return -episode.reward * sum_log;
}

std::vector<double> policy_gradient(const PolicyNetwork& net,
                                    const EpisodeRecord& episode) {
  const int layers = net.n_layers();
  std::vector<std::vector<double>> gw(layers), gb(layers);
  for (int l = 0; l < layers; ++l) {
    gw[l].assign(net.weights[l].size(), 0.0);
    gb[l].assign(net.biases[l].size(), 0.0);
  }

  const int n_root = net.n_actions();
  std::vector<std::uint8_t> mask(n_root, 0);
  for (std::size_t t = 0; t < episode.actions.size(); ++t) {
    auto tr = forward_trace(net, episode.states[t], mask);
    const int a = episode.actions[t];

    // d(-R log pi)/dlogit = R (p - onehot); masked entries contribute 0
    std::vector<double> delta(n_root, 0.0);
    for (int i = 0; i < n_root; ++i)
      if (!mask[i]) delta[i] = episode.reward * tr.probs[i];
    delta[a] -= episode.reward;

    for (int l = layers - 1; l >= 0; --l) {
      const int nin = net.layer_sizes[l];
      const int nout = net.layer_sizes[l + 1];
      const auto& x = tr.post[l];
      for (int i = 0; i < nout; ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        double* grow = gw[l].data() + std::size_t(i) * nin;
        for (int j = 0; j < nin; ++j) grow[j] += d * x[j];
        gb[l][i] += d;
      }
      if (l == 0) break;
      std::vector<double> prev(nin, 0.0);
      for (int i = 0; i < nout; ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        const double* row = net.weights[l].data() + std::size_t(i) * nin;
        for (int j = 0; j < nin; ++j) prev[j] += d * row[j];
      }
      const auto& z = tr.pre[l - 1];
      for (int j = 0; j < nin; ++j)
        if (z[j] <= 0.0) prev[j] *= net.leaky_slope;
      delta = std::move(prev);
    }
    mask[a] = 1;
  }

  std::vector<double> out;
  out.reserve(std::size_t(net.n_params()));
  for (int l = 0; l < layers; ++l) {
    out.insert(out.end(), gw[l].begin(), gw[l].end());
    out.insert(out.end(), gb[l].begin(), gb[l].end());
  }
  return out;
}

void reinforce_update(PolicyNetwork& net, const EpisodeRecord& episode,
                      double advantage) {
  auto grads = policy_gradient(net, episode);
  if (!std::isnan(advantage) && advantage != episode.reward) {
    if (episode.reward != 0.0) {
      // the gradient is linear in the reward weight
      const double scale = advantage / episode.reward;
      for (double& g : grads) g *= scale;
    } else {
      EpisodeRecord reweighted = episode;
      reweighted.reward = advantage;
      grads = policy_gradient(net, reweighted);
    }
  }
  ++net.adam_steps;
  std::size_t pos = 0;
  for (int l = 0; l < net.n_layers(); ++l) {
    adam_step(net.weights[l],
              std::span<const double>(grads).subspan(pos, net.weights[l].size()),
              net.m_w[l], net.v_w[l], net.adam_steps, net.adam);
    pos += net.weights[l].size();
    adam_step(net.biases[l],
              std::span<const double>(grads).subspan(pos, net.biases[l].size()),
              net.m_b[l], net.v_b[l], net.adam_steps, net.adam);
    pos += net.biases[l].size();
  }
  for (int l = 0; l < net.n_layers(); ++l) {
    for (double w : net.weights[l])
      if (!std::isfinite(w)) throw NonFinite("policy weight diverged");
    for (double b : net.biases[l])
      if (!std::isfinite(b)) throw NonFinite("policy bias diverged");
  }
}

SearchOutcome deeprf_slr_loop(const ProblemContext& ctx,
                              std::int64_t flip_budget, std::uint64_t seed,
                              const DeepRfOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n_root = ctx.root_set.n_root();
  if (flip_budget < n_root) throw Error("budget below one episode");

  Evaluator ev(ctx, -1, opts.memoize);
  Rng rng(seed);
  PolicyNetwork net;
  RfPulse baseline;
  std::int64_t iteration = 0;
  double reward_baseline = std::numeric_limits<double>::quiet_NaN();
  RootPattern polished;

  if (opts.resume) {
    net = opts.resume->net;
    rng.set_state(opts.resume->rng_state);
    ev.restore(opts.resume->progress);
    ev.restore_cache(opts.resume->cache);
    baseline = opts.resume->baseline;
    iteration = opts.resume->iteration;
    reward_baseline = opts.resume->reward_baseline;
    polished = opts.resume->polished;
  } else {
    net = PolicyNetwork::standard(ctx.spec.n_points, n_root, rng);
    net.adam.learning_rate = opts.learning_rate;
    baseline = ev.evaluate_full(RootPattern(n_root, 0)).pulse;
  }

  const bool endgame_on = opts.greedy_enabled && opts.memoize &&
                          opts.incumbent_polish_depth >= 2 &&
                          opts.endgame_frac > 0.0;
  const std::int64_t reserve =
      endgame_on ? std::int64_t(double(flip_budget) * opts.endgame_frac) : 0;

  while (ev.used() < flip_budget - reserve) {
    ++iteration;
    auto ep = run_episode(net, ev, baseline, rng, opts.episode);
    if (opts.baseline_subtraction) {
      if (std::isnan(reward_baseline)) reward_baseline = ep.reward;
      reinforce_update(net, ep, ep.reward - reward_baseline);
      reward_baseline += opts.baseline_ema * (ep.reward - reward_baseline);
    } else {
      reinforce_update(net, ep);
    }
    if (opts.greedy_enabled && ev.used() < flip_budget) {
      const auto tmin =
          std::min_element(ep.peaks.begin(), ep.peaks.end()) -
          ep.peaks.begin();
      greedy_tree_search(ep.patterns[tmin], ev, ep.peaks[tmin],
                         opts.greedy_flip_depth);
    }
    if (opts.greedy_enabled && opts.incumbent_polish_depth >= 2 &&
        ev.used() < flip_budget) {
      // deep-polish each new overall best once; repeated polishes of the
      // same incumbent are cache hits under memoization
      auto best = ev.outcome();
      while (!best.best_pattern.empty() && best.best_pattern != polished &&
             ev.used() < flip_budget) {
        polished = best.best_pattern;
        greedy_tree_search(best.best_pattern, ev, best.best_peak,
                           opts.incumbent_polish_depth);
        best = ev.outcome();
      }
    }
    if (opts.checkpoint_after_iteration == iteration &&
        !opts.checkpoint_path.empty()) {
      LoopCheckpoint ckpt;
      ckpt.net = net;
      ckpt.rng_state = rng.state();
      ckpt.progress = ev.outcome();
      ckpt.iteration = iteration;
      ckpt.baseline = baseline;
      ckpt.reward_baseline = reward_baseline;
      ckpt.polished = polished;
      if (opts.memoize) ckpt.cache = ev.cache();
      save_checkpoint(opts.checkpoint_path, ckpt);
    }
  }

  if (endgame_on) {
    // pair-polish the best distinct patterns seen so far, best first; the
    // cache holds every greedy-layer evaluation, so near-incumbent local
    // optima (and their recorded neighbors) are all candidates
    std::vector<std::pair<double, RootPattern>> cands;
    for (const auto& [pat, peak] : ev.cache()) cands.emplace_back(peak, pat);
    std::sort(cands.begin(), cands.end());
    for (const auto& [peak, pat] : cands) {
      auto best = ev.outcome();
      if (ev.used() >= flip_budget ||
          peak > best.best_peak * opts.polish_margin)
        break;
      greedy_tree_search(pat, ev, peak, opts.incumbent_polish_depth);
      // chase any new incumbent immediately
      best = ev.outcome();
      while (!best.best_pattern.empty() && best.best_pattern != polished &&
             ev.used() < flip_budget) {
        polished = best.best_pattern;
        greedy_tree_search(best.best_pattern, ev, best.best_peak,
                           opts.incumbent_polish_depth);
        best = ev.outcome();
      }
    }
  }

  auto out = ev.outcome();
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace deeprf
