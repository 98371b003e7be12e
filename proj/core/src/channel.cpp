#include "cab/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "cab/combinatorics.hpp"
#include "cab/model.hpp"
#include "cab/rng.hpp"

namespace cab::channel {

namespace {

constexpr double kSupportThreshold = 0.5;

enum Stream : std::uint64_t { kCode = 1, kError = 2, kPayload = 3 };

}  // namespace

unsigned symbol_capacity(std::size_t n, std::size_t k1) {
  if (k1 < 1 || k1 > n) throw std::invalid_argument("symbol_capacity: need 1 <= k1 <= n");
  const unsigned bits = subset_capacity_bits(n, k1);
  if (bits == 0) throw std::invalid_argument("symbol_capacity: C(n, k1) < 2 carries no information");
  return std::min(bits, 63u);
}

ChannelRun channel_roundtrip(const std::string& payload_bits, const ChannelParams& cp, std::uint64_t seed,
                             const solver::SolveOptions& opts) {
  for (char ch : payload_bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("channel_roundtrip: payload must be a bit string");
  }
  model::ModelParams params;
  params.m = cp.m;
  params.n = cp.n;
  params.nu = cp.nu;
  params.k1 = cp.k1;
  params.rho = cp.rho;
  params.seed = seed;
  params.validate();

  ChannelRun run;
  run.payload_bits = payload_bits;
  run.k1 = cp.k1;
  run.rho = cp.rho;
  run.bits_per_symbol = symbol_capacity(cp.n, cp.k1);
  const std::size_t width = run.bits_per_symbol;
  run.symbols = (payload_bits.size() + width - 1) / width;

  const DenseVector mu = model::make_mean(cp.m, 1.0);
  const DenseMatrix a = model::sample_bouquet(mu, cp.nu, cp.n, derive_seed(seed, kCode));
  const std::size_t k2 = params.k2();

  run.decoded_bits.reserve(run.symbols * width);
  for (std::size_t s = 0; s < run.symbols; ++s) {
    std::uint64_t value = 0;
    for (std::size_t b = 0; b < width; ++b) {
      const std::size_t pos = s * width + b;
      value = (value << 1) | (pos < payload_bits.size() && payload_bits[pos] == '1' ? 1u : 0u);
    }

    model::SupportPattern pattern;
    pattern.signal_support = colex_unrank(value, cp.n, cp.k1);
    CounterRng rng(derive_seed(seed, kError, s));
    pattern.error_support = rng.subset(cp.m, k2);
    for (std::size_t t = 0; t < k2; ++t) pattern.error_signs.push_back(rng.sign() > 0 ? 1 : -1);
    const model::ProblemInstance inst = model::realize(params, mu, a, pattern);

    const solver::RecoverySolution sol = solver::solve_extended_l1(inst.a, inst.y, opts);
    run.symbol_success.push_back(solver::judge_success(sol, inst, opts.success_threshold));

    std::vector<std::size_t> support;
    for (Eigen::Index i = 0; i < sol.x_hat.size(); ++i) {
      if (sol.x_hat(i) > kSupportThreshold) support.push_back(static_cast<std::size_t>(i));
    }
    std::uint64_t decoded = 0;
    bool ok = support.size() == cp.k1;
    if (ok) {
      decoded = colex_rank(support);
      ok = decoded < (std::uint64_t{1} << width);
    }
    run.symbol_decoded.push_back(ok);
    if (!ok) decoded = 0;
    for (std::size_t b = width; b-- > 0;) run.decoded_bits.push_back(((decoded >> b) & 1u) ? '1' : '0');
  }
  run.decoded_bits.resize(payload_bits.size());
  bool all_ok = true;
  for (bool ok : run.symbol_decoded) all_ok = all_ok && ok;
  run.exact = all_ok && run.decoded_bits == payload_bits;
  return run;
}

std::string bits_from_text(const std::string& text) {
  std::string bits;
  bits.reserve(text.size() * 8);
  for (unsigned char c : text) {
    for (int b = 7; b >= 0; --b) bits.push_back(((c >> b) & 1u) ? '1' : '0');
  }
  return bits;
}

std::string random_bits(std::size_t length, std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, kPayload));
  std::string bits(length, '0');
  for (auto& b : bits) b = (rng.next_u64() >> 63) ? '1' : '0';
  return bits;
}

}  // namespace cab::channel
