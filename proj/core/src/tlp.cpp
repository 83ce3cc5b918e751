#include "otsim/tlp.hpp"

#include <algorithm>
#include <cmath>

#include "otsim/errors.hpp"
#include "otsim/hash.hpp"

namespace otsim::tlp {

namespace {

constexpr std::uint8_t kMagic[4] = {'O', 'T', 'L', 'P'};
constexpr std::uint8_t kVersion = 1;

int lambda_byte_width(int lambda_bits) {
  if (lambda_bits < 1 || lambda_bits > kMaxLambdaBits)
    throw ValidationError("lambda_bits must be in [1, 64]");
  return (lambda_bits + 7) / 8;
}

// Runs the chain h_{i+1} = SHA-256(h_i) for tau steps and reports the count.
Digest run_chain(const Bytes& seed, std::uint64_t tau, std::uint64_t& counter) {
  Digest h{};
  std::copy(seed.begin(), seed.end(), h.begin());
  for (std::uint64_t i = 0; i < tau; ++i) {
    h = sha256(std::span<const std::uint8_t>(h.data(), h.size()));
    ++counter;
  }
  return h;
}

// Counter-mode pad: block i = SHA-256(h_tau || i as 4-byte BE), truncated.
Bytes derive_pad(const Digest& h_tau, std::size_t n) {
  Bytes pad;
  pad.reserve(n);
  for (std::uint32_t i = 0; pad.size() < n; ++i) {
    Bytes block_input(h_tau.begin(), h_tau.end());
    put_u32be(block_input, i);
    Digest block = sha256(std::span<const std::uint8_t>(block_input));
    const std::size_t take = std::min(block.size(), n - pad.size());
    pad.insert(pad.end(), block.begin(), block.begin() + take);
  }
  return pad;
}

Bytes xor_bytes(const Bytes& a, const Bytes& b) {
  Bytes out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

Bytes random_seed(Rng& rng) {
  Bytes seed(kSeedBytes);
  rng.fill(seed.data(), seed.size());
  return seed;
}

}  // namespace

void Puzzle::validate() const {
  if (tau_steps < 1) throw ValidationError("tau_steps must be >= 1");
  if (seed.size() != kSeedBytes)
    throw ValidationError("puzzle seed must be 32 bytes");
  if (ciphertext.empty()) throw ValidationError("empty ciphertext");
}

Bytes encode_solution(const PuzzleSolution& s, int lambda_bits) {
  const int r_width = lambda_byte_width(lambda_bits);
  if (s.k >= s.l) throw ValidationError("solution requires k < l");
  if (lambda_bits < 64 && (s.r >> lambda_bits) != 0)
    throw ValidationError("solution nonce exceeds lambda_bits");
  Bytes enc;
  enc.reserve(8 + r_width);
  put_u32be(enc, s.k);
  put_u32be(enc, s.l);
  for (int i = r_width - 1; i >= 0; --i)
    enc.push_back(static_cast<std::uint8_t>(s.r >> (8 * i)));
  return enc;
}

PuzzleSolution decode_solution(std::span<const std::uint8_t> enc) {
  if (enc.size() < 9 || enc.size() > 16)
    throw IntegrityError("solution encoding has invalid length");
  PuzzleSolution s;
  s.k = get_u32be(enc, 0);
  s.l = get_u32be(enc, 4);
  s.r = 0;
  for (std::size_t i = 8; i < enc.size(); ++i) s.r = (s.r << 8) | enc[i];
  if (s.k >= s.l) throw IntegrityError("decoded solution violates k < l");
  return s;
}

GenResult puzzle_gen_with_seed(std::uint64_t tau, const PuzzleSolution& s,
                               int lambda_bits, const Bytes& seed) {
  return puzzle_gen_bytes_with_seed(tau, encode_solution(s, lambda_bits), seed);
}

GenResult puzzle_gen(std::uint64_t tau, const PuzzleSolution& s,
                     int lambda_bits, Rng& rng) {
  return puzzle_gen_with_seed(tau, s, lambda_bits, random_seed(rng));
}

GenResult puzzle_gen_bytes_with_seed(std::uint64_t tau, const Bytes& payload,
                                     const Bytes& seed) {
  if (tau < 1) throw ValidationError("tau_steps must be >= 1");
  if (seed.size() != kSeedBytes)
    throw ValidationError("puzzle seed must be 32 bytes");
  if (payload.empty()) throw ValidationError("empty puzzle payload");
  GenResult out;
  const Digest h_tau = run_chain(seed, tau, out.chain_hashes);
  out.puzzle.tau_steps = tau;
  out.puzzle.seed = seed;
  out.puzzle.ciphertext = xor_bytes(payload, derive_pad(h_tau, payload.size()));
  return out;
}

GenResult puzzle_gen_bytes(std::uint64_t tau, const Bytes& payload, Rng& rng) {
  return puzzle_gen_bytes_with_seed(tau, payload, random_seed(rng));
}

SolveBytesResult puzzle_sol_bytes(const Puzzle& z) {
  z.validate();
  SolveBytesResult out;
  const Digest h_tau = run_chain(z.seed, z.tau_steps, out.chain_hashes);
  out.payload = xor_bytes(z.ciphertext, derive_pad(h_tau, z.ciphertext.size()));
  return out;
}

SolveResult puzzle_sol(const Puzzle& z) {
  SolveBytesResult raw = puzzle_sol_bytes(z);
  return {decode_solution(raw.payload), raw.chain_hashes};
}

Bytes serialize(const Puzzle& z) {
  z.validate();
  Bytes wire;
  wire.reserve(4 + 1 + 8 + kSeedBytes + 4 + z.ciphertext.size());
  wire.assign(std::begin(kMagic), std::end(kMagic));
  wire.push_back(kVersion);
  put_u64be(wire, z.tau_steps);
  wire.insert(wire.end(), z.seed.begin(), z.seed.end());
  put_u32be(wire, static_cast<std::uint32_t>(z.ciphertext.size()));
  wire.insert(wire.end(), z.ciphertext.begin(), z.ciphertext.end());
  return wire;
}

Puzzle deserialize_puzzle(std::span<const std::uint8_t> wire) {
  constexpr std::size_t kHeader = 4 + 1 + 8 + kSeedBytes + 4;
  if (wire.size() < kHeader) throw IntegrityError("puzzle wire data truncated");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), wire.begin()))
    throw IntegrityError("bad puzzle magic");
  if (wire[4] != kVersion) throw IntegrityError("unsupported puzzle version");
  Puzzle z;
  z.tau_steps = get_u64be(wire, 5);
  z.seed.assign(wire.begin() + 13, wire.begin() + 13 + kSeedBytes);
  const std::uint32_t ct_len = get_u32be(wire, 13 + kSeedBytes);
  if (wire.size() != kHeader + ct_len)
    throw IntegrityError("puzzle ciphertext length mismatch");
  z.ciphertext.assign(wire.begin() + kHeader, wire.end());
  z.validate();
  return z;
}

SmokeResult indistinguishability_smoke(const PuzzleSolution& s0,
                                       const PuzzleSolution& s1,
                                       std::uint64_t depth_budget,
                                       std::uint64_t tau, int lambda_bits,
                                       int trials, Rng& rng) {
  if (depth_budget > tau)
    throw ValidationError("depth_budget must not exceed tau");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  const Bytes enc0 = encode_solution(s0, lambda_bits);
  const Bytes enc1 = encode_solution(s1, lambda_bits);

  SmokeResult res;
  res.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const int b = rng.bit();
    GenResult gen = puzzle_gen_bytes(tau, b ? enc1 : enc0, rng);

    // Prefix-chain distinguisher: evaluate depth_budget steps, treat the
    // prefix end as the chain end, decrypt, and match against s0 / s1.
    std::uint64_t ignored = 0;
    const Digest h_guess = run_chain(gen.puzzle.seed, depth_budget, ignored);
    const Bytes candidate = xor_bytes(
        gen.puzzle.ciphertext, derive_pad(h_guess, gen.puzzle.ciphertext.size()));
    int guess;
    if (candidate == enc0) {
      guess = 0;
    } else if (candidate == enc1) {
      guess = 1;
    } else {
      guess = rng.bit();
    }
    if (guess == b) ++res.correct;
  }
  const double p = static_cast<double>(res.correct) / trials;
  res.advantage = p - 0.5;
  res.std_error = std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials);
  return res;
}

}  // namespace otsim::tlp
