#pragma once

// Weak time-lock puzzle from an iterated hash chain.  Generation and solving
// both cost tau sequential SHA-256 calls; there is no shortcut path, and the
// call counters are exposed so tests can audit that claim.  Sequentiality
// against parallel adversaries is an assumption, not something we can prove.

#include <cstdint>
#include <span>

#include "otsim/bytes.hpp"
#include "otsim/rng.hpp"

namespace otsim::tlp {

// Hardness is expressed directly in hash invocations ("steps"); callers that
// speak in ticks multiply by their own hashes-per-tick rate.
struct Puzzle {
  std::uint64_t tau_steps = 0;
  Bytes seed;        // 32 bytes, start of the hash chain
  Bytes ciphertext;  // payload XOR pad derived from the chain end

  void validate() const;
};

struct PuzzleSolution {
  std::uint32_t k = 0;
  std::uint32_t l = 0;  // requires k < l
  std::uint64_t r = 0;  // nonce in [0, 2^lambda_bits)
};

inline constexpr int kSeedBytes = 32;
inline constexpr int kMaxLambdaBits = 64;

// Fixed-width solution encoding: k and l as 4-byte big-endian, r as
// ceil(lambda/8) big-endian bytes.  Width depends only on lambda_bits, so the
// ciphertext length leaks nothing about the solution.
Bytes encode_solution(const PuzzleSolution& s, int lambda_bits);
PuzzleSolution decode_solution(std::span<const std::uint8_t> enc);

struct GenResult {
  Puzzle puzzle;
  std::uint64_t chain_hashes = 0;  // sequential chain invocations only
};

struct SolveResult {
  PuzzleSolution solution;
  std::uint64_t chain_hashes = 0;
};

struct SolveBytesResult {
  Bytes payload;
  std::uint64_t chain_hashes = 0;
};

// Deterministic variant: the chain seed is supplied by the caller.
GenResult puzzle_gen_with_seed(std::uint64_t tau, const PuzzleSolution& s,
                               int lambda_bits, const Bytes& seed);
GenResult puzzle_gen(std::uint64_t tau, const PuzzleSolution& s,
                     int lambda_bits, Rng& rng);
SolveResult puzzle_sol(const Puzzle& z);

// Raw-payload mode: one puzzle can hide an arbitrary byte string (e.g. many
// index pairs at once), amortizing a single chain over parallel transfers.
GenResult puzzle_gen_bytes_with_seed(std::uint64_t tau, const Bytes& payload,
                                     const Bytes& seed);
GenResult puzzle_gen_bytes(std::uint64_t tau, const Bytes& payload, Rng& rng);
SolveBytesResult puzzle_sol_bytes(const Puzzle& z);

// Wire format: magic, version, tau (8-byte BE), seed, ciphertext length
// (4-byte BE), ciphertext.
Bytes serialize(const Puzzle& z);
Puzzle deserialize_puzzle(std::span<const std::uint8_t> wire);

// Budget-limited distinguishing experiment.  Each trial hides s0 or s1 in a
// fresh puzzle; the adversary evaluates at most depth_budget chain steps,
// pretends the prefix end is the chain end, and guesses.  advantage is the
// empirical correct-guess rate minus 1/2.
struct SmokeResult {
  int trials = 0;
  int correct = 0;
  double advantage = 0.0;
  double std_error = 0.0;
};

SmokeResult indistinguishability_smoke(const PuzzleSolution& s0,
                                       const PuzzleSolution& s1,
                                       std::uint64_t depth_budget,
                                       std::uint64_t tau, int lambda_bits,
                                       int trials, Rng& rng);

}  // namespace otsim::tlp
