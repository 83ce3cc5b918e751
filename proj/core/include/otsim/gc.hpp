#pragma once

// Semi-honest garbled circuits: Bristol-format parsing, plain evaluation,
// classic four-row point-and-permute garbling, evaluation and output
// decoding.  No free-XOR or half-gates — the simplest auditable scheme.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otsim/bytes.hpp"
#include "otsim/rng.hpp"

namespace otsim::gc {

enum class GateKind { kAnd, kXor, kInv };

struct Gate {
  GateKind kind = GateKind::kAnd;
  int in0 = -1;
  int in1 = -1;  // unused (-1) for INV
  int out = -1;
};

// Two-party boolean circuit: input wires are [0, garbler_width) for the
// garbler and [garbler_width, garbler_width + evaluator_width) for the
// evaluator; output wires are the last `output_width` wires.
struct BooleanCircuit {
  int n_wires = 0;
  int garbler_width = 0;
  int evaluator_width = 0;
  int output_width = 0;
  std::vector<Gate> gates;

  int input_width() const { return garbler_width + evaluator_width; }
  std::vector<int> output_wires() const;
  void validate() const;  // topological order, unique assignment, ranges
};

// Bristol-fashion text: "<gates> <wires>" / "<in1> <in2> <out>" header, then
// one gate per line ("2 1 a b out AND|XOR" or "1 1 a out INV").
BooleanCircuit parse_bristol(std::string_view text);
std::string to_bristol(const BooleanCircuit& c);

// Independent reference evaluation on plaintext bits (LSB-first blocks).
std::vector<int> plain_eval(const BooleanCircuit& c,
                            const std::vector<int>& inputs);

// ---- garbling ----

inline constexpr int kMinLambdaGc = 8;
inline constexpr int kMaxLambdaGc = 224;  // keeps row key in one hash output
inline constexpr int kPadBytes = 4;       // zero padding for row validity

using Label = Bytes;  // lambda_gc / 8 bytes

int permute_bit(const Label& label);  // least significant bit convention

struct LabelPair {
  Label l0;  // label carrying plaintext 0
  Label l1;  // label carrying plaintext 1; complementary permute bit
};

struct GarbledGate {
  std::vector<Bytes> rows;  // 4 ciphertexts for AND/XOR, none for INV
};

struct GarbledCircuit {
  int lambda_gc = 128;
  std::vector<GarbledGate> gates;

  Bytes serialize() const;
  static GarbledCircuit deserialize(std::span<const std::uint8_t> wire);
};

struct OutputMap {
  struct WireEntry {
    int wire = -1;
    std::array<Bytes, 2> digest;  // indexed by the label's permute bit
    std::array<int, 2> bit;       // plaintext carried by that label
  };
  std::vector<WireEntry> wires;  // circuit output order

  Bytes serialize() const;
  static OutputMap deserialize(std::span<const std::uint8_t> wire);
};

struct GarbleResult {
  GarbledCircuit gc;
  std::vector<LabelPair> wire_labels;  // every wire; the garbler's secret
  OutputMap output_map;
};

GarbleResult garble(const BooleanCircuit& c, int lambda_gc, Rng& rng);

struct EvaluationResult {
  std::vector<Label> wire_labels;    // active label per wire
  std::vector<Label> output_labels;  // circuit output order
};

// input_labels are active labels for wires [0, input_width).
EvaluationResult evaluate(const GarbledCircuit& gc, const BooleanCircuit& c,
                          const std::vector<Label>& input_labels);

// Decrypts one table row under the given input labels; empty when the zero
// padding does not verify.  Exposed so tests can audit wrong-row rejection.
std::optional<Label> decrypt_row(const GarbledGate& gate, int row,
                                 const Label& la, const Label& lb, int gate_id,
                                 int lambda_gc);

// Digest an active label carries into the output map.
Bytes output_digest(const Label& label, int wire);

std::vector<int> decode(const std::vector<Label>& output_labels,
                        const OutputMap& map);

}  // namespace otsim::gc
