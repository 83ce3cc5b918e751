#pragma once

// One-message two-party computation: bundle a garbled circuit, the garbler's
// active input labels, per-evaluator-bit oblivious-transfer payloads and the
// output map into a single garbler -> evaluator message.  The evaluator's
// input enters through lambda_gc parallel bit OTs per wire (one shared choice
// bit), so label transfer needs no reply traffic.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otsim/bytes.hpp"
#include "otsim/gc.hpp"
#include "otsim/protocol.hpp"
#include "otsim/rng.hpp"
#include "otsim/tlp.hpp"

namespace otsim::compile2pc {

enum class BackendKind { kIdeal, kQuantumSim };

// Pluggable 1-shot OT backend.  kIdeal moves the two candidate bits in the
// clear (structural plumbing for shape audits); kQuantumSim instantiates each
// bit OT with a prepared register and hides all index pairs in one shared
// time-lock puzzle.
struct OtBackend {
  BackendKind kind = BackendKind::kIdeal;
  protocol::ProtocolParams params;  // used by kQuantumSim; variant oneshot_tlp

  void validate() const;
};

struct OneShotMessage {
  BackendKind backend = BackendKind::kIdeal;
  Bytes circuit_text;      // Bristol description of f (public function)
  Bytes garbled_circuit;   // gc::GarbledCircuit::serialize
  std::vector<gc::Label> garbler_labels;  // active labels, garbler wires
  std::vector<Bytes> ot_payloads;  // evaluator_width * lambda_gc entries
  std::optional<tlp::Puzzle> shared_puzzle;  // kQuantumSim pair hiding
  Bytes output_map;        // gc::OutputMap::serialize

  Bytes serialize() const;
  static OneShotMessage deserialize(std::span<const std::uint8_t> wire);
};

// Directed message log for shape auditing.
struct MessageEvent {
  std::string from;
  std::string to;
  std::string label;
  std::size_t n_bytes = 0;
};

struct RunRecord {
  std::vector<MessageEvent> messages;
};

struct AuditVerdict {
  bool one_shot = false;
  int forward_count = 0;  // garbler -> evaluator
  int reverse_count = 0;  // evaluator -> garbler
  std::string detail;     // event dump when the audit fails
};

// Passes exactly when the record holds one forward message and nothing else.
AuditVerdict transcript_audit(const RunRecord& record);

struct CompileResult {
  OneShotMessage message;
  RunRecord record;          // the single send
  gc::GarbleResult secrets;  // garbler-side state, never transmitted
};

CompileResult garbler_compile(const gc::BooleanCircuit& circuit,
                              const std::vector<int>& garbler_input,
                              const OtBackend& backend, int lambda_gc,
                              Rng& rng);

struct ExecuteResult {
  std::vector<int> output_bits;
  std::vector<gc::Label> evaluator_labels;  // reassembled active labels
};

ExecuteResult evaluator_execute(const OneShotMessage& msg,
                                const std::vector<int>& evaluator_input,
                                const OtBackend& backend, std::uint64_t seed);

struct TwoPartyResult {
  std::vector<int> output_bits;
  RunRecord record;
  AuditVerdict audit;
};

// Compile, transfer (one message), execute, audit.
TwoPartyResult run_2pc(const gc::BooleanCircuit& circuit,
                       const std::vector<int>& garbler_input,
                       const std::vector<int>& evaluator_input,
                       const OtBackend& backend, int lambda_gc,
                       std::uint64_t seed);

// Negative control: classic interactive Yao with a 2-message OT exchange.
// Computes the same function but its transcript fails the one-shot audit.
TwoPartyResult run_interactive_baseline(const gc::BooleanCircuit& circuit,
                                        const std::vector<int>& garbler_input,
                                        const std::vector<int>& evaluator_input,
                                        int lambda_gc, std::uint64_t seed);

}  // namespace otsim::compile2pc
