#pragma once

// Party state machines and a simulated timed channel for three oblivious
// transfer variants:
//   nqsm_2msg   — register now, index pair after a decoherence wait
//   bqsm_2msg   — same two messages with zero separation
//   oneshot_tlp — a single message carrying the register plus a time-lock
//                 puzzle that hides the index pair
// All traffic flows sender -> receiver; the transcript records every event
// with a tick stamp so shape invariants can be audited after the fact.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otsim/bytes.hpp"
#include "otsim/qsim.hpp"
#include "otsim/rng.hpp"
#include "otsim/spectra.hpp"
#include "otsim/tlp.hpp"

namespace otsim::protocol {

using spectra::IndexEncodingSet;
using spectra::SitePair;

enum class Variant { kNqsm2Msg, kBqsm2Msg, kOneshotTlp };

std::string_view variant_name(Variant v);
Variant variant_from_name(std::string_view name);  // throws ValidationError

struct ProtocolParams {
  int n = 4;             // register size (sites)
  int sigma = 2;         // statistical parameter
  long tau_ticks = 8;    // wait / decoherence time in ticks
  Variant variant = Variant::kNqsm2Msg;
  int lambda_bits = 16;  // puzzle nonce width (oneshot only)
  std::uint64_t hashes_per_tick = 64;  // puzzle steps advanced per tick
  bool exact_mode = false;             // density-matrix register tracking

  std::uint64_t tlp_tau_steps() const;  // tau_ticks * hashes_per_tick
  void validate() const;
};

// Register size a cryptographic deployment would use for a statistical
// parameter sigma (2^sigma cells).  Documentation-level calculator;
// simulations run at small n.
std::uint64_t honest_register_size(int sigma);

struct SenderInputs {
  int x0 = 0;
  int x1 = 0;
};

// Measurement basis the receiver uses for choice bit y.
qsim::Basis basis_for_choice(int y);

// ---- messages ----

struct RegisterMessage {
  qsim::QuantumRegister register_state;
  long send_tick = 0;
  Bytes payload_bytes() const;
};

struct IndexMessage {
  std::uint32_t k = 0;  // 1-based, k < l
  std::uint32_t l = 0;
  long send_tick = 0;
  Bytes payload_bytes() const;
};

struct OneShotMessage {
  qsim::QuantumRegister register_state;
  tlp::Puzzle puzzle;
  long send_tick = 0;
  Bytes payload_bytes() const;
};

// ---- transcript ----

enum class Party { kSender, kReceiver };
enum class EventType { kSend, kRecv, kMeasure, kWait, kDecohere, kSolve, kOutput };

std::string_view party_name(Party p);       // "S" / "R"
std::string_view event_type_name(EventType t);

struct TranscriptEvent {
  long tick = 0;
  Party party = Party::kSender;
  EventType type = EventType::kSend;
  std::string detail;  // small key=value text
  std::string digest;  // payload digest for messages, "-" otherwise
};

struct ProtocolTranscript {
  Variant variant = Variant::kNqsm2Msg;
  std::vector<TranscriptEvent> events;

  void add(long tick, Party party, EventType type, std::string detail,
           std::string digest = "-");
  int count(Party party, EventType type) const;
  std::string to_log() const;  // one tab-separated line per event
};

// Shape audits over a finished transcript.
int sender_message_count(const ProtocolTranscript& tr);
int receiver_message_count(const ProtocolTranscript& tr);
bool non_interactive(const ProtocolTranscript& tr);
// True when every receiver measurement happens at the register arrival tick,
// i.e. the honest receiver kept no quantum state across ticks.
bool honest_memory_free(const ProtocolTranscript& tr);
// Throws ProtocolError when the transcript violates its variant's invariants.
void validate_shape(const ProtocolTranscript& tr, const ProtocolParams& params);

// ---- sender ----

// Everything the sender knows after its part is done.  Used to check that the
// sender's view cannot depend on the receiver's choice bit.
struct SenderView {
  Bytes classical_record;  // x0, x1, k, l, nonce in fixed-width encoding
  Bytes sent_register_bytes;
  std::optional<qsim::DensityMatrix> sent_state;  // exact mode only
};

struct SenderPackage {
  std::optional<RegisterMessage> register_msg;
  std::optional<IndexMessage> index_msg;
  std::optional<OneShotMessage> oneshot_msg;
  SitePair pair{0, 0};
  std::uint64_t nonce = 0;
  SenderView view;
};

SitePair draw_pair(int n_sites, Rng& rng);

SenderPackage sender_run(const ProtocolParams& params, SenderInputs inputs,
                         Rng& rng);
// Deterministic-pair variant used by exhaustive tests and attack harnesses.
SenderPackage sender_run_with_pair(const ProtocolParams& params,
                                   SenderInputs inputs, SitePair pair,
                                   std::uint64_t nonce, Rng& rng);

// ---- receiver ----

class Receiver {
 public:
  Receiver(const ProtocolParams& params, int y);

  int choice() const { return y_; }
  qsim::Basis basis() const { return basis_for_choice(y_); }

  // Measures every site at the arrival tick and stores classical bits only.
  void on_register(const RegisterMessage& msg, Rng& rng, ProtocolTranscript& tr);
  // Learns the pair and emits the output; malformed indices abort.
  int on_indices(const IndexMessage& msg, ProtocolTranscript& tr);
  // Single-message path: measure immediately, then solve the puzzle.
  int on_oneshot(const OneShotMessage& msg, Rng& rng, ProtocolTranscript& tr);

  const std::vector<int>& measured_bits() const { return bits_; }
  std::optional<int> output() const { return output_; }

 private:
  void measure_all(qsim::QuantumRegister reg, long tick, Rng& rng,
                   ProtocolTranscript& tr);
  int finish(std::uint32_t k, std::uint32_t l, long tick, ProtocolTranscript& tr);

  ProtocolParams params_;
  int y_;
  std::vector<int> bits_;
  std::optional<int> output_;
};

// ---- end-to-end engine ----

struct RunResult {
  int output = 0;
  ProtocolTranscript transcript;
  SenderView sender_view;
  SitePair pair{0, 0};
  std::vector<int> receiver_bits;
};

RunResult run_protocol(const ProtocolParams& params, int x0, int x1, int y,
                       std::uint64_t seed);
RunResult run_protocol_with_pair(const ProtocolParams& params, int x0, int x1,
                                 int y, SitePair pair, std::uint64_t seed);

}  // namespace otsim::protocol
