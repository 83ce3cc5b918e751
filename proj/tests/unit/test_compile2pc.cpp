#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "otsim/compile2pc.hpp"
#include "otsim/errors.hpp"
#include "otsim/gc.hpp"
#include "otsim/rng.hpp"

using namespace otsim;
using namespace otsim::compile2pc;

namespace {

// wire 0 = garbler bit, wire 1 = evaluator bit.
const char* kAndText = "1 3\n1 1 1\n\n2 1 0 1 2 AND\n";
const char* kXorText = "1 3\n1 1 1\n\n2 1 0 1 2 XOR\n";
// single garbler input, no evaluator wires at all
const char* kDoubleInvText = "2 3\n1 0 1\n\n1 1 0 1 INV\n1 1 1 2 INV\n";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

gc::BooleanCircuit adder_circuit() {
  return gc::parse_bristol(read_file(std::string(OTSIM_CIRCUITS_DIR) + "/adder8.bristol"));
}

std::vector<int> int_to_bits(unsigned value, int width) {
  std::vector<int> bits;
  for (int i = 0; i < width; ++i) bits.push_back((value >> i) & 1);
  return bits;
}

unsigned bits_to_int(const std::vector<int>& bits) {
  unsigned v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    v |= static_cast<unsigned>(bits[i]) << i;
  return v;
}

OtBackend ideal_backend() { return OtBackend{}; }

OtBackend quantum_backend(int n = 4) {
  OtBackend b;
  b.kind = BackendKind::kQuantumSim;
  b.params.variant = protocol::Variant::kOneshotTlp;
  b.params.n = n;
  b.params.tau_ticks = 1;
  b.params.hashes_per_tick = 4;  // tiny puzzles keep unit runs fast
  return b;
}

}  // namespace

TEST_CASE("ideal backend computes AND on all four input combinations") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  for (int g = 0; g < 2; ++g)
    for (int e = 0; e < 2; ++e) {
      TwoPartyResult r = run_2pc(c, {g}, {e}, ideal_backend(), 128, 100 + 2 * g + e);
      REQUIRE(r.output_bits.size() == 1);
      CHECK(r.output_bits[0] == (g & e));
      CHECK(r.audit.one_shot);
    }
}

TEST_CASE("ideal backend computes XOR on all four input combinations") {
  const gc::BooleanCircuit c = gc::parse_bristol(kXorText);
  for (int g = 0; g < 2; ++g)
    for (int e = 0; e < 2; ++e) {
      TwoPartyResult r = run_2pc(c, {g}, {e}, ideal_backend(), 64, 7);
      CHECK(r.output_bits == std::vector<int>{g ^ e});
    }
}

TEST_CASE("circuit without evaluator wires ships zero transfer payloads") {
  const gc::BooleanCircuit c = gc::parse_bristol(kDoubleInvText);
  Rng rng(3);
  CompileResult compiled = garbler_compile(c, {1}, quantum_backend(), 8, rng);
  CHECK(compiled.message.ot_payloads.empty());
  CHECK(!compiled.message.shared_puzzle.has_value());

  ExecuteResult exec = evaluator_execute(compiled.message, {}, quantum_backend(), 4);
  CHECK(exec.output_bits == std::vector<int>{1});  // INV(INV(1))
  CHECK(exec.evaluator_labels.empty());
}

TEST_CASE("transfer payload count is evaluator width times label bits") {
  Rng rng(11);
  const gc::BooleanCircuit and_c = gc::parse_bristol(kAndText);
  CHECK(garbler_compile(and_c, {0}, ideal_backend(), 128, rng).message.ot_payloads.size() ==
        128);

  const gc::BooleanCircuit adder = adder_circuit();
  CompileResult compiled = garbler_compile(adder, int_to_bits(5, 8), ideal_backend(), 128, rng);
  CHECK(compiled.message.ot_payloads.size() == 8 * 128);
  for (const auto& p : compiled.message.ot_payloads) CHECK(p.size() == 2);
}

TEST_CASE("ideal backend adds 23 and 45 through the 8-bit adder") {
  TwoPartyResult r = run_2pc(adder_circuit(), int_to_bits(23, 8), int_to_bits(45, 8),
                             ideal_backend(), 128, 42);
  CHECK(bits_to_int(r.output_bits) == 68);
  CHECK(r.audit.one_shot);
  REQUIRE(r.record.messages.size() == 1);
  CHECK(r.record.messages[0].from == "garbler");
  CHECK(r.record.messages[0].n_bytes > 0);
}

TEST_CASE("ideal backend matches plain evaluation on random adder inputs") {
  Rng rng(8080);
  const gc::BooleanCircuit adder = adder_circuit();
  for (int trial = 0; trial < 25; ++trial) {
    const unsigned a = static_cast<unsigned>(rng.index(256));
    const unsigned b = static_cast<unsigned>(rng.index(256));
    std::vector<int> all = int_to_bits(a, 8);
    std::vector<int> eb = int_to_bits(b, 8);
    all.insert(all.end(), eb.begin(), eb.end());
    TwoPartyResult r = run_2pc(adder, int_to_bits(a, 8), int_to_bits(b, 8), ideal_backend(),
                               128, 1000 + trial);
    CHECK(r.output_bits == gc::plain_eval(adder, all));
  }
}

TEST_CASE("reassembled evaluator labels are the chosen labels, bit for bit") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  for (const OtBackend& backend : {ideal_backend(), quantum_backend()}) {
    const int lambda_gc = backend.kind == BackendKind::kIdeal ? 128 : 8;
    for (int y = 0; y < 2; ++y) {
      Rng rng(500 + y);
      CompileResult compiled = garbler_compile(c, {1}, backend, lambda_gc, rng);
      ExecuteResult exec = evaluator_execute(compiled.message, {y}, backend, 900 + y);
      REQUIRE(exec.evaluator_labels.size() == 1);
      const auto& pair = compiled.secrets.wire_labels[1];  // evaluator wire
      const gc::Label& chosen = y ? pair.l1 : pair.l0;
      const gc::Label& other = y ? pair.l0 : pair.l1;
      CHECK(exec.evaluator_labels[0] == chosen);
      CHECK(exec.evaluator_labels[0] != other);
    }
  }
}

TEST_CASE("quantum backend computes AND exhaustively at four sites") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  for (int g = 0; g < 2; ++g)
    for (int e = 0; e < 2; ++e) {
      TwoPartyResult r = run_2pc(c, {g}, {e}, quantum_backend(), 8, 60 + 2 * g + e);
      CHECK(r.output_bits == std::vector<int>{g & e});
      CHECK(r.audit.one_shot);
    }
}

TEST_CASE("quantum backend reproduces adder sums across seeds") {
  const gc::BooleanCircuit adder = adder_circuit();
  const OtBackend backend = quantum_backend();
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Rng pick(seed * 77);
    const unsigned a = static_cast<unsigned>(pick.index(256));
    const unsigned b = static_cast<unsigned>(pick.index(256));
    TwoPartyResult r = run_2pc(adder, int_to_bits(a, 8), int_to_bits(b, 8), backend, 8, seed);
    CHECK(bits_to_int(r.output_bits) == ((a + b) & 0xFF));
  }
}

TEST_CASE("quantum message carries registers and one shared puzzle") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  Rng rng(21);
  CompileResult compiled = garbler_compile(c, {0}, quantum_backend(), 8, rng);
  CHECK(compiled.message.ot_payloads.size() == 8);
  for (const auto& p : compiled.message.ot_payloads) {
    REQUIRE(!p.empty());
    CHECK(p[0] == 'S');  // sampled-state serialization
  }
  REQUIRE(compiled.message.shared_puzzle.has_value());
  // 8 bytes of site pair per transfer, sealed together.
  CHECK(compiled.message.shared_puzzle->ciphertext.size() == 8 * 8);
}

TEST_CASE("transcript audit accepts exactly one forward message") {
  RunRecord ok;
  ok.messages.push_back({"garbler", "evaluator", "m", 10});
  CHECK(transcript_audit(ok).one_shot);

  RunRecord empty;
  AuditVerdict v = transcript_audit(empty);
  CHECK(!v.one_shot);
  CHECK(v.forward_count == 0);

  RunRecord doubled = ok;
  doubled.messages.push_back({"garbler", "evaluator", "m2", 5});
  v = transcript_audit(doubled);
  CHECK(!v.one_shot);
  CHECK(v.forward_count == 2);
  CHECK(v.detail.find("m2") != std::string::npos);

  RunRecord reply = ok;
  reply.messages.push_back({"evaluator", "garbler", "ack", 1});
  v = transcript_audit(reply);
  CHECK(!v.one_shot);
  CHECK(v.reverse_count == 1);
}

TEST_CASE("interactive baseline computes correctly but fails the audit") {
  TwoPartyResult r = run_interactive_baseline(adder_circuit(), int_to_bits(200, 8),
                                              int_to_bits(100, 8), 128, 9);
  CHECK(bits_to_int(r.output_bits) == ((200 + 100) & 0xFF));
  CHECK(!r.audit.one_shot);
  CHECK(r.audit.forward_count == 2);
  CHECK(r.audit.reverse_count == 1);
  CHECK(r.record.messages.size() == 3);
}

TEST_CASE("message serialization round-trips byte-identically") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  for (const OtBackend& backend : {ideal_backend(), quantum_backend()}) {
    Rng rng(33);
    const int lambda_gc = backend.kind == BackendKind::kIdeal ? 16 : 8;
    CompileResult compiled = garbler_compile(c, {1}, backend, lambda_gc, rng);
    const Bytes wire = compiled.message.serialize();
    OneShotMessage back = OneShotMessage::deserialize(wire);
    CHECK(back.serialize() == wire);
    CHECK(back.backend == backend.kind);
    CHECK(back.circuit_text == compiled.message.circuit_text);
    CHECK(back.garbler_labels == compiled.message.garbler_labels);
    CHECK(back.ot_payloads == compiled.message.ot_payloads);
    CHECK(back.shared_puzzle.has_value() == compiled.message.shared_puzzle.has_value());
  }
}

TEST_CASE("malformed message bytes are rejected") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  Rng rng(44);
  const Bytes wire = garbler_compile(c, {0}, ideal_backend(), 16, rng).message.serialize();

  CHECK_THROWS_AS(OneShotMessage::deserialize(Bytes{}), IntegrityError);

  Bytes bad_magic = wire;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(OneShotMessage::deserialize(bad_magic), IntegrityError);

  Bytes bad_version = wire;
  bad_version[4] = 9;
  CHECK_THROWS_AS(OneShotMessage::deserialize(bad_version), IntegrityError);

  Bytes bad_backend = wire;
  bad_backend[5] = 7;
  CHECK_THROWS_AS(OneShotMessage::deserialize(bad_backend), IntegrityError);

  Bytes truncated(wire.begin(), wire.end() - 1);
  CHECK_THROWS_AS(OneShotMessage::deserialize(truncated), IntegrityError);

  Bytes padded = wire;
  padded.push_back(0);
  CHECK_THROWS_AS(OneShotMessage::deserialize(padded), IntegrityError);
}

TEST_CASE("tampering with the sealed site pairs is detected") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  Rng rng(55);
  CompileResult compiled = garbler_compile(c, {1}, quantum_backend(), 8, rng);
  // Flipping the top byte of the first pair's k pushes it out of site range.
  compiled.message.shared_puzzle->ciphertext[0] ^= 0xFF;
  CHECK_THROWS_AS(evaluator_execute(compiled.message, {0}, quantum_backend(), 5),
                  IntegrityError);
}

TEST_CASE("execution rejects inconsistent shapes and inputs") {
  const gc::BooleanCircuit c = gc::parse_bristol(kAndText);
  Rng rng(66);
  CompileResult compiled = garbler_compile(c, {1}, ideal_backend(), 16, rng);

  CHECK_THROWS_AS(evaluator_execute(compiled.message, {0, 1}, ideal_backend(), 1),
                  ValidationError);
  CHECK_THROWS_AS(evaluator_execute(compiled.message, {2}, ideal_backend(), 1),
                  ValidationError);
  CHECK_THROWS_AS(evaluator_execute(compiled.message, {0}, quantum_backend(), 1),
                  ValidationError);

  OneShotMessage short_msg = compiled.message;
  short_msg.ot_payloads.pop_back();
  CHECK_THROWS_AS(evaluator_execute(short_msg, {0}, ideal_backend(), 1), IntegrityError);

  OneShotMessage bad_payload = compiled.message;
  bad_payload.ot_payloads[0] = Bytes{9, 9};
  CHECK_THROWS_AS(evaluator_execute(bad_payload, {0}, ideal_backend(), 1), IntegrityError);

  CHECK_THROWS_AS(garbler_compile(c, {1, 0}, ideal_backend(), 16, rng), ValidationError);

  OtBackend wrong_variant;
  wrong_variant.kind = BackendKind::kQuantumSim;
  wrong_variant.params.variant = protocol::Variant::kNqsm2Msg;
  CHECK_THROWS_AS(garbler_compile(c, {1}, wrong_variant, 8, rng), ValidationError);
}

TEST_CASE("identical seeds give identical wires and outputs") {
  const gc::BooleanCircuit adder = adder_circuit();
  for (const OtBackend& backend : {ideal_backend(), quantum_backend()}) {
    const int lambda_gc = backend.kind == BackendKind::kIdeal ? 128 : 8;
    Rng a(321), b(321), other(97);
    const Bytes wire_a =
        garbler_compile(adder, int_to_bits(9, 8), backend, lambda_gc, a).message.serialize();
    const Bytes wire_b =
        garbler_compile(adder, int_to_bits(9, 8), backend, lambda_gc, b).message.serialize();
    CHECK(wire_a == wire_b);
    const Bytes wire_c = garbler_compile(adder, int_to_bits(9, 8), backend, lambda_gc, other)
                             .message.serialize();
    CHECK(wire_a != wire_c);
  }

  TwoPartyResult r1 = run_2pc(adder, int_to_bits(3, 8), int_to_bits(4, 8), quantum_backend(),
                               8, 77);
  TwoPartyResult r2 = run_2pc(adder, int_to_bits(3, 8), int_to_bits(4, 8), quantum_backend(),
                              8, 77);
  CHECK(r1.output_bits == r2.output_bits);
  CHECK(bits_to_int(r1.output_bits) == 7);
}
