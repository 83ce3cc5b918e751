#include "otsim/compile2pc.hpp"

#include <string>

#include "otsim/errors.hpp"
#include "otsim/qsim.hpp"

namespace otsim::compile2pc {

namespace {

constexpr char kMagic[4] = {'O', 'T', '2', 'P'};
constexpr std::uint8_t kVersion = 1;

std::uint8_t backend_byte(BackendKind k) {
  return k == BackendKind::kIdeal ? 0 : 1;
}

BackendKind backend_from_byte(std::uint8_t b) {
  if (b == 0) return BackendKind::kIdeal;
  if (b == 1) return BackendKind::kQuantumSim;
  throw IntegrityError("unknown backend byte");
}

// Label bits are numbered MSB-first: bit t lives in byte t/8 at position
// 7 - t%8, so bit 0 is the top bit of the first byte.
int label_bit(const gc::Label& label, int t) {
  return (label[static_cast<std::size_t>(t) / 8] >> (7 - t % 8)) & 1;
}

void set_label_bit(gc::Label& label, int t, int bit) {
  if (bit) label[static_cast<std::size_t>(t) / 8] |= std::uint8_t(1u << (7 - t % 8));
}

void check_bits(const std::vector<int>& bits, int expect, const char* who) {
  if (static_cast<int>(bits.size()) != expect)
    throw ValidationError(std::string(who) + " input must have " +
                          std::to_string(expect) + " bits, got " +
                          std::to_string(bits.size()));
  for (int b : bits)
    if (b != 0 && b != 1)
      throw ValidationError(std::string(who) + " input bits must be 0 or 1");
}

MessageEvent forward_event(std::string label, std::size_t n_bytes) {
  return {"garbler", "evaluator", std::move(label), n_bytes};
}

// ---- wire helpers (sections carry their own internal structure) ----

void put_section(Bytes& out, const Bytes& section) { put_u64be(out, section.size()); }

Bytes gc_section(const OneShotMessage& m) {
  Bytes s;
  put_u32be(s, static_cast<std::uint32_t>(m.circuit_text.size()));
  s.insert(s.end(), m.circuit_text.begin(), m.circuit_text.end());
  s.insert(s.end(), m.garbled_circuit.begin(), m.garbled_circuit.end());
  return s;
}

Bytes labels_section(const OneShotMessage& m) {
  Bytes s;
  put_u32be(s, static_cast<std::uint32_t>(m.garbler_labels.size()));
  const std::size_t width = m.garbler_labels.empty() ? 0 : m.garbler_labels.front().size();
  put_u32be(s, static_cast<std::uint32_t>(width));
  for (const auto& label : m.garbler_labels) {
    if (label.size() != width)
      throw ValidationError("garbler labels must share one width");
    s.insert(s.end(), label.begin(), label.end());
  }
  return s;
}

Bytes ot_section(const OneShotMessage& m) {
  Bytes s;
  put_u32be(s, static_cast<std::uint32_t>(m.ot_payloads.size()));
  for (const auto& p : m.ot_payloads) {
    put_u32be(s, static_cast<std::uint32_t>(p.size()));
    s.insert(s.end(), p.begin(), p.end());
  }
  s.push_back(m.shared_puzzle ? 1 : 0);
  if (m.shared_puzzle) {
    const Bytes z = tlp::serialize(*m.shared_puzzle);
    put_u32be(s, static_cast<std::uint32_t>(z.size()));
    s.insert(s.end(), z.begin(), z.end());
  }
  return s;
}

// Cursor-style reader over one section.
struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t at = 0;

  std::uint32_t u32() {
    const std::uint32_t v = get_u32be(data, at);
    at += 4;
    return v;
  }
  std::uint8_t byte() {
    if (at >= data.size()) throw IntegrityError("section truncated");
    return data[at++];
  }
  Bytes take(std::size_t n) {
    if (data.size() - at < n) throw IntegrityError("section truncated");
    Bytes out(data.begin() + at, data.begin() + at + n);
    at += n;
    return out;
  }
  void done() const {
    if (at != data.size()) throw IntegrityError("trailing bytes in section");
  }
};

}  // namespace

void OtBackend::validate() const {
  if (kind == BackendKind::kQuantumSim) {
    if (params.variant != protocol::Variant::kOneshotTlp)
      throw ValidationError("quantum backend requires the one-shot variant");
    params.validate();
  }
}

Bytes OneShotMessage::serialize() const {
  const Bytes sec_gc = gc_section(*this);
  const Bytes sec_labels = labels_section(*this);
  const Bytes sec_ot = ot_section(*this);

  Bytes out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(backend_byte(backend));
  put_section(out, sec_gc);
  put_section(out, sec_labels);
  put_section(out, sec_ot);
  put_section(out, output_map);
  out.insert(out.end(), sec_gc.begin(), sec_gc.end());
  out.insert(out.end(), sec_labels.begin(), sec_labels.end());
  out.insert(out.end(), sec_ot.begin(), sec_ot.end());
  out.insert(out.end(), output_map.begin(), output_map.end());
  return out;
}

OneShotMessage OneShotMessage::deserialize(std::span<const std::uint8_t> wire) {
  if (wire.size() < 6 + 4 * 8) throw IntegrityError("one-shot message too short");
  for (int i = 0; i < 4; ++i)
    if (wire[i] != static_cast<std::uint8_t>(kMagic[i]))
      throw IntegrityError("bad one-shot message magic");
  if (wire[4] != kVersion) throw IntegrityError("unsupported one-shot message version");

  OneShotMessage m;
  m.backend = backend_from_byte(wire[5]);

  std::size_t at = 6;
  std::uint64_t lens[4];
  for (auto& len : lens) {
    len = get_u64be(wire, at);
    at += 8;
  }
  std::uint64_t total = at;
  for (std::uint64_t len : lens) total += len;
  if (total != wire.size()) throw IntegrityError("one-shot message length mismatch");

  auto section = [&](std::uint64_t len) {
    auto s = wire.subspan(at, len);
    at += len;
    return s;
  };

  {
    Reader r{section(lens[0])};
    const std::uint32_t text_len = r.u32();
    m.circuit_text = r.take(text_len);
    m.garbled_circuit = r.take(r.data.size() - r.at);
    r.done();
  }
  {
    Reader r{section(lens[1])};
    const std::uint32_t count = r.u32();
    const std::uint32_t width = r.u32();
    m.garbler_labels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) m.garbler_labels.push_back(r.take(width));
    r.done();
  }
  {
    Reader r{section(lens[2])};
    const std::uint32_t count = r.u32();
    m.ot_payloads.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t plen = r.u32();
      m.ot_payloads.push_back(r.take(plen));
    }
    if (r.byte() != 0) {
      const std::uint32_t zlen = r.u32();
      m.shared_puzzle = tlp::deserialize_puzzle(r.take(zlen));
    }
    r.done();
  }
  m.output_map = Bytes(wire.begin() + at, wire.end());
  return m;
}

AuditVerdict transcript_audit(const RunRecord& record) {
  AuditVerdict v;
  for (const auto& e : record.messages) {
    if (e.from == "garbler" && e.to == "evaluator")
      ++v.forward_count;
    else if (e.from == "evaluator" && e.to == "garbler")
      ++v.reverse_count;
    else {
      v.detail = "unknown endpoint in message '" + e.label + "'";
      return v;
    }
  }
  v.one_shot = v.forward_count == 1 && v.reverse_count == 0;
  if (!v.one_shot) {
    v.detail = "expected 1 garbler->evaluator message, saw:";
    for (const auto& e : record.messages)
      v.detail += "\n  " + e.from + " -> " + e.to + "  " + e.label + "  (" +
                  std::to_string(e.n_bytes) + " bytes)";
    if (record.messages.empty()) v.detail += "\n  (none)";
  }
  return v;
}

CompileResult garbler_compile(const gc::BooleanCircuit& circuit,
                              const std::vector<int>& garbler_input,
                              const OtBackend& backend, int lambda_gc, Rng& rng) {
  circuit.validate();
  backend.validate();
  check_bits(garbler_input, circuit.garbler_width, "garbler");

  CompileResult out;
  out.secrets = gc::garble(circuit, lambda_gc, rng);

  OneShotMessage& msg = out.message;
  msg.backend = backend.kind;
  const std::string text = gc::to_bristol(circuit);
  msg.circuit_text.assign(text.begin(), text.end());
  msg.garbled_circuit = out.secrets.gc.serialize();
  msg.output_map = out.secrets.output_map.serialize();

  for (int i = 0; i < circuit.garbler_width; ++i) {
    const auto& pair = out.secrets.wire_labels[static_cast<std::size_t>(i)];
    msg.garbler_labels.push_back(garbler_input[static_cast<std::size_t>(i)] ? pair.l1
                                                                            : pair.l0);
  }

  // One bit OT per label bit of every evaluator wire.  The evaluator's choice
  // bit for wire j selects which label's bits all lambda_gc transfers reveal.
  Bytes hidden_pairs;  // quantum mode: k||l per OT, sealed in one puzzle
  for (int j = 0; j < circuit.evaluator_width; ++j) {
    const auto& pair =
        out.secrets.wire_labels[static_cast<std::size_t>(circuit.garbler_width + j)];
    for (int t = 0; t < lambda_gc; ++t) {
      const int b0 = label_bit(pair.l0, t);
      const int b1 = label_bit(pair.l1, t);
      if (backend.kind == BackendKind::kIdeal) {
        msg.ot_payloads.push_back(
            Bytes{static_cast<std::uint8_t>(b0), static_cast<std::uint8_t>(b1)});
      } else {
        const protocol::SitePair sites = protocol::draw_pair(backend.params.n, rng);
        qsim::QuantumRegister reg =
            qsim::prepare_register(backend.params.n, sites.k, sites.l, b0, b1, rng);
        msg.ot_payloads.push_back(reg.serialize());
        put_u32be(hidden_pairs, static_cast<std::uint32_t>(sites.k));
        put_u32be(hidden_pairs, static_cast<std::uint32_t>(sites.l));
      }
    }
  }
  if (backend.kind == BackendKind::kQuantumSim && !hidden_pairs.empty())
    msg.shared_puzzle =
        tlp::puzzle_gen_bytes(backend.params.tlp_tau_steps(), hidden_pairs, rng).puzzle;

  out.record.messages.push_back(forward_event("oneshot-2pc", msg.serialize().size()));
  return out;
}

ExecuteResult evaluator_execute(const OneShotMessage& msg,
                                const std::vector<int>& evaluator_input,
                                const OtBackend& backend, std::uint64_t seed) {
  if (msg.backend != backend.kind)
    throw ValidationError("message backend does not match the execution backend");
  backend.validate();

  const std::string text(msg.circuit_text.begin(), msg.circuit_text.end());
  const gc::BooleanCircuit circuit = gc::parse_bristol(text);
  check_bits(evaluator_input, circuit.evaluator_width, "evaluator");

  const gc::GarbledCircuit gcirc = gc::GarbledCircuit::deserialize(msg.garbled_circuit);
  const int lambda_gc = gcirc.lambda_gc;
  const std::size_t label_bytes = static_cast<std::size_t>(lambda_gc) / 8;

  if (static_cast<int>(msg.garbler_labels.size()) != circuit.garbler_width)
    throw IntegrityError("garbler label count does not match the circuit");
  for (const auto& label : msg.garbler_labels)
    if (label.size() != label_bytes) throw IntegrityError("garbler label width mismatch");

  const std::size_t n_ots =
      static_cast<std::size_t>(circuit.evaluator_width) * static_cast<std::size_t>(lambda_gc);
  if (msg.ot_payloads.size() != n_ots)
    throw IntegrityError("expected " + std::to_string(n_ots) + " transfer payloads, got " +
                         std::to_string(msg.ot_payloads.size()));

  // Quantum mode: open the shared puzzle to recover every transfer's site
  // pair, then measure each register in the basis the choice bit selects.
  Bytes hidden_pairs;
  if (backend.kind == BackendKind::kQuantumSim && n_ots > 0) {
    if (!msg.shared_puzzle) throw IntegrityError("quantum message lacks its puzzle");
    hidden_pairs = tlp::puzzle_sol_bytes(*msg.shared_puzzle).payload;
    if (hidden_pairs.size() != 8 * n_ots)
      throw IntegrityError("puzzle payload does not cover every transfer");
  }

  Rng rng(seed);
  ExecuteResult out;
  std::size_t ot = 0;
  for (int j = 0; j < circuit.evaluator_width; ++j) {
    const int y = evaluator_input[static_cast<std::size_t>(j)];
    gc::Label label(label_bytes, 0);
    for (int t = 0; t < lambda_gc; ++t, ++ot) {
      const Bytes& payload = msg.ot_payloads[ot];
      int bit;
      if (backend.kind == BackendKind::kIdeal) {
        if (payload.size() != 2 || payload[0] > 1 || payload[1] > 1)
          throw IntegrityError("malformed plaintext transfer payload");
        bit = payload[static_cast<std::size_t>(y)];
      } else {
        const int k = static_cast<int>(get_u32be(hidden_pairs, 8 * ot));
        const int l = static_cast<int>(get_u32be(hidden_pairs, 8 * ot + 4));
        qsim::QuantumRegister reg = qsim::QuantumRegister::deserialize(payload);
        if (k < 1 || k >= l || l > reg.n_sites())
          throw IntegrityError("site pair out of range in puzzle payload");
        const qsim::Basis basis = protocol::basis_for_choice(y);
        const int mk = qsim::measure_site(reg, k, basis, rng).outcome;
        const int ml = qsim::measure_site(reg, l, basis, rng).outcome;
        bit = mk ^ ml;
      }
      set_label_bit(label, t, bit);
    }
    out.evaluator_labels.push_back(std::move(label));
  }

  std::vector<gc::Label> input_labels = msg.garbler_labels;
  input_labels.insert(input_labels.end(), out.evaluator_labels.begin(),
                      out.evaluator_labels.end());
  const gc::EvaluationResult eval = gc::evaluate(gcirc, circuit, input_labels);
  out.output_bits = gc::decode(eval.output_labels, gc::OutputMap::deserialize(msg.output_map));
  return out;
}

TwoPartyResult run_2pc(const gc::BooleanCircuit& circuit,
                       const std::vector<int>& garbler_input,
                       const std::vector<int>& evaluator_input,
                       const OtBackend& backend, int lambda_gc, std::uint64_t seed) {
  Rng root(seed);
  Rng grng = root.fork("garbler");
  const std::uint64_t eval_seed = root.fork("evaluator").seed();

  CompileResult compiled = garbler_compile(circuit, garbler_input, backend, lambda_gc, grng);

  // Round-trip through bytes: the evaluator only ever sees the wire form.
  const Bytes wire = compiled.message.serialize();
  const OneShotMessage received = OneShotMessage::deserialize(wire);
  const ExecuteResult exec = evaluator_execute(received, evaluator_input, backend, eval_seed);

  TwoPartyResult out;
  out.output_bits = exec.output_bits;
  out.record = std::move(compiled.record);
  out.audit = transcript_audit(out.record);
  return out;
}

TwoPartyResult run_interactive_baseline(const gc::BooleanCircuit& circuit,
                                        const std::vector<int>& garbler_input,
                                        const std::vector<int>& evaluator_input,
                                        int lambda_gc, std::uint64_t seed) {
  circuit.validate();
  check_bits(garbler_input, circuit.garbler_width, "garbler");
  check_bits(evaluator_input, circuit.evaluator_width, "evaluator");

  Rng root(seed);
  Rng grng = root.fork("garbler");
  const gc::GarbleResult secrets = gc::garble(circuit, lambda_gc, grng);

  TwoPartyResult out;

  // Message 1: circuit material and the garbler's own active labels.
  std::size_t first_bytes = secrets.gc.serialize().size() +
                            secrets.output_map.serialize().size() +
                            static_cast<std::size_t>(circuit.garbler_width) *
                                static_cast<std::size_t>(lambda_gc) / 8;
  out.record.messages.push_back(forward_event("garbled-circuit", first_bytes));

  // Message 2: the evaluator requests labels by sending its choice bits.
  out.record.messages.push_back(
      {"evaluator", "garbler", "ot-request",
       static_cast<std::size_t>(circuit.evaluator_width)});

  // Message 3: the chosen evaluator labels come back.
  out.record.messages.push_back(forward_event(
      "ot-response", static_cast<std::size_t>(circuit.evaluator_width) *
                         static_cast<std::size_t>(lambda_gc) / 8));

  std::vector<gc::Label> input_labels;
  for (int i = 0; i < circuit.input_width(); ++i) {
    const int bit = i < circuit.garbler_width
                        ? garbler_input[static_cast<std::size_t>(i)]
                        : evaluator_input[static_cast<std::size_t>(i - circuit.garbler_width)];
    const auto& pair = secrets.wire_labels[static_cast<std::size_t>(i)];
    input_labels.push_back(bit ? pair.l1 : pair.l0);
  }
  const gc::EvaluationResult eval = gc::evaluate(secrets.gc, circuit, input_labels);
  out.output_bits = gc::decode(eval.output_labels, secrets.output_map);
  out.audit = transcript_audit(out.record);
  return out;
}

}  // namespace otsim::compile2pc
