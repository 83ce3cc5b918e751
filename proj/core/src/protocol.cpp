#include "otsim/protocol.hpp"

#include <cstdarg>
#include <cstdio>

#include "otsim/errors.hpp"
#include "otsim/hash.hpp"

namespace otsim::protocol {

namespace {

std::uint64_t draw_nonce(int lambda_bits, Rng& rng) {
  const std::uint64_t raw = rng.next_u64();
  if (lambda_bits >= 64) return raw;
  return raw & ((std::uint64_t{1} << lambda_bits) - 1);
}

void check_bit(int b, const char* what) {
  if (b != 0 && b != 1) throw ValidationError(std::string(what) + " must be a bit");
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[128];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNqsm2Msg: return "nqsm_2msg";
    case Variant::kBqsm2Msg: return "bqsm_2msg";
    case Variant::kOneshotTlp: return "oneshot_tlp";
  }
  throw ValidationError("unknown variant");
}

Variant variant_from_name(std::string_view name) {
  if (name == "nqsm_2msg") return Variant::kNqsm2Msg;
  if (name == "bqsm_2msg") return Variant::kBqsm2Msg;
  if (name == "oneshot_tlp") return Variant::kOneshotTlp;
  throw ValidationError("unknown variant name: " + std::string(name));
}

std::uint64_t ProtocolParams::tlp_tau_steps() const {
  return static_cast<std::uint64_t>(tau_ticks) * hashes_per_tick;
}

void ProtocolParams::validate() const {
  if (n < 2) throw ValidationError("register needs at least 2 sites");
  if (sigma < 1) throw ValidationError("sigma must be >= 1");
  if (hashes_per_tick < 1) throw ValidationError("hashes_per_tick must be >= 1");
  switch (variant) {
    case Variant::kNqsm2Msg:
      if (tau_ticks < 1)
        throw ValidationError("nqsm_2msg requires tau_ticks >= 1");
      break;
    case Variant::kBqsm2Msg:
      if (tau_ticks < 0) throw ValidationError("tau_ticks must be >= 0");
      break;
    case Variant::kOneshotTlp:
      if (tau_ticks < 1)
        throw ValidationError("oneshot_tlp requires tau_ticks >= 1");
      if (lambda_bits < 1 || lambda_bits > tlp::kMaxLambdaBits)
        throw ValidationError("lambda_bits must be in [1, 64]");
      break;
  }
}

std::uint64_t honest_register_size(int sigma) {
  if (sigma < 1 || sigma > 62)
    throw ValidationError("sigma must be in [1, 62] for the size calculator");
  return std::uint64_t{1} << sigma;
}

qsim::Basis basis_for_choice(int y) {
  check_bit(y, "choice y");
  return y == 0 ? qsim::Basis::kDiagonal : qsim::Basis::kComputational;
}

Bytes RegisterMessage::payload_bytes() const { return register_state.serialize(); }

Bytes IndexMessage::payload_bytes() const {
  Bytes out;
  put_u32be(out, k);
  put_u32be(out, l);
  return out;
}

Bytes OneShotMessage::payload_bytes() const {
  Bytes out = register_state.serialize();
  const Bytes puzzle_wire = tlp::serialize(puzzle);
  out.insert(out.end(), puzzle_wire.begin(), puzzle_wire.end());
  return out;
}

std::string_view party_name(Party p) {
  return p == Party::kSender ? "S" : "R";
}

std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::kSend: return "send";
    case EventType::kRecv: return "recv";
    case EventType::kMeasure: return "measure";
    case EventType::kWait: return "wait";
    case EventType::kDecohere: return "decohere";
    case EventType::kSolve: return "solve";
    case EventType::kOutput: return "output";
  }
  throw ValidationError("unknown event type");
}

void ProtocolTranscript::add(long tick, Party party, EventType type,
                             std::string detail, std::string digest) {
  events.push_back({tick, party, type, std::move(detail), std::move(digest)});
}

int ProtocolTranscript::count(Party party, EventType type) const {
  int c = 0;
  for (const auto& e : events)
    if (e.party == party && e.type == type) ++c;
  return c;
}

std::string ProtocolTranscript::to_log() const {
  std::string out;
  for (const auto& e : events) {
    out += std::to_string(e.tick);
    out += '\t';
    out += party_name(e.party);
    out += '\t';
    out += event_type_name(e.type);
    out += '\t';
    out += e.detail;
    out += '\t';
    out += e.digest;
    out += '\n';
  }
  return out;
}

int sender_message_count(const ProtocolTranscript& tr) {
  return tr.count(Party::kSender, EventType::kSend);
}

int receiver_message_count(const ProtocolTranscript& tr) {
  return tr.count(Party::kReceiver, EventType::kSend);
}

bool non_interactive(const ProtocolTranscript& tr) {
  return receiver_message_count(tr) == 0;
}

bool honest_memory_free(const ProtocolTranscript& tr) {
  long arrival = -1;
  for (const auto& e : tr.events)
    if (e.party == Party::kReceiver && e.type == EventType::kRecv) {
      arrival = e.tick;
      break;
    }
  if (arrival < 0) return false;
  for (const auto& e : tr.events)
    if (e.party == Party::kReceiver && e.type == EventType::kMeasure &&
        e.tick != arrival)
      return false;
  return true;
}

void validate_shape(const ProtocolTranscript& tr, const ProtocolParams& params) {
  if (!non_interactive(tr))
    throw ProtocolError("transcript contains receiver-to-sender traffic");
  std::vector<long> send_ticks;
  for (const auto& e : tr.events)
    if (e.party == Party::kSender && e.type == EventType::kSend)
      send_ticks.push_back(e.tick);
  switch (params.variant) {
    case Variant::kNqsm2Msg:
      if (send_ticks.size() != 2)
        throw ProtocolError("nqsm_2msg requires exactly 2 sender messages");
      if (send_ticks[1] - send_ticks[0] < params.tau_ticks)
        throw ProtocolError("nqsm_2msg messages not separated by tau_ticks");
      break;
    case Variant::kBqsm2Msg:
      if (send_ticks.size() != 2)
        throw ProtocolError("bqsm_2msg requires exactly 2 sender messages");
      if (send_ticks[0] != send_ticks[1])
        throw ProtocolError("bqsm_2msg messages must share a tick");
      break;
    case Variant::kOneshotTlp:
      if (send_ticks.size() != 1)
        throw ProtocolError("oneshot_tlp requires exactly 1 sender message");
      break;
  }
}

SitePair draw_pair(int n_sites, Rng& rng) {
  const IndexEncodingSet set(n_sites);
  return set.pairs()[rng.index(set.size())];
}

SenderPackage sender_run_with_pair(const ProtocolParams& params,
                                   SenderInputs inputs, SitePair pair,
                                   std::uint64_t nonce, Rng& rng) {
  params.validate();
  check_bit(inputs.x0, "x0");
  check_bit(inputs.x1, "x1");
  if (pair.k < 1 || pair.k >= pair.l || pair.l > params.n)
    throw ValidationError("index pair out of range");

  SenderPackage pkg;
  pkg.pair = pair;
  pkg.nonce = nonce;

  qsim::QuantumRegister reg =
      params.exact_mode
          ? qsim::prepare_register_exact(params.n, pair.k, pair.l, inputs.x0,
                                         inputs.x1)
          : qsim::prepare_register(params.n, pair.k, pair.l, inputs.x0,
                                   inputs.x1, rng);

  pkg.view.classical_record.push_back(static_cast<std::uint8_t>(inputs.x0));
  pkg.view.classical_record.push_back(static_cast<std::uint8_t>(inputs.x1));
  put_u32be(pkg.view.classical_record, static_cast<std::uint32_t>(pair.k));
  put_u32be(pkg.view.classical_record, static_cast<std::uint32_t>(pair.l));
  put_u64be(pkg.view.classical_record, nonce);
  pkg.view.sent_register_bytes = reg.serialize();
  if (params.exact_mode) pkg.view.sent_state = reg.density();

  switch (params.variant) {
    case Variant::kNqsm2Msg:
      pkg.register_msg = RegisterMessage{reg, 0};
      pkg.index_msg = IndexMessage{static_cast<std::uint32_t>(pair.k),
                                   static_cast<std::uint32_t>(pair.l),
                                   params.tau_ticks};
      break;
    case Variant::kBqsm2Msg:
      pkg.register_msg = RegisterMessage{reg, 0};
      pkg.index_msg = IndexMessage{static_cast<std::uint32_t>(pair.k),
                                   static_cast<std::uint32_t>(pair.l), 0};
      break;
    case Variant::kOneshotTlp: {
      tlp::PuzzleSolution sol{static_cast<std::uint32_t>(pair.k),
                              static_cast<std::uint32_t>(pair.l), nonce};
      tlp::GenResult gen =
          tlp::puzzle_gen(params.tlp_tau_steps(), sol, params.lambda_bits, rng);
      pkg.oneshot_msg = OneShotMessage{reg, gen.puzzle, 0};
      break;
    }
  }
  return pkg;
}

SenderPackage sender_run(const ProtocolParams& params, SenderInputs inputs,
                         Rng& rng) {
  params.validate();
  const SitePair pair = draw_pair(params.n, rng);
  const std::uint64_t nonce = params.variant == Variant::kOneshotTlp
                                  ? draw_nonce(params.lambda_bits, rng)
                                  : 0;
  return sender_run_with_pair(params, inputs, pair, nonce, rng);
}

Receiver::Receiver(const ProtocolParams& params, int y) : params_(params), y_(y) {
  params_.validate();
  check_bit(y, "choice y");
}

void Receiver::measure_all(qsim::QuantumRegister reg, long tick, Rng& rng,
                           ProtocolTranscript& tr) {
  if (reg.n_sites() != params_.n)
    throw ProtocolError("register size does not match parameters");
  if (!bits_.empty()) throw ProtocolError("register already measured");
  const qsim::Basis basis = basis_for_choice(y_);
  for (int site = 1; site <= params_.n; ++site) {
    const auto res = qsim::measure_site(reg, site, basis, rng);
    bits_.push_back(res.outcome);
    tr.add(tick, Party::kReceiver, EventType::kMeasure,
           fmt("site=%d basis=%s outcome=%d", site, y_ == 0 ? "D" : "C",
               res.outcome));
  }
}

int Receiver::finish(std::uint32_t k, std::uint32_t l, long tick,
                     ProtocolTranscript& tr) {
  if (bits_.size() != static_cast<std::size_t>(params_.n))
    throw ProtocolError("indices arrived before the register was measured");
  if (k < 1 || k >= l || l > static_cast<std::uint32_t>(params_.n))
    throw ProtocolError("abort: index pair out of range");
  output_ = bits_[k - 1] ^ bits_[l - 1];
  tr.add(tick, Party::kReceiver, EventType::kOutput,
         fmt("k=%u l=%u bit=%d", k, l, *output_));
  return *output_;
}

void Receiver::on_register(const RegisterMessage& msg, Rng& rng,
                           ProtocolTranscript& tr) {
  const Bytes payload = msg.payload_bytes();
  tr.add(msg.send_tick, Party::kReceiver, EventType::kRecv, "register",
         short_digest(payload));
  measure_all(msg.register_state, msg.send_tick, rng, tr);
}

int Receiver::on_indices(const IndexMessage& msg, ProtocolTranscript& tr) {
  tr.add(msg.send_tick, Party::kReceiver, EventType::kRecv, "indices",
         short_digest(msg.payload_bytes()));
  return finish(msg.k, msg.l, msg.send_tick, tr);
}

int Receiver::on_oneshot(const OneShotMessage& msg, Rng& rng,
                         ProtocolTranscript& tr) {
  tr.add(msg.send_tick, Party::kReceiver, EventType::kRecv, "oneshot",
         short_digest(msg.payload_bytes()));
  measure_all(msg.register_state, msg.send_tick, rng, tr);

  const tlp::SolveResult sol = tlp::puzzle_sol(msg.puzzle);
  const long solve_ticks = static_cast<long>(
      (sol.chain_hashes + params_.hashes_per_tick - 1) / params_.hashes_per_tick);
  const long done = msg.send_tick + solve_ticks;
  tr.add(done, Party::kReceiver, EventType::kSolve,
         fmt("steps=%llu ticks=%ld",
             static_cast<unsigned long long>(sol.chain_hashes), solve_ticks));
  return finish(sol.solution.k, sol.solution.l, done, tr);
}

namespace {

RunResult run_engine(const ProtocolParams& params, int x0, int x1, int y,
                     std::uint64_t seed, const std::optional<SitePair>& pair) {
  params.validate();
  Rng root(seed);
  Rng sender_rng = root.fork("sender");
  Rng receiver_rng = root.fork("receiver");

  SenderPackage pkg;
  if (pair) {
    const std::uint64_t nonce = params.variant == Variant::kOneshotTlp
                                    ? draw_nonce(params.lambda_bits, sender_rng)
                                    : 0;
    pkg = sender_run_with_pair(params, {x0, x1}, *pair, nonce, sender_rng);
  } else {
    pkg = sender_run(params, {x0, x1}, sender_rng);
  }

  RunResult res;
  res.transcript.variant = params.variant;
  res.pair = pkg.pair;
  Receiver receiver(params, y);

  switch (params.variant) {
    case Variant::kNqsm2Msg:
    case Variant::kBqsm2Msg: {
      const RegisterMessage& reg_msg = *pkg.register_msg;
      const IndexMessage& idx_msg = *pkg.index_msg;
      res.transcript.add(reg_msg.send_tick, Party::kSender, EventType::kSend,
                         "register", short_digest(reg_msg.payload_bytes()));
      receiver.on_register(reg_msg, receiver_rng, res.transcript);
      const long separation = idx_msg.send_tick - reg_msg.send_tick;
      if (separation > 0)
        res.transcript.add(reg_msg.send_tick, Party::kSender, EventType::kWait,
                           fmt("ticks=%ld", separation));
      res.transcript.add(idx_msg.send_tick, Party::kSender, EventType::kSend,
                         "indices", short_digest(idx_msg.payload_bytes()));
      res.output = receiver.on_indices(idx_msg, res.transcript);
      break;
    }
    case Variant::kOneshotTlp: {
      const OneShotMessage& msg = *pkg.oneshot_msg;
      res.transcript.add(msg.send_tick, Party::kSender, EventType::kSend,
                         "oneshot", short_digest(msg.payload_bytes()));
      res.output = receiver.on_oneshot(msg, receiver_rng, res.transcript);
      break;
    }
  }

  res.sender_view = std::move(pkg.view);
  res.receiver_bits = receiver.measured_bits();
  validate_shape(res.transcript, params);
  return res;
}

}  // namespace

RunResult run_protocol(const ProtocolParams& params, int x0, int x1, int y,
                       std::uint64_t seed) {
  return run_engine(params, x0, x1, y, seed, std::nullopt);
}

RunResult run_protocol_with_pair(const ProtocolParams& params, int x0, int x1,
                                 int y, SitePair pair, std::uint64_t seed) {
  return run_engine(params, x0, x1, y, seed, pair);
}

}  // namespace otsim::protocol
