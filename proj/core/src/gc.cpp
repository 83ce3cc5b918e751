#include "otsim/gc.hpp"

#include <algorithm>
#include <sstream>

#include "otsim/errors.hpp"
#include "otsim/hash.hpp"

namespace otsim::gc {

namespace {

constexpr std::uint8_t kGcMagic[4] = {'O', 'T', 'G', 'C'};
constexpr std::uint8_t kOmMagic[4] = {'O', 'T', 'O', 'M'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kDigestBytes = 16;

int lambda_bytes(int lambda_gc) {
  if (lambda_gc < kMinLambdaGc || lambda_gc > kMaxLambdaGc ||
      lambda_gc % 8 != 0)
    throw ValidationError("lambda_gc must be a multiple of 8 in [8, 224]");
  return lambda_gc / 8;
}

int apply_kind(GateKind kind, int a, int b) {
  switch (kind) {
    case GateKind::kAnd: return a & b;
    case GateKind::kXor: return a ^ b;
    case GateKind::kInv: return 1 - a;
  }
  throw ValidationError("unknown gate kind");
}

Bytes row_key(const Label& la, const Label& lb, int gate_id, int row,
              std::size_t n) {
  Bytes input;
  input.reserve(la.size() + lb.size() + 5);
  input.insert(input.end(), la.begin(), la.end());
  input.insert(input.end(), lb.begin(), lb.end());
  put_u32be(input, static_cast<std::uint32_t>(gate_id));
  input.push_back(static_cast<std::uint8_t>(row));
  const Digest d = sha256(std::span<const std::uint8_t>(input));
  if (n > d.size()) throw ValidationError("row key longer than one digest");
  return Bytes(d.begin(), d.begin() + n);
}

Label random_label(int n_bytes, Rng& rng) {
  Label l(static_cast<std::size_t>(n_bytes));
  rng.fill(l.data(), l.size());
  return l;
}

}  // namespace

std::vector<int> BooleanCircuit::output_wires() const {
  std::vector<int> out(static_cast<std::size_t>(output_width));
  for (int i = 0; i < output_width; ++i) out[i] = n_wires - output_width + i;
  return out;
}

void BooleanCircuit::validate() const {
  if (n_wires < 1) throw ValidationError("circuit needs at least one wire");
  if (garbler_width < 0 || evaluator_width < 0 || output_width < 1)
    throw ValidationError("invalid circuit block widths");
  if (input_width() > n_wires) throw ValidationError("inputs exceed wire count");
  if (output_width > n_wires) throw ValidationError("outputs exceed wire count");

  std::vector<char> assigned(static_cast<std::size_t>(n_wires), 0);
  for (int i = 0; i < input_width(); ++i) assigned[i] = 1;
  for (const Gate& g : gates) {
    const bool unary = g.kind == GateKind::kInv;
    auto check_in = [&](int w) {
      if (w < 0 || w >= n_wires) throw ValidationError("gate input out of range");
      if (!assigned[w]) throw ValidationError("gate reads an unassigned wire");
    };
    check_in(g.in0);
    if (!unary) check_in(g.in1);
    if (g.out < 0 || g.out >= n_wires)
      throw ValidationError("gate output out of range");
    if (assigned[g.out]) throw ValidationError("wire assigned more than once");
    assigned[g.out] = 1;
  }
  for (int w : output_wires())
    if (!assigned[w]) throw ValidationError("output wire never assigned");
}

BooleanCircuit parse_bristol(std::string_view text) {
  std::vector<std::pair<int, std::string>> lines;  // (line number, content)
  {
    int no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = text.find('\n', start);
      const std::string_view raw =
          text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                           : end - start);
      ++no;
      std::string line(raw);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos)
        lines.emplace_back(no, line);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }
  if (lines.size() < 2) throw ParseError("missing circuit header", 1);

  BooleanCircuit c;
  long n_gates = 0;
  {
    std::istringstream h1(lines[0].second);
    if (!(h1 >> n_gates >> c.n_wires) || n_gates < 0 || c.n_wires < 1)
      throw ParseError("bad gate/wire header", lines[0].first);
    std::string rest;
    if (h1 >> rest) throw ParseError("trailing tokens in header", lines[0].first);
  }
  {
    std::istringstream h2(lines[1].second);
    if (!(h2 >> c.garbler_width >> c.evaluator_width >> c.output_width))
      throw ParseError("bad input/output block header", lines[1].first);
  }
  if (static_cast<long>(lines.size()) - 2 != n_gates)
    throw ParseError("gate count does not match header",
                     lines.size() > 2 ? lines.back().first : lines[1].first);

  for (std::size_t i = 2; i < lines.size(); ++i) {
    const int line_no = lines[i].first;
    std::istringstream ls(lines[i].second);
    int n_in = 0, n_out = 0;
    if (!(ls >> n_in >> n_out) || n_out != 1)
      throw ParseError("bad gate arity", line_no);
    Gate g;
    std::string kind;
    if (n_in == 2) {
      if (!(ls >> g.in0 >> g.in1 >> g.out >> kind))
        throw ParseError("bad binary gate line", line_no);
      if (kind == "AND") g.kind = GateKind::kAnd;
      else if (kind == "XOR") g.kind = GateKind::kXor;
      else throw ParseError("unknown gate kind: " + kind, line_no);
    } else if (n_in == 1) {
      if (!(ls >> g.in0 >> g.out >> kind))
        throw ParseError("bad unary gate line", line_no);
      if (kind != "INV" && kind != "NOT")
        throw ParseError("unknown gate kind: " + kind, line_no);
      g.kind = GateKind::kInv;
      g.in1 = -1;
    } else {
      throw ParseError("unsupported gate arity", line_no);
    }
    c.gates.push_back(g);
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), lines.back().first);
  }
  return c;
}

std::string to_bristol(const BooleanCircuit& c) {
  c.validate();
  std::string out = std::to_string(c.gates.size()) + " " +
                    std::to_string(c.n_wires) + "\n" +
                    std::to_string(c.garbler_width) + " " +
                    std::to_string(c.evaluator_width) + " " +
                    std::to_string(c.output_width) + "\n\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::kAnd:
        out += "2 1 " + std::to_string(g.in0) + " " + std::to_string(g.in1) +
               " " + std::to_string(g.out) + " AND\n";
        break;
      case GateKind::kXor:
        out += "2 1 " + std::to_string(g.in0) + " " + std::to_string(g.in1) +
               " " + std::to_string(g.out) + " XOR\n";
        break;
      case GateKind::kInv:
        out += "1 1 " + std::to_string(g.in0) + " " + std::to_string(g.out) +
               " INV\n";
        break;
    }
  }
  return out;
}

std::vector<int> plain_eval(const BooleanCircuit& c,
                            const std::vector<int>& inputs) {
  c.validate();
  if (inputs.size() != static_cast<std::size_t>(c.input_width()))
    throw ValidationError("plain_eval input width mismatch");
  std::vector<int> value(static_cast<std::size_t>(c.n_wires), -1);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] != 0 && inputs[i] != 1)
      throw ValidationError("plain_eval inputs must be bits");
    value[i] = inputs[i];
  }
  for (const Gate& g : c.gates)
    value[g.out] = apply_kind(g.kind, value[g.in0],
                              g.kind == GateKind::kInv ? 0 : value[g.in1]);
  std::vector<int> out;
  for (int w : c.output_wires()) out.push_back(value[w]);
  return out;
}

int permute_bit(const Label& label) {
  if (label.empty()) throw ValidationError("empty wire label");
  return label.back() & 1;
}

Bytes output_digest(const Label& label, int wire) {
  Bytes input(label);
  input.push_back('o');
  input.push_back('u');
  input.push_back('t');
  put_u32be(input, static_cast<std::uint32_t>(wire));
  const Digest d = sha256(std::span<const std::uint8_t>(input));
  return Bytes(d.begin(), d.begin() + kDigestBytes);
}

GarbleResult garble(const BooleanCircuit& c, int lambda_gc, Rng& rng) {
  c.validate();
  const int n_bytes = lambda_bytes(lambda_gc);

  GarbleResult res;
  res.gc.lambda_gc = lambda_gc;
  res.wire_labels.resize(static_cast<std::size_t>(c.n_wires));

  auto fresh_pair = [&]() {
    LabelPair p;
    p.l0 = random_label(n_bytes, rng);
    p.l1 = random_label(n_bytes, rng);
    p.l1.back() = static_cast<std::uint8_t>((p.l1.back() & ~1) |
                                            (1 ^ (p.l0.back() & 1)));
    return p;
  };

  for (int w = 0; w < c.input_width(); ++w) res.wire_labels[w] = fresh_pair();

  for (std::size_t gid = 0; gid < c.gates.size(); ++gid) {
    const Gate& g = c.gates[gid];
    if (g.kind == GateKind::kInv) {
      // Label swap: the active input label simply flips meaning downstream.
      const LabelPair& in = res.wire_labels[g.in0];
      res.wire_labels[g.out] = LabelPair{in.l1, in.l0};
      res.gc.gates.push_back(GarbledGate{});
      continue;
    }
    const LabelPair out_pair = fresh_pair();
    res.wire_labels[g.out] = out_pair;
    const LabelPair& pa = res.wire_labels[g.in0];
    const LabelPair& pb = res.wire_labels[g.in1];

    GarbledGate table;
    table.rows.resize(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Label& la = a ? pa.l1 : pa.l0;
        const Label& lb = b ? pb.l1 : pb.l0;
        const int pos = 2 * permute_bit(la) + permute_bit(lb);
        const int out_bit = apply_kind(g.kind, a, b);
        const Label& lo = out_bit ? out_pair.l1 : out_pair.l0;
        Bytes plain(lo);
        plain.resize(plain.size() + kPadBytes, 0);
        const Bytes key = row_key(la, lb, static_cast<int>(gid), pos, plain.size());
        Bytes row(plain.size());
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = plain[i] ^ key[i];
        table.rows[pos] = std::move(row);
      }
    res.gc.gates.push_back(std::move(table));
  }

  for (int w : c.output_wires()) {
    OutputMap::WireEntry entry;
    entry.wire = w;
    const LabelPair& pair = res.wire_labels[w];
    for (int v = 0; v < 2; ++v) {
      const Label& label = v ? pair.l1 : pair.l0;
      const int pb = permute_bit(label);
      entry.digest[pb] = output_digest(label, w);
      entry.bit[pb] = v;
    }
    res.output_map.wires.push_back(std::move(entry));
  }
  return res;
}

std::optional<Label> decrypt_row(const GarbledGate& gate, int row,
                                 const Label& la, const Label& lb, int gate_id,
                                 int lambda_gc) {
  const int n_bytes = lambda_bytes(lambda_gc);
  if (row < 0 || row >= static_cast<int>(gate.rows.size()))
    throw ValidationError("row index out of range");
  const Bytes& ct = gate.rows[row];
  if (ct.size() != static_cast<std::size_t>(n_bytes + kPadBytes))
    throw CorruptionError("garbled row has wrong length");
  const Bytes key = row_key(la, lb, gate_id, row, ct.size());
  Bytes plain(ct.size());
  for (std::size_t i = 0; i < ct.size(); ++i) plain[i] = ct[i] ^ key[i];
  for (int i = 0; i < kPadBytes; ++i)
    if (plain[n_bytes + i] != 0) return std::nullopt;
  plain.resize(static_cast<std::size_t>(n_bytes));
  return plain;
}

EvaluationResult evaluate(const GarbledCircuit& gc, const BooleanCircuit& c,
                          const std::vector<Label>& input_labels) {
  c.validate();
  if (gc.gates.size() != c.gates.size())
    throw ValidationError("garbled tables do not match the circuit");
  if (input_labels.size() != static_cast<std::size_t>(c.input_width()))
    throw ValidationError("evaluate input width mismatch");
  const int n_bytes = lambda_bytes(gc.lambda_gc);

  EvaluationResult res;
  res.wire_labels.resize(static_cast<std::size_t>(c.n_wires));
  for (std::size_t i = 0; i < input_labels.size(); ++i) {
    if (input_labels[i].size() != static_cast<std::size_t>(n_bytes))
      throw ValidationError("input label has wrong length");
    res.wire_labels[i] = input_labels[i];
  }

  for (std::size_t gid = 0; gid < c.gates.size(); ++gid) {
    const Gate& g = c.gates[gid];
    const GarbledGate& table = gc.gates[gid];
    if (g.kind == GateKind::kInv) {
      if (!table.rows.empty())
        throw CorruptionError("unary gate carries ciphertext rows");
      res.wire_labels[g.out] = res.wire_labels[g.in0];
      continue;
    }
    if (table.rows.size() != 4)
      throw CorruptionError("binary gate must carry four rows");
    const Label& la = res.wire_labels[g.in0];
    const Label& lb = res.wire_labels[g.in1];
    const int pos = 2 * permute_bit(la) + permute_bit(lb);
    std::optional<Label> out =
        decrypt_row(table, pos, la, lb, static_cast<int>(gid), gc.lambda_gc);
    if (!out)
      throw CorruptionError("garbled row failed its integrity padding");
    res.wire_labels[g.out] = std::move(*out);
  }

  for (int w : c.output_wires()) res.output_labels.push_back(res.wire_labels[w]);
  return res;
}

std::vector<int> decode(const std::vector<Label>& output_labels,
                        const OutputMap& map) {
  if (output_labels.size() != map.wires.size())
    throw ValidationError("output label count does not match the map");
  std::vector<int> bits;
  for (std::size_t i = 0; i < output_labels.size(); ++i) {
    const OutputMap::WireEntry& entry = map.wires[i];
    const Bytes d = output_digest(output_labels[i], entry.wire);
    if (d == entry.digest[0]) bits.push_back(entry.bit[0]);
    else if (d == entry.digest[1]) bits.push_back(entry.bit[1]);
    else throw IntegrityError("output label not present in the map");
  }
  return bits;
}

Bytes GarbledCircuit::serialize() const {
  Bytes out;
  out.insert(out.end(), std::begin(kGcMagic), std::end(kGcMagic));
  out.push_back(kVersion);
  put_u32be(out, static_cast<std::uint32_t>(lambda_gc));
  put_u64be(out, gates.size());
  for (const GarbledGate& g : gates) {
    out.push_back(static_cast<std::uint8_t>(g.rows.size()));
    for (const Bytes& row : g.rows)
      out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

GarbledCircuit GarbledCircuit::deserialize(std::span<const std::uint8_t> wire) {
  if (wire.size() < 17) throw IntegrityError("garbled circuit truncated");
  if (!std::equal(std::begin(kGcMagic), std::end(kGcMagic), wire.begin()))
    throw IntegrityError("bad garbled circuit magic");
  if (wire[4] != kVersion)
    throw IntegrityError("unsupported garbled circuit version");
  GarbledCircuit gc;
  gc.lambda_gc = static_cast<int>(get_u32be(wire, 5));
  const int row_bytes = lambda_bytes(gc.lambda_gc) + kPadBytes;
  const std::uint64_t n_gates = get_u64be(wire, 9);
  std::size_t at = 17;
  for (std::uint64_t i = 0; i < n_gates; ++i) {
    if (at >= wire.size()) throw IntegrityError("garbled circuit truncated");
    const int n_rows = wire[at++];
    if (n_rows != 0 && n_rows != 4)
      throw IntegrityError("garbled gate must have 0 or 4 rows");
    GarbledGate g;
    for (int r = 0; r < n_rows; ++r) {
      if (at + row_bytes > wire.size())
        throw IntegrityError("garbled circuit truncated");
      g.rows.emplace_back(wire.begin() + at, wire.begin() + at + row_bytes);
      at += row_bytes;
    }
    gc.gates.push_back(std::move(g));
  }
  if (at != wire.size()) throw IntegrityError("garbled circuit trailing bytes");
  return gc;
}

Bytes OutputMap::serialize() const {
  Bytes out;
  out.insert(out.end(), std::begin(kOmMagic), std::end(kOmMagic));
  out.push_back(kVersion);
  put_u64be(out, wires.size());
  for (const WireEntry& e : wires) {
    put_u32be(out, static_cast<std::uint32_t>(e.wire));
    for (int i = 0; i < 2; ++i) {
      if (e.digest[i].size() != kDigestBytes)
        throw ValidationError("output map digest has wrong length");
      out.insert(out.end(), e.digest[i].begin(), e.digest[i].end());
      out.push_back(static_cast<std::uint8_t>(e.bit[i]));
    }
  }
  return out;
}

OutputMap OutputMap::deserialize(std::span<const std::uint8_t> wire) {
  if (wire.size() < 13) throw IntegrityError("output map truncated");
  if (!std::equal(std::begin(kOmMagic), std::end(kOmMagic), wire.begin()))
    throw IntegrityError("bad output map magic");
  if (wire[4] != kVersion) throw IntegrityError("unsupported output map version");
  const std::uint64_t n = get_u64be(wire, 5);
  OutputMap map;
  std::size_t at = 13;
  const std::size_t entry_bytes = 4 + 2 * (kDigestBytes + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (at + entry_bytes > wire.size()) throw IntegrityError("output map truncated");
    WireEntry e;
    e.wire = static_cast<int>(get_u32be(wire, at));
    at += 4;
    for (int j = 0; j < 2; ++j) {
      e.digest[j].assign(wire.begin() + at, wire.begin() + at + kDigestBytes);
      at += kDigestBytes;
      e.bit[j] = wire[at++];
      if (e.bit[j] != 0 && e.bit[j] != 1)
        throw IntegrityError("output map bit is not a bit");
    }
    map.wires.push_back(std::move(e));
  }
  if (at != wire.size()) throw IntegrityError("output map trailing bytes");
  return map;
}

}  // namespace otsim::gc
