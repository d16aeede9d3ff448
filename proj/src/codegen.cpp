#include "lcc/codegen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace lcc {

ShiftAddProgram::ShiftAddProgram(std::size_t n_inputs, std::vector<Op> ops, std::vector<std::size_t> outputs)
    : n_inputs_(n_inputs), ops_(std::move(ops)), outputs_(std::move(outputs)) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    auto earlier = [&](std::size_t ref) {
      if (ref >= i)
        throw StructuralError("op v" + std::to_string(i) + " references v" + std::to_string(ref) +
                              ", which is not defined before it");
    };
    switch (op.kind) {
      case OpKind::Load:
        if (op.a >= n_inputs_)
          throw StructuralError("op v" + std::to_string(i) + " loads input " + std::to_string(op.a) + " of " +
                                std::to_string(n_inputs_));
        break;
      case OpKind::Zero: break;
      case OpKind::Shift:
      case OpKind::Neg: earlier(op.a); break;
      case OpKind::Add:
      case OpKind::Sub:
        earlier(op.a);
        earlier(op.b);
        break;
    }
  }
  for (std::size_t ref : outputs_)
    if (ref >= ops_.size()) throw StructuralError("output references undefined op v" + std::to_string(ref));
}

std::size_t ShiftAddProgram::add_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const Op& op) {
    return op.kind == OpKind::Add || op.kind == OpKind::Sub;
  }));
}

namespace {

class Emitter {
 public:
  std::size_t push(Op op) {
    ops_.push_back(op);
    return ops_.size() - 1;
  }

  std::size_t zero() {
    if (!zero_) zero_ = push({OpKind::Zero});
    return *zero_;
  }

  std::size_t shifted(std::size_t src, int amount) {
    if (amount == 0) return src;
    auto [it, inserted] = shifts_.try_emplace({src, amount}, 0);
    if (inserted) it->second = push({OpKind::Shift, src, 0, amount});
    return it->second;
  }

  std::vector<Op> take() { return std::move(ops_); }

 private:
  std::vector<Op> ops_;
  std::optional<std::size_t> zero_;
  std::map<std::pair<std::size_t, int>, std::size_t> shifts_;
};

}  // namespace

ShiftAddProgram emit(const Decomposition& d) {
  Emitter em;
  std::vector<std::size_t> layer(d.n());
  for (std::size_t n = 0; n < d.n(); ++n) layer[n] = n < d.k() ? em.push({OpKind::Load, n}) : em.zero();

  for (const auto& step : d.steps()) {
    std::vector<std::size_t> next(d.n());
    for (std::size_t n = 0; n < d.n(); ++n) {
      std::vector<std::size_t> pos, neg;
      for (const auto& t : step.row(n).terms()) {
        if (t.coeff.is_zero()) continue;
        const std::size_t ref = em.shifted(layer[t.col], t.coeff.exponent());
        (t.coeff.sign() > 0 ? pos : neg).push_back(ref);
      }
      if (pos.empty() && neg.empty()) {
        next[n] = em.zero();
      } else if (pos.empty()) {
        // -(x + y + ...): the adds are shared with the positive case, Neg is free.
        std::size_t acc = neg.front();
        for (std::size_t i = 1; i < neg.size(); ++i) acc = em.push({OpKind::Add, acc, neg[i]});
        next[n] = em.push({OpKind::Neg, acc});
      } else {
        std::size_t acc = pos.front();
        for (std::size_t i = 1; i < pos.size(); ++i) acc = em.push({OpKind::Add, acc, pos[i]});
        for (std::size_t ref : neg) acc = em.push({OpKind::Sub, acc, ref});
        next[n] = acc;
      }
    }
    layer = std::move(next);
  }
  return {d.k(), em.take(), std::move(layer)};
}

std::vector<double> interpret(const ShiftAddProgram& p, std::span<const double> x) {
  if (x.size() != p.n_inputs())
    throw StructuralError("program expects " + std::to_string(p.n_inputs()) + " inputs, got " +
                          std::to_string(x.size()));
  std::vector<double> v(p.ops().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Op& op = p.ops()[i];
    switch (op.kind) {
      case OpKind::Load: v[i] = x[op.a]; break;
      case OpKind::Zero: v[i] = 0.0; break;
      case OpKind::Shift: v[i] = std::ldexp(v[op.a], op.amount); break;
      case OpKind::Neg: v[i] = -v[op.a]; break;
      case OpKind::Add: v[i] = v[op.a] + v[op.b]; break;
      case OpKind::Sub: v[i] = v[op.a] - v[op.b]; break;
    }
  }
  std::vector<double> y;
  y.reserve(p.n_outputs());
  for (std::size_t ref : p.outputs()) y.push_back(v[ref]);
  return y;
}

std::string export_text(const ShiftAddProgram& p) {
  std::ostringstream os;
  os << ".inputs " << p.n_inputs() << '\n';
  for (std::size_t i = 0; i < p.ops().size(); ++i) {
    const Op& op = p.ops()[i];
    os << 'v' << i << " = ";
    switch (op.kind) {
      case OpKind::Load: os << "load " << op.a; break;
      case OpKind::Zero: os << "zero"; break;
      case OpKind::Shift: os << "shl v" << op.a << ", " << op.amount; break;
      case OpKind::Neg: os << "neg v" << op.a; break;
      case OpKind::Add: os << "add v" << op.a << ", v" << op.b; break;
      case OpKind::Sub: os << "sub v" << op.a << ", v" << op.b; break;
    }
    os << '\n';
  }
  os << ".outputs";
  for (std::size_t ref : p.outputs()) os << " v" << ref;
  os << '\n';
  return os.str();
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t lineno) : s_(line), lineno_(lineno) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw StructuralError("sap line " + std::to_string(lineno_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ == s_.size();
  }
  std::string_view word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != ',') ++pos_;
    if (start == pos_) fail("expected a word");
    return s_.substr(start, pos_ - start);
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  template <class T>
  T number(std::string_view tok) const {
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("bad number '" + std::string(tok) + "'");
    return value;
  }
  std::size_t ref() {
    const auto tok = word();
    if (tok.size() < 2 || tok[0] != 'v') fail("expected a value reference v<i>");
    return number<std::size_t>(tok.substr(1));
  }

 private:
  std::string_view s_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

}  // namespace

ShiftAddProgram parse_text(std::string_view text) {
  std::optional<std::size_t> inputs;
  std::optional<std::vector<std::size_t>> outputs;
  std::vector<Op> ops;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineParser lp(line, lineno);
    if (lp.at_end()) continue;
    if (outputs) lp.fail("content after .outputs");
    const auto head = lp.word();
    if (head == ".inputs") {
      if (inputs) lp.fail("duplicate .inputs");
      inputs = lp.number<std::size_t>(lp.word());
    } else if (head == ".outputs") {
      if (!inputs) lp.fail(".outputs before .inputs");
      outputs.emplace();
      while (!lp.at_end()) outputs->push_back(lp.ref());
      continue;
    } else {
      if (!inputs) lp.fail("op before .inputs");
      if (head != "v" + std::to_string(ops.size())) lp.fail("expected v" + std::to_string(ops.size()));
      lp.expect('=');
      const auto mnemonic = lp.word();
      Op op;
      if (mnemonic == "load") {
        op = {OpKind::Load, lp.number<std::size_t>(lp.word())};
      } else if (mnemonic == "zero") {
        op = {OpKind::Zero};
      } else if (mnemonic == "shl") {
        op.kind = OpKind::Shift;
        op.a = lp.ref();
        lp.expect(',');
        op.amount = lp.number<int>(lp.word());
      } else if (mnemonic == "neg") {
        op = {OpKind::Neg, lp.ref()};
      } else if (mnemonic == "add" || mnemonic == "sub") {
        op.kind = mnemonic == "add" ? OpKind::Add : OpKind::Sub;
        op.a = lp.ref();
        lp.expect(',');
        op.b = lp.ref();
      } else {
        lp.fail("unknown mnemonic '" + std::string(mnemonic) + "'");
      }
      ops.push_back(op);
    }
    if (!lp.at_end()) lp.fail("trailing characters");
  }
  if (!inputs) throw StructuralError("sap program has no .inputs line");
  if (!outputs) throw StructuralError("sap program has no .outputs line");
  return {*inputs, std::move(ops), std::move(*outputs)};
}

}  // namespace lcc
