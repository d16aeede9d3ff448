#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcc/core.hpp"

namespace lcc {

enum class OpKind { Load, Zero, Shift, Neg, Add, Sub };

/// One single-assignment instruction. Operand meaning by kind:
/// Load: a = input index. Shift: a = source op, amount = power of two.
/// Neg: a = source op. Add/Sub: a, b = source ops (a - b for Sub).
struct Op {
  OpKind kind = OpKind::Zero;
  std::size_t a = 0;
  std::size_t b = 0;
  int amount = 0;

  friend bool operator==(const Op&, const Op&) = default;
};

/// Straight-line shift/add program computing x -> P x.
class ShiftAddProgram {
 public:
  ShiftAddProgram(std::size_t n_inputs, std::vector<Op> ops, std::vector<std::size_t> outputs);

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t n_outputs() const noexcept { return outputs_.size(); }
  std::span<const Op> ops() const noexcept { return ops_; }
  std::span<const std::size_t> outputs() const noexcept { return outputs_; }

  /// Number of Add and Sub instructions.
  std::size_t add_count() const noexcept;

  friend bool operator==(const ShiftAddProgram&, const ShiftAddProgram&) = default;

 private:
  std::size_t n_inputs_;
  std::vector<Op> ops_;
  std::vector<std::size_t> outputs_;
};

/// One layer per wiring step; rows become shifted references combined with
/// Add/Sub, so add_count() equals cost(d).effective_adds.
ShiftAddProgram emit(const Decomposition& d);

std::vector<double> interpret(const ShiftAddProgram& p, std::span<const double> x);

/// Line-per-instruction text form (.sap). Grammar:
///   .inputs <K>
///   v<i> = load <k> | zero | shl v<j>, <int> | neg v<j> | add v<j>, v<l> | sub v<j>, v<l>
///   .outputs v<a> v<b> ...
std::string export_text(const ShiftAddProgram& p);
ShiftAddProgram parse_text(std::string_view text);

}  // namespace lcc
