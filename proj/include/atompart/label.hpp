#pragma once

#include <cstdint>
#include <vector>

#include "atompart/errors.hpp"

namespace atompart {

// A dish drawn from the base measure: either one of its atoms (1-based
// index) or a fresh value from the diffuse part. Diffuse draws are almost
// surely distinct, so a unique token per draw represents them exactly.
class Label {
 public:
  static Label atom(int index) {
    if (index < 1) throw InvalidArgument("Label::atom: index must be >= 1");
    return Label(static_cast<std::int64_t>(index));
  }
  static Label fresh(std::uint64_t id) { return Label(-static_cast<std::int64_t>(id) - 1); }

  bool is_atom() const { return code_ > 0; }
  int atom_index() const {
    if (!is_atom()) throw InvalidState("Label: not an atom");
    return static_cast<int>(code_);
  }
  std::uint64_t fresh_id() const {
    if (is_atom()) throw InvalidState("Label: not fresh");
    return static_cast<std::uint64_t>(-(code_ + 1));
  }

  // Collision-free integer key (atoms positive, fresh tokens negative).
  std::int64_t key() const { return code_; }

  friend bool operator==(Label a, Label b) { return a.code_ == b.code_; }
  friend bool operator!=(Label a, Label b) { return a.code_ != b.code_; }

 private:
  explicit Label(std::int64_t code) : code_(code) {}
  std::int64_t code_;
};

using LabelSequence = std::vector<Label>;

}  // namespace atompart
