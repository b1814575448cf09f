#include "bittrunc/memsim.hpp"

#include "bittrunc/errors.hpp"

namespace bittrunc::memsim {

const char* to_string(ColumnState state) {
  switch (state) {
    case ColumnState::Normal:
      return "normal";
    case ColumnState::MsbTrunc:
      return "msb-trunc";
    case ColumnState::LesserTrunc:
      return "lesser-trunc";
  }
  return "?";
}

TruncationControl TruncationControl::from_spec(TruncationSpec spec) {
  spec.validate();
  TruncationControl control;
  control.byte_mode_enb = spec.mode == TruncationMode::Word;
  if (spec.count > 0) {
    control.trunc_enable = true;
    control.trunc_code = static_cast<std::uint8_t>(spec.count - 1);
  }
  return control;
}

TruncationSpec TruncationControl::to_spec() const {
  const TruncationMode mode = byte_mode_enb ? TruncationMode::Word : TruncationMode::Byte;
  if (trunc_code > 31) {
    throw InvalidArgument("trunc_code " + std::to_string(trunc_code) + " is wider than 5 bits");
  }
  if (!trunc_enable) return {mode, 0};
  if (mode == TruncationMode::Byte && trunc_code >= kByteBits) {
    throw InvalidArgument("byte mode trunc_code " + std::to_string(trunc_code) + " implies more than 8 bits");
  }
  return {mode, static_cast<unsigned>(trunc_code) + 1};
}

std::uint32_t decode_truncation(const TruncationControl& control) {
  const TruncationSpec spec = control.to_spec();
  if (spec.count == 0) return 0;
  const std::uint32_t head = std::uint32_t{1} << (spec.count - 1);
  return spec.mode == TruncationMode::Word ? head : head * 0x01010101u;
}

ManagerChain propagate_chain(std::uint32_t head, bool byte_mode) {
  ManagerChain chain{};
  bool tail = false;  // Tail<m-1> is tied to ground.
  for (int col = static_cast<int>(kColumns) - 1; col >= 0; --col) {
    auto& mgr = chain[static_cast<std::size_t>(col)];
    if (byte_mode && col % 8 == 7) tail = false;
    mgr.head = (head >> col) & 1u;
    mgr.tail_in = tail;
    if (mgr.head) {
      mgr.state = ColumnState::MsbTrunc;
    } else if (mgr.tail_in) {
      mgr.state = ColumnState::LesserTrunc;
    } else {
      mgr.state = ColumnState::Normal;
    }
    mgr.tail_out = mgr.state != ColumnState::Normal;
    mgr.rails = mgr.tail_out ? Rail::HighZ : Rail::Connected;
    tail = mgr.tail_out;
  }
  // Tail<0> leaves the array unconnected.
  return chain;
}

CellState ReadWord::symbol(unsigned column) const {
  if ((unknown_mask >> column) & 1u) return CellState::Unknown;
  return ((bits >> column) & 1u) ? CellState::One : CellState::Zero;
}

std::uint32_t ReadWord::value() const {
  if (!fully_defined()) throw UnknownValueError("read word " + to_string() + " contains unknown bits");
  return bits;
}

std::string ReadWord::to_string() const {
  std::string out(kColumns, '0');
  for (unsigned col = 0; col < kColumns; ++col) {
    const char c = "01X"[static_cast<int>(symbol(col))];
    out[kColumns - 1 - col] = c;
  }
  return out;
}

void TimingConfig::validate() const {
  if (!(clock_period_ns > 0.0) || !(gating_delay_ns >= 0.0)) {
    throw InvalidArgument("timing values must be positive");
  }
}

MemoryArray::MemoryArray(std::size_t words, TimingConfig timing)
    : timing_(timing), values_(words, 0), defined_(words, 0) {
  if (words == 0) throw InvalidArgument("memory needs at least one word");
  timing_.validate();
  managers_ = propagate_chain(0, false);
}

void MemoryArray::check_address(std::size_t address) const {
  if (address >= defined_.size()) {
    throw InvalidArgument("address " + std::to_string(address) + " out of range 0.." +
                          std::to_string(defined_.size() - 1));
  }
}

void MemoryArray::set_truncation(const TruncationControl& control) {
  const std::uint32_t head = decode_truncation(control);
  const bool byte_mode = control.trunc_enable && !control.byte_mode_enb;
  managers_ = propagate_chain(head, byte_mode);
  control_ = control;

  std::uint32_t gated = 0;
  for (unsigned col = 0; col < kColumns; ++col) {
    if (managers_[col].rails == Rail::HighZ) gated |= std::uint32_t{1} << col;
  }
  // Retention loss lands within the gating cycle. Re-powered columns were
  // already Unknown and stay so until written.
  const std::uint32_t newly_gated = gated & ~gated_;
  if (newly_gated) {
    for (auto& d : defined_) d &= ~newly_gated;
  }
  gated_ = gated;
}

std::uint32_t MemoryArray::write_masked(std::size_t address, std::uint32_t value, std::uint32_t blocked) {
  check_address(address);
  const std::uint32_t dropped = gated_ | blocked;
  const std::uint32_t stored = ~dropped;
  values_[address] = (values_[address] & dropped) | (value & stored);
  defined_[address] |= stored;
  return dropped;
}

std::uint32_t MemoryArray::write_word(std::size_t address, std::uint32_t value) {
  return write_masked(address, value, 0);
}

ReadWord MemoryArray::read_word(std::size_t address) const {
  check_address(address);
  ReadWord out;
  for (unsigned col = 0; col < kColumns; ++col) {
    const std::uint32_t bit = std::uint32_t{1} << col;
    switch (managers_[col].state) {
      case ColumnState::MsbTrunc:
        out.bits |= bit;
        break;
      case ColumnState::LesserTrunc:
        break;
      case ColumnState::Normal:
        if (defined_[address] & bit) {
          out.bits |= values_[address] & bit;
        } else {
          out.unknown_mask |= bit;
        }
        break;
    }
  }
  return out;
}

CellState MemoryArray::cell(std::size_t address, unsigned column) const {
  check_address(address);
  if (column >= kColumns) throw InvalidArgument("column out of range");
  const std::uint32_t bit = std::uint32_t{1} << column;
  if (!(defined_[address] & bit)) return CellState::Unknown;
  return (values_[address] & bit) ? CellState::One : CellState::Zero;
}

CycleRecord MemoryArray::step(const CycleInputs& in, std::string command) {
  if (in.word_enable && in.readen && in.writeen) {
    throw InvalidArgument("read and write enabled in the same cycle");
  }
  CycleRecord rec;
  rec.cycle = cycle_;
  rec.command = std::move(command);
  rec.word_enable = in.word_enable;
  rec.readen = in.readen;
  rec.writeen = in.writeen;
  rec.trunc_enable = in.control.trunc_enable;
  rec.byte_mode_enb = in.control.byte_mode_enb;
  rec.trunc_code = in.control.trunc_code;

  std::uint32_t repowered = 0;
  if (!(in.control == control_)) {
    const std::uint32_t before = gated_;
    set_truncation(in.control);
    repowered = before & ~gated_;
  }

  if (in.word_enable && in.writeen) {
    const std::uint32_t blocked = timing_.repower_before_write() ? 0 : repowered;
    rec.data_in = in.data_in;
    rec.discarded_write_mask = write_masked(in.address, in.data_in, blocked);
  } else if (in.word_enable && in.readen) {
    rec.data_out = read_word(in.address);
  }
  ++cycle_;
  return rec;
}

}  // namespace bittrunc::memsim
