#pragma once

// Cycle-level behavioral model of a bit-truncation SRAM: N words by 32
// columns, one truncation manager per column chained through Head/Tail,
// per-column power-gated virtual rails, and three-valued cells.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bittrunc/bitcore.hpp"

namespace bittrunc::memsim {

inline constexpr std::size_t kColumns = 32;
inline constexpr std::size_t kDefaultWords = 1024;

enum class CellState : std::uint8_t { Zero, One, Unknown };

enum class ColumnState : std::uint8_t { Normal, MsbTrunc, LesserTrunc };

enum class Rail : std::uint8_t { Connected, HighZ };

const char* to_string(ColumnState state);

struct ColumnManager {
  bool head = false;
  bool tail_in = false;
  bool tail_out = false;
  ColumnState state = ColumnState::Normal;
  Rail rails = Rail::Connected;

  friend bool operator==(const ColumnManager&, const ColumnManager&) = default;
};

using ManagerChain = std::array<ColumnManager, kColumns>;

/// Raw truncation control pins. `byte_mode_enb` is active low: false selects
/// byte mode. `trunc_code` encodes k-1 for a k-bit truncation.
struct TruncationControl {
  bool trunc_enable = false;
  bool byte_mode_enb = true;
  std::uint8_t trunc_code = 0;

  static TruncationControl from_spec(TruncationSpec spec);
  /// Spec the pins select; throws InvalidArgument for contradictory pins.
  TruncationSpec to_spec() const;

  friend bool operator==(const TruncationControl&, const TruncationControl&) = default;
};

/// Head vector (bit i = Head<i>) for the given control pins.
std::uint32_t decode_truncation(const TruncationControl& control);

/// Resolves every column's manager from the head vector. Tail enters column 31
/// as 0; in byte mode it is also forced to 0 entering columns 23, 15 and 7.
ManagerChain propagate_chain(std::uint32_t head, bool byte_mode);

/// 32 three-valued output symbols. Bit i of `unknown_mask` set means X.
struct ReadWord {
  std::uint32_t bits = 0;
  std::uint32_t unknown_mask = 0;

  bool fully_defined() const { return unknown_mask == 0; }
  CellState symbol(unsigned column) const;
  /// Throws UnknownValueError if any symbol is X.
  std::uint32_t value() const;
  /// MSB-first string over {0,1,X}.
  std::string to_string() const;

  friend bool operator==(const ReadWord&, const ReadWord&) = default;
};

struct TimingConfig {
  double clock_period_ns = 100.0;
  double gating_delay_ns = 44.0;

  /// Rails that reconnect in a cycle are stable before that cycle's write completes.
  bool repower_before_write() const { return gating_delay_ns < clock_period_ns; }
  void validate() const;
};

/// Inputs sampled on one rising clock edge.
struct CycleInputs {
  bool word_enable = false;
  bool readen = false;
  bool writeen = false;
  std::size_t address = 0;
  std::uint32_t data_in = 0;
  TruncationControl control;
};

struct CycleRecord {
  std::uint64_t cycle = 0;
  std::string command;
  bool word_enable = false;
  bool readen = false;
  bool writeen = false;
  bool trunc_enable = false;
  bool byte_mode_enb = true;
  std::uint8_t trunc_code = 0;
  std::optional<std::uint32_t> data_in;
  std::optional<ReadWord> data_out;
  /// Gated columns whose write data was discarded this cycle.
  std::uint32_t discarded_write_mask = 0;

  TruncationSpec spec() const { return TruncationControl{trunc_enable, byte_mode_enb, trunc_code}.to_spec(); }
};

using CycleTrace = std::vector<CycleRecord>;

class MemoryArray {
 public:
  explicit MemoryArray(std::size_t words = kDefaultWords, TimingConfig timing = {});

  std::size_t words() const { return defined_.size(); }
  const TimingConfig& timing() const { return timing_; }
  const TruncationControl& control() const { return control_; }
  const ManagerChain& managers() const { return managers_; }
  std::uint64_t cycle() const { return cycle_; }

  /// Applies new control pins. Columns that lose their rails forget their
  /// contents; columns that regain them stay Unknown until rewritten.
  void set_truncation(const TruncationControl& control);
  void set_truncation(TruncationSpec spec) { set_truncation(TruncationControl::from_spec(spec)); }

  /// Writes powered columns; returns the mask of gated columns whose bit was dropped.
  std::uint32_t write_word(std::size_t address, std::uint32_t value);
  ReadWord read_word(std::size_t address) const;

  CellState cell(std::size_t address, unsigned column) const;
  /// Mask of columns whose rails are high impedance.
  std::uint32_t gated_columns() const { return gated_; }

  /// One clock cycle: control update, then write or read.
  CycleRecord step(const CycleInputs& inputs, std::string command = {});

 private:
  void check_address(std::size_t address) const;
  std::uint32_t write_masked(std::size_t address, std::uint32_t value, std::uint32_t blocked);

  TimingConfig timing_;
  TruncationControl control_;
  ManagerChain managers_{};
  std::uint32_t gated_ = 0;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint32_t> defined_;
  std::uint64_t cycle_ = 0;
};

enum class Opcode { Write, Read, Trunc, Nop };

struct ScriptCommand {
  Opcode op = Opcode::Nop;
  std::size_t line = 0;
  std::size_t address = 0;
  std::uint32_t data = 0;
  TruncationSpec spec;
  std::string text;
};

/// Parses a `.tmscript` body. Throws ParseError carrying the 1-based line.
std::vector<ScriptCommand> parse_script(std::string_view text);
std::vector<ScriptCommand> load_script(const std::filesystem::path& path);

/// Runs each command as one clock cycle against `memory`.
CycleTrace run_script(MemoryArray& memory, std::span<const ScriptCommand> script);

/// CSV columns: cycle,command,trunc_mode,k,data_out. Non-read cycles leave data_out empty.
std::string trace_to_csv(const CycleTrace& trace);
/// Aligned text waveform table with every control signal.
std::string trace_to_text(const CycleTrace& trace);

}  // namespace bittrunc::memsim
