#include <gtest/gtest.h>

#include <random>

#include "bittrunc/errors.hpp"
#include "bittrunc/memsim.hpp"
#include "oracles.hpp"

using namespace bittrunc;
using namespace bittrunc::memsim;

TEST(DecodeTruncation, Examples) {
  EXPECT_EQ(decode_truncation({false, true, 5}), 0u);
  EXPECT_EQ(decode_truncation({true, true, 0}), 1u << 0);
  EXPECT_EQ(decode_truncation({true, true, 16}), 1u << 16);
  EXPECT_EQ(decode_truncation(TruncationControl::from_spec(TruncationSpec::byte(3))),
            (1u << 2) | (1u << 10) | (1u << 18) | (1u << 26));
  EXPECT_EQ(decode_truncation({true, true, 31}), 1u << 31);
}

TEST(DecodeTruncation, ByteModeRejectsLargeCodes) {
  EXPECT_THROW(decode_truncation({true, false, 8}), InvalidArgument);
  EXPECT_NO_THROW(decode_truncation({true, false, 7}));
}

TEST(TruncationControl, SpecRoundTrip) {
  for (unsigned k = 0; k <= 32; ++k) EXPECT_EQ(TruncationControl::from_spec(TruncationSpec::word(k)).to_spec(),
                                               TruncationSpec::word(k));
  for (unsigned k = 0; k <= 8; ++k) EXPECT_EQ(TruncationControl::from_spec(TruncationSpec::byte(k)).to_spec(),
                                              TruncationSpec::byte(k));
  EXPECT_FALSE(TruncationControl::from_spec(TruncationSpec::byte(0)).trunc_enable);
}

TEST(PropagateChain, AllNormal) {
  for (const auto& m : propagate_chain(0, false)) {
    EXPECT_EQ(m.state, ColumnState::Normal);
    EXPECT_EQ(m.rails, Rail::Connected);
    EXPECT_FALSE(m.tail_out);
  }
}

TEST(PropagateChain, WordHeadThree) {
  const auto chain = propagate_chain(1u << 3, false);
  EXPECT_EQ(chain[3].state, ColumnState::MsbTrunc);
  EXPECT_TRUE(chain[3].tail_out);
  for (unsigned c = 0; c < 3; ++c) {
    EXPECT_EQ(chain[c].state, ColumnState::LesserTrunc);
    EXPECT_EQ(chain[c].rails, Rail::HighZ);
  }
  for (unsigned c = 4; c < 32; ++c) EXPECT_EQ(chain[c].state, ColumnState::Normal);
  EXPECT_FALSE(chain[31].tail_in);
}

TEST(PropagateChain, ByteModeResetsTail) {
  const std::uint32_t head = (1u << 2) | (1u << 10) | (1u << 18) | (1u << 26);
  const auto chain = propagate_chain(head, true);
  for (unsigned b = 0; b < 4; ++b) {
    EXPECT_EQ(chain[8 * b + 2].state, ColumnState::MsbTrunc);
    EXPECT_EQ(chain[8 * b + 1].state, ColumnState::LesserTrunc);
    EXPECT_EQ(chain[8 * b + 0].state, ColumnState::LesserTrunc);
    for (unsigned c = 3; c < 8; ++c) EXPECT_EQ(chain[8 * b + c].state, ColumnState::Normal);
  }
  // In word mode the same heads would chain through every lower column.
  const auto word = propagate_chain(head, false);
  for (unsigned c = 0; c < 26; ++c) EXPECT_NE(word[c].state, ColumnState::Normal);
}

TEST(MemoryArray, WriteUntruncatedIsDefined) {
  MemoryArray m(16);
  m.write_word(3, 0x55555555u);
  const auto r = m.read_word(3);
  EXPECT_TRUE(r.fully_defined());
  EXPECT_EQ(r.value(), 0x55555555u);
}

TEST(MemoryArray, GatedWriteLeavesLowColumnsUnknown) {
  MemoryArray m(16);
  m.set_truncation(TruncationSpec::word(16));
  const auto dropped = m.write_word(0, 0xFF00FF00u);
  EXPECT_EQ(dropped, 0xFFFFu);
  for (unsigned c = 16; c < 32; ++c) EXPECT_NE(m.cell(0, c), CellState::Unknown);
  for (unsigned c = 0; c < 16; ++c) EXPECT_EQ(m.cell(0, c), CellState::Unknown);
  // Reads see the dummy pattern on gated columns regardless.
  EXPECT_EQ(m.read_word(0).value(), 0xFF008000u);
}

TEST(MemoryArray, AddressBounds) {
  MemoryArray m(4);
  EXPECT_THROW(m.write_word(4, 0), InvalidArgument);
  EXPECT_THROW(m.read_word(4), InvalidArgument);
}

TEST(MemoryArray, ReadSequence) {
  MemoryArray m(4);
  m.write_word(0, 0x55555555u);
  EXPECT_EQ(m.read_word(0).value(), 0x55555555u);
  const std::uint32_t expect[] = {0, 0, 0x56565656u, 0x54545454u, 0x58585858u};
  for (unsigned k = 2; k <= 4; ++k) {
    m.set_truncation(TruncationSpec::byte(k));
    EXPECT_EQ(m.read_word(0).value(), expect[k]) << k;
  }
  m.set_truncation(TruncationSpec::word(0));
  m.write_word(0, 0x55555555u);
  m.set_truncation(TruncationSpec::word(16));
  EXPECT_EQ(m.read_word(0).value(), 0x55558000u);
}

TEST(MemoryArray, GatingLosesDataAndRepowerKeepsUnknown) {
  MemoryArray m(4);
  m.write_word(1, 0xFFFFFFFFu);
  m.set_truncation(TruncationSpec::byte(4));
  EXPECT_EQ(m.gated_columns(), 0x0F0F0F0Fu);
  for (unsigned b = 0; b < 4; ++b)
    for (unsigned c = 0; c < 4; ++c) EXPECT_EQ(m.cell(1, 8 * b + c), CellState::Unknown);

  const auto before = m.read_word(1);
  m.set_truncation(TruncationSpec::byte(4));
  EXPECT_EQ(m.read_word(1), before);

  m.set_truncation(TruncationSpec::byte(2));
  const auto r = m.read_word(1);
  EXPECT_EQ(r.unknown_mask, 0x0C0C0C0Cu);
  EXPECT_THROW(r.value(), UnknownValueError);
  EXPECT_EQ(r.to_string().substr(0, 8), "1111XX10");

  m.write_word(1, 0xFFFFFFFFu);
  EXPECT_TRUE(m.read_word(1).fully_defined());
  EXPECT_EQ(m.read_word(1).value(), 0xFEFEFEFEu);
}

TEST(MemoryArray, AgreesWithPerBitReferenceOnDefinedBits) {
  std::mt19937 rng(17);
  MemoryArray m(1);
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t w = rng();
    for (unsigned k = 0; k <= 32; ++k) {
      m.set_truncation(TruncationSpec::word(0));
      m.write_word(0, w);
      m.set_truncation(TruncationSpec::word(k));
      const auto r = m.read_word(0);
      ASSERT_TRUE(r.fully_defined());
      EXPECT_EQ(r.bits, oracle::truncate_low(w, k, 32));
    }
    for (unsigned k = 0; k <= 8; ++k) {
      m.set_truncation(TruncationSpec::word(0));
      m.write_word(0, w);
      m.set_truncation(TruncationSpec::byte(k));
      EXPECT_EQ(m.read_word(0).value(), oracle::truncate_low(w, k, 8));
    }
  }
}

TEST(MemoryArray, NoPhantomData) {
  MemoryArray m(2);
  m.write_word(0, 0xA5A5A5A5u);
  m.set_truncation(TruncationSpec::word(12));
  m.set_truncation(TruncationSpec::word(0));
  const auto r = m.read_word(0);
  EXPECT_EQ(r.unknown_mask, 0xFFFu);
  EXPECT_EQ(r.bits & 0xFFFFF000u, 0xA5A5A000u);
}

TEST(TimingConfig, RepowerRule) {
  EXPECT_TRUE(TimingConfig{}.repower_before_write());
  EXPECT_FALSE((TimingConfig{100.0, 150.0}).repower_before_write());
}

TEST(Script, Parse) {
  const auto s = parse_script("# header\nwrite 0x2A 55555555\nREAD 2a\n\nTRUNC byte 3\nNOP  # idle\n");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].op, Opcode::Write);
  EXPECT_EQ(s[0].address, 0x2Au);
  EXPECT_EQ(s[0].data, 0x55555555u);
  EXPECT_EQ(s[1].line, 3u);
  EXPECT_EQ(s[2].spec, TruncationSpec::byte(3));
  EXPECT_EQ(s[3].op, Opcode::Nop);
  EXPECT_TRUE(parse_script("").empty());
}

TEST(Script, ErrorsCarryLine) {
  try {
    parse_script("NOP\nNOP\nNOP\nNOP\nJUMP 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  EXPECT_THROW(parse_script("TRUNC BYTE 9\n"), ParseError);
  EXPECT_THROW(parse_script("TRUNC WORD 33\n"), ParseError);
  EXPECT_THROW(parse_script("WRITE 1\n"), ParseError);
  EXPECT_THROW(parse_script("READ zz\n"), ParseError);
}

TEST(Script, RunOutOfRangeAddressReportsLine) {
  MemoryArray m(4);
  const auto s = parse_script("NOP\nREAD 10\n");
  try {
    run_script(m, s);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Script, BundledTimingScript) {
  MemoryArray m;
  const auto trace = run_script(m, load_script(BITTRUNC_TIMING_SCRIPT));
  std::vector<std::uint32_t> reads;
  for (const auto& rec : trace)
    if (rec.data_out) reads.push_back(rec.data_out->value());
  EXPECT_EQ(reads, (std::vector<std::uint32_t>{0x55555555u, 0x56565656u, 0x54545454u, 0x58585858u, 0x55555555u,
                                               0x55555556u, 0x55555554u, 0x55558000u}));
}

TEST(Script, DeterministicCsv) {
  const auto script = load_script(BITTRUNC_TIMING_SCRIPT);
  MemoryArray a, b;
  const auto csv_a = trace_to_csv(run_script(a, script));
  EXPECT_EQ(csv_a, trace_to_csv(run_script(b, script)));
  EXPECT_EQ(csv_a.substr(0, csv_a.find('\n')), "cycle,command,trunc_mode,k,data_out");
  EXPECT_NE(csv_a.find(",BYTE,2,01010110010101100101011001010110"), std::string::npos);
}

TEST(Script, EmptyTrace) {
  MemoryArray m;
  EXPECT_TRUE(run_script(m, parse_script("# nothing\n")).empty());
}
