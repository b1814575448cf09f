#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/memsim.hpp"

namespace bittrunc::memsim {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

template <typename T>
T parse_number(std::string_view token, int base, std::size_t line, const char* what) {
  if (base == 16 && token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X')) {
    token.remove_prefix(2);
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, base);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

void expect_args(const std::vector<std::string_view>& tok, std::size_t n, std::size_t line) {
  if (tok.size() != n + 1) {
    throw ParseError(line, upper(tok[0]) + " takes " + std::to_string(n) + " operand(s), got " +
                               std::to_string(tok.size() - 1));
  }
}

}  // namespace

std::vector<ScriptCommand> parse_script(std::string_view text) {
  std::vector<ScriptCommand> script;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    ScriptCommand cmd;
    cmd.line = line_no;
    const std::string op = upper(tok[0]);
    if (op == "WRITE") {
      expect_args(tok, 2, line_no);
      cmd.op = Opcode::Write;
      cmd.address = parse_number<std::size_t>(tok[1], 16, line_no, "address");
      cmd.data = parse_number<std::uint32_t>(tok[2], 16, line_no, "data word");
    } else if (op == "READ") {
      expect_args(tok, 1, line_no);
      cmd.op = Opcode::Read;
      cmd.address = parse_number<std::size_t>(tok[1], 16, line_no, "address");
    } else if (op == "TRUNC") {
      expect_args(tok, 2, line_no);
      cmd.op = Opcode::Trunc;
      const std::string mode = upper(tok[1]);
      if (mode == "BYTE") {
        cmd.spec.mode = TruncationMode::Byte;
      } else if (mode == "WORD") {
        cmd.spec.mode = TruncationMode::Word;
      } else {
        throw ParseError(line_no, "unknown truncation mode '" + std::string(tok[1]) + "'");
      }
      cmd.spec.count = parse_number<unsigned>(tok[2], 10, line_no, "bit count");
      if (!cmd.spec.valid()) {
        throw ParseError(line_no, mode + " truncation count " + std::to_string(cmd.spec.count) +
                                      " out of range 0.." + std::to_string(cmd.spec.max_count()));
      }
    } else if (op == "NOP") {
      expect_args(tok, 0, line_no);
      cmd.op = Opcode::Nop;
    } else {
      throw ParseError(line_no, "unknown opcode '" + std::string(tok[0]) + "'");
    }

    std::ostringstream canon;
    canon << op;
    for (std::size_t i = 1; i < tok.size(); ++i) canon << ' ' << upper(tok[i]);
    cmd.text = canon.str();
    script.push_back(std::move(cmd));
  }
  return script;
}

std::vector<ScriptCommand> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open script " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return parse_script(body.str());
}

CycleTrace run_script(MemoryArray& memory, std::span<const ScriptCommand> script) {
  CycleTrace trace;
  trace.reserve(script.size());
  TruncationControl control = memory.control();
  for (const auto& cmd : script) {
    CycleInputs in;
    switch (cmd.op) {
      case Opcode::Write:
        in.word_enable = in.writeen = true;
        in.address = cmd.address;
        in.data_in = cmd.data;
        break;
      case Opcode::Read:
        in.word_enable = in.readen = true;
        in.address = cmd.address;
        break;
      case Opcode::Trunc:
        control = TruncationControl::from_spec(cmd.spec);
        break;
      case Opcode::Nop:
        break;
    }
    in.control = control;
    try {
      trace.push_back(memory.step(in, cmd.text));
    } catch (const InvalidArgument& e) {
      throw ParseError(cmd.line, e.what());
    }
  }
  return trace;
}

std::string trace_to_csv(const CycleTrace& trace) {
  std::ostringstream os;
  os << "cycle,command,trunc_mode,k,data_out\n";
  for (const auto& rec : trace) {
    const TruncationSpec spec = rec.spec();
    os << rec.cycle << ',' << rec.command << ',' << to_string(spec.mode) << ',' << spec.count << ',';
    if (rec.data_out) os << rec.data_out->to_string();
    os << '\n';
  }
  return os.str();
}

std::string trace_to_text(const CycleTrace& trace) {
  std::size_t cmd_width = 7;
  for (const auto& rec : trace) cmd_width = std::max(cmd_width, rec.command.size());

  std::ostringstream os;
  os << std::left << std::setw(6) << "cycle" << ' ' << std::setw(static_cast<int>(cmd_width)) << "command"
     << " WE RE WR TE BME CODE  data_in   data_out\n";
  for (const auto& rec : trace) {
    os << std::left << std::setw(6) << rec.cycle << ' ' << std::setw(static_cast<int>(cmd_width)) << rec.command
       << ' ' << std::setw(3) << rec.word_enable << std::setw(3) << rec.readen << std::setw(3) << rec.writeen
       << std::setw(3) << rec.trunc_enable << std::setw(4) << rec.byte_mode_enb;
    std::string code(5, '0');
    for (int b = 0; b < 5; ++b) code[4 - b] = ((rec.trunc_code >> b) & 1) ? '1' : '0';
    os << code << ' ';
    if (rec.data_in) {
      std::ostringstream hex;
      hex << std::hex << std::uppercase << std::setw(8) << std::setfill('0') << *rec.data_in;
      os << hex.str() << "  ";
    } else {
      os << "--------  ";
    }
    if (rec.data_out) {
      os << rec.data_out->to_string();
      if (rec.data_out->fully_defined()) {
        std::ostringstream hex;
        hex << std::hex << std::uppercase << std::setw(8) << std::setfill('0') << rec.data_out->bits;
        os << " (0x" << hex.str() << ')';
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace bittrunc::memsim
