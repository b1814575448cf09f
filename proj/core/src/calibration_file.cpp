#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/powermodel.hpp"
#include "detail/format.hpp"

namespace bittrunc::power {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError(line, "invalid number '" + std::string(token) + "'");
  }
  return value;
}

// Parses `[[b, s], [b, s], ...]`.
class AnchorListParser {
 public:
  AnchorListParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::vector<Anchor> parse() {
    std::vector<Anchor> out;
    expect('[');
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      finish();
      return out;
    }
    while (true) {
      expect('[');
      const double bits = number_until(',');
      expect(',');
      const double pct = number_until(']');
      expect(']');
      if (bits < 0 || bits != static_cast<double>(static_cast<unsigned>(bits))) {
        throw ParseError(line_, "anchor bit count must be a non-negative integer");
      }
      out.push_back({static_cast<unsigned>(bits), pct});
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      break;
    }
    finish();
    return out;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) throw ParseError(line_, std::string("expected '") + c + "' in anchor list");
    ++pos_;
  }

  double number_until(char stop) {
    skip_ws();
    const std::size_t end = text_.find(stop, pos_);
    if (end == std::string_view::npos) throw ParseError(line_, std::string("expected '") + stop + "' in anchor list");
    const double v = parse_double(text_.substr(pos_, end - pos_), line_);
    pos_ = end;
    return v;
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(line_, "trailing characters after anchor list");
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::map<std::string, double PowerParams::*, std::less<>> param_fields() {
  return {
      {"byte_per_bit_uW", &PowerParams::byte_per_bit_uW},
      {"byte_per_bit_pct", &PowerParams::byte_per_bit_pct},
      {"word_per_bit_uW", &PowerParams::word_per_bit_uW},
      {"word_per_bit_pct", &PowerParams::word_per_bit_pct},
      {"base_read_power_uW", &PowerParams::base_read_power_uW},
      {"write_power_mW", &PowerParams::write_power_mW},
      {"data_dep_zero_byte_uW", &PowerParams::data_dep_zero_byte_uW},
      {"data_dep_zero_byte_pct", &PowerParams::data_dep_zero_byte_pct},
      {"data_dep_ff_byte_uW", &PowerParams::data_dep_ff_byte_uW},
      {"data_dep_ff_byte_pct", &PowerParams::data_dep_ff_byte_pct},
      {"manager_overhead_uW", &PowerParams::manager_overhead_uW},
      {"manager_overhead_pct", &PowerParams::manager_overhead_pct},
  };
}

}  // namespace

PowerCalibration parse_calibration(std::string_view text) {
  PowerCalibration cal;
  const auto fields = param_fields();
  std::string section;
  bool base_given = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string_view::npos) {
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "params" && section != "byte" && section != "word") {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (section == "params") {
      const auto it = fields.find(key);
      if (it == fields.end()) throw ParseError(line_no, "unknown parameter '" + std::string(key) + "'");
      cal.params.*(it->second) = parse_double(value, line_no);
      base_given = base_given || key == "base_read_power_uW";
    } else if (section == "byte" || section == "word") {
      if (key != "anchors") throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
      const TruncationMode mode = section == "byte" ? TruncationMode::Byte : TruncationMode::Word;
      try {
        cal.table.set_anchors(mode, AnchorListParser(value, line_no).parse());
      } catch (const InvalidArgument& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "key outside of a section");
    }
  }
  if (!base_given && cal.params.byte_per_bit_pct > 0.0) {
    cal.params.base_read_power_uW = cal.params.byte_per_bit_uW / (cal.params.byte_per_bit_pct / 100.0);
  }
  try {
    cal.params.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("calibration: ") + e.what());
  }
  return cal;
}

PowerCalibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open calibration file " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return parse_calibration(body.str());
}

std::string to_calibration_text(const PowerCalibration& calibration) {
  std::ostringstream os;
  os << "[params]\n";
  for (const auto& [name, field] : param_fields()) os << name << " = " << detail::format_double(calibration.params.*field) << '\n';
  for (const TruncationMode mode : {TruncationMode::Byte, TruncationMode::Word}) {
    os << '\n' << (mode == TruncationMode::Byte ? "[byte]" : "[word]") << "\nanchors = [";
    const auto anchors = calibration.table.anchors(mode);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (i) os << ", ";
      os << '[' << anchors[i].bits << ", " << detail::format_double(anchors[i].savings_pct) << ']';
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace bittrunc::power
