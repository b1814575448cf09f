#include <ostream>

#include "bittrunc/memsim.hpp"
#include "cli.hpp"

namespace bittrunc::cli {

int cmd_sim(const GlobalOptions&, const SimOptions& options, std::ostream& out, std::ostream& err) {
  const auto script = memsim::load_script(options.script);
  memsim::MemoryArray memory(options.words);
  const auto trace = memsim::run_script(memory, script);

  if (options.trace_out) write_text_file(*options.trace_out, memsim::trace_to_csv(trace));
  const std::string text = memsim::trace_to_text(trace);
  if (options.text_out) {
    write_text_file(*options.text_out, text);
  } else {
    out << text;
  }

  std::size_t unknown_reads = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace[i];
    if (options.lint && rec.data_in && rec.discarded_write_mask) {
      err << "warning: line " << script[i].line << ": write discarded on gated columns (mask 0x" << std::hex
          << rec.discarded_write_mask << std::dec << ")\n";
    }
    if (rec.data_out && !rec.data_out->fully_defined()) {
      ++unknown_reads;
      if (options.strict) {
        err << "error: line " << script[i].line << ": read returned unknown bits " << rec.data_out->to_string() << '\n';
      }
    }
  }
  if (options.strict && unknown_reads) {
    throw VerificationFailure(std::to_string(unknown_reads) + " read(s) returned unknown bits");
  }
  return kExitOk;
}

}  // namespace bittrunc::cli
