#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "pestego/carrier_io.hpp"
#include "pestego/error.hpp"
#include "pestego/integrity.hpp"
#include "pestego/key.hpp"
#include "pestego/pe_format.hpp"
#include "pestego/stat_stego.hpp"
#include "pestego/stego_pe.hpp"

namespace pestego::cli {
namespace {

namespace fs = std::filesystem;

// Raised for anything wrong with an input file; always exit 2.
struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::vector<std::string> inputs;
  std::string output;
  std::string payload;
  std::string name;
  std::string key;
  std::string block = "8x8";
  std::string size;
  double alpha = 0.05;
  int k = 10;
  std::size_t bits = 0;
  bool force = false;
  bool strict = false;
  bool csv = false;
  bool hist = false;
};

std::string hex(std::uint64_t v, int width = 8) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%0*llX", width, static_cast<unsigned long long>(v));
  return buf;
}

Bytes read_input(const std::string& path) {
  if (fs::is_directory(path)) throw InputFailure(path + " is a directory");
  try {
    return read_file(path);
  } catch (const Error& e) {
    throw InputFailure(e.what());
  }
}

PeImage load_pe(const std::string& path, bool strict) {
  const Bytes bytes = read_input(path);
  try {
    return PeImage::parse(bytes, ParseOptions{strict});
  } catch (const Error& e) {
    throw InputFailure(path + ": " + std::string(to_string(e.code())) + ": " + e.what());
  }
}

std::pair<std::uint32_t, std::uint32_t> parse_dims(const std::string& text, const char* flag) {
  unsigned w = 0, h = 0;
  char x = 0, extra = 0;
  if (std::sscanf(text.c_str(), "%u%c%u%c", &w, &x, &h, &extra) != 3 || (x != 'x' && x != 'X') || w == 0 || h == 0)
    throw Error(ErrorCode::InvalidParams, std::string(flag) + " expects WxH, got '" + text + "'");
  return {w, h};
}

stat::StatParams make_params(const Config& cfg) {
  const auto [cols, rows] = parse_dims(cfg.block, "--block");
  return stat::StatParams::make(rows, cols, cfg.k, cfg.alpha);
}

// PGM unless --size WxH announces a raw grid.
stat::Carrier load_carrier(const Config& cfg) {
  const Bytes bytes = read_input(cfg.inputs.front());
  std::optional<std::pair<std::uint32_t, std::uint32_t>> dims;
  if (!cfg.size.empty()) dims = parse_dims(cfg.size, "--size");
  try {
    return dims ? read_raw_grid(bytes, dims->first, dims->second) : read_pgm(bytes);
  } catch (const Error& e) {
    throw InputFailure(cfg.inputs.front() + ": " + e.what());
  }
}

// A file of '0'/'1' characters (whitespace ignored) is a bit string; any
// other content is expanded to bits, most significant bit first.
stat::MessageLayout load_message(const std::string& path) {
  const Bytes bytes = read_input(path);
  stat::MessageLayout msg;
  bool textual = true;
  for (auto b : bytes) {
    if (b == '0' || b == '1')
      msg.bits.push_back(static_cast<std::uint8_t>(b - '0'));
    else if (!std::isspace(b)) {
      textual = false;
      break;
    }
  }
  if (textual) return msg;
  msg.bits.clear();
  for (auto b : bytes)
    for (int i = 7; i >= 0; --i) msg.bits.push_back(static_cast<std::uint8_t>((b >> i) & 1));
  return msg;
}

std::string format_q(double q) {
  if (std::fabs(q) >= stat::kDegenerateQ) return q > 0 ? "+inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", q);
  return buf;
}

int cmd_inspect(const Config& cfg, std::ostream& out) {
  const PeImage img = load_pe(cfg.inputs.front(), cfg.strict);
  const auto& h = img.nt_headers();
  out << "file: " << cfg.inputs.front() << " (" << img.size() << " bytes)\n";
  out << "machine: " << hex(h.machine, 4) << "\n";
  out << "e_lfanew: " << hex(img.dos_header().e_lfanew) << "\n";
  out << "image base: " << hex(h.image_base) << "\n";
  out << "entry point: " << hex(h.address_of_entry_point) << " (va " << hex(std::uint64_t{h.image_base} + h.address_of_entry_point) << ")\n";
  out << "section alignment: " << hex(h.section_alignment) << "\n";
  out << "file alignment: " << hex(h.file_alignment) << "\n";
  out << "size of headers: " << hex(h.size_of_headers) << "\n";
  out << "checksum: " << hex(h.checksum) << "\n";
  out << "section table end: " << hex(img.header_end_offset()) << "\n";
  out << "sections: " << img.sections().size() << "\n";
  out << "  #  name      vaddr       vsize       rawptr      rawsize     slack\n";
  for (std::size_t i = 0; i < img.sections().size(); ++i) {
    const auto& s = img.sections()[i];
    std::string name = s.display_name();
    name.resize(8, ' ');
    char line[160];
    std::snprintf(line, sizeof line, "  %-2zu %s  0x%08X  0x%08X  0x%08X  0x%08X  %u\n", i, name.c_str(),
                  s.virtual_address, s.virtual_size, s.pointer_to_raw_data, s.size_of_raw_data,
                  section_slack(img, i).length);
    out << line;
  }
  const Region slack = header_slack(img);
  out << "header slack: " << hex(slack.offset) << " +" << slack.length << "\n";
  out << "capacity: " << slack.length << " bytes; record overhead " << kRecordFixedOverhead
      << " + name length\n";
  for (const auto& w : img.warnings()) out << "warning: " << w.code << ": " << w.message << "\n";
  return kOk;
}

std::string payload_name(const Config& cfg) {
  if (!cfg.name.empty()) return cfg.name;
  if (!cfg.payload.empty()) return fs::path(cfg.payload).filename().string();
  throw Error(ErrorCode::InvalidName, "--name or --payload is required");
}

int cmd_capacity(const Config& cfg, std::ostream& out) {
  const PeImage img = load_pe(cfg.inputs.front(), cfg.strict);
  const auto rep = capacity(img, payload_name(cfg));
  out << "slack: " << hex(rep.region.offset) << " +" << rep.total << "\n";
  out << "overhead: " << rep.overhead << "\n";
  out << "usable: " << rep.usable << "\n";
  return kOk;
}

int cmd_embed(const Config& cfg, std::ostream& out) {
  const PeImage img = load_pe(cfg.inputs.front(), cfg.strict);
  const Bytes data = read_input(cfg.payload);
  const std::string name = payload_name(cfg);
  const PeImage stego = hide(img, name, data, HideOptions{cfg.force});
  write_file(cfg.output, stego.bytes());
  const Region slack = header_slack(img);
  const std::size_t used = PayloadRecord{name, data}.encoded_size();
  out << "hid '" << name << "' (" << data.size() << " bytes) at " << hex(slack.offset) << "\n";
  out << "slack used: " << used << " of " << slack.length << " bytes\n";
  return kOk;
}

int cmd_extract(const Config& cfg, std::ostream& out) {
  const PeImage img = load_pe(cfg.inputs.front(), cfg.strict);
  const PayloadRecord rec = retract(img);
  const auto path = write_extracted_file(rec.name, rec.data, cfg.output);
  out << "extracted '" << rec.name << "' (" << rec.data.size() << " bytes) to " << path.string() << "\n";
  return kOk;
}

int cmd_verify(const Config& cfg, std::ostream& out) {
  if (cfg.inputs.size() != 2) throw Error(ErrorCode::InvalidParams, "verify needs exactly two --in files (cover, stego)");
  const Bytes before = read_input(cfg.inputs[0]);
  const Bytes after = read_input(cfg.inputs[1]);
  EquivalenceReport rep;
  try {
    rep = compare(before, after);
  } catch (const Error& e) {
    throw InputFailure(e.what());
  }
  out << to_text(rep);
  if (!cfg.output.empty()) {
    const std::string doc = to_structured(rep);
    write_file(cfg.output, ByteView(reinterpret_cast<const std::uint8_t*>(doc.data()), doc.size()));
  }
  return rep.diff_confined_to_slack ? kOk : kNotConfined;
}

int cmd_stat_embed(const Config& cfg, std::ostream& out) {
  const auto params = make_params(cfg);
  const stat::Carrier carrier = load_carrier(cfg);
  const auto msg = load_message(cfg.payload);
  const Bytes key = parse_key(cfg.key);
  const stat::Carrier stego = stat::embed_message(carrier, key, msg, params);
  write_file(cfg.output, cfg.size.empty() ? write_pgm(stego) : stego.pixels);
  out << "embedded " << msg.bits.size() << " bits into " << msg.bits.size() << " of "
      << stat::block_capacity(carrier, params) << " blocks (" << params.block_cols << "x" << params.block_rows
      << ", k=" << params.k << ")\n";
  return kOk;
}

void print_histogram(const std::vector<stat::DetectionStatistic>& stats, double z, std::ostream& out) {
  constexpr double lo = -4.0, hi = 12.0, width = 0.5;
  constexpr int bins = static_cast<int>((hi - lo) / width);
  std::vector<std::size_t> counts(bins + 2, 0);  // underflow, bins, overflow
  for (const auto& s : stats) {
    if (s.q < lo)
      ++counts.front();
    else if (s.q >= hi)
      ++counts.back();
    else
      ++counts[1 + static_cast<std::size_t>((s.q - lo) / width)];
  }
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));
  out << "q histogram (threshold " << format_q(z) << ")\n";
  for (int i = 0; i < bins + 2; ++i) {
    char label[32];
    if (i == 0)
      std::snprintf(label, sizeof label, "      < %5.1f", lo);
    else if (i == bins + 1)
      std::snprintf(label, sizeof label, "     >= %5.1f", hi);
    else
      std::snprintf(label, sizeof label, "[%5.1f,%5.1f)", lo + (i - 1) * width, lo + i * width);
    const std::size_t bar = (counts[i] * 50 + peak - 1) / peak;
    out << label << " " << std::string(bar, '#') << " " << counts[i] << "\n";
  }
}

int cmd_stat_extract(const Config& cfg, std::ostream& out) {
  const auto params = make_params(cfg);
  const stat::Carrier carrier = load_carrier(cfg);
  const Bytes key = parse_key(cfg.key);
  const auto stats = stat::block_statistics(carrier, key, cfg.bits, params);
  if (stats.empty()) return kOk;

  std::string bits;
  for (const auto& s : stats) bits.push_back(stat::detect_bit(s, params) ? '1' : '0');
  if (cfg.csv) {
    out << "block,q,mean_c,mean_d,sigma_hat,bit\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
      char line[160];
      std::snprintf(line, sizeof line, "%zu,%s,%.6f,%.6f,%.6f,%c\n", i, format_q(stats[i].q).c_str(),
                    stats[i].mean_c, stats[i].mean_d, stats[i].sigma_hat, bits[i]);
      out << line;
    }
  } else {
    out << "bits: " << bits << "\n";
    out << "z_alpha: " << format_q(params.z_alpha) << " (alpha " << params.alpha << ")\n";
    for (std::size_t i = 0; i < stats.size(); ++i)
      out << "block " << i << " q=" << format_q(stats[i].q) << " bit=" << bits[i] << "\n";
  }
  if (cfg.hist) print_histogram(stats, params.z_alpha, out);
  return kOk;
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientSlack: return kInsufficientSlack;
    case ErrorCode::SlackOccupied: return kSlackOccupied;
    case ErrorCode::NoPayload: return kNoPayload;
    case ErrorCode::CorruptPayload: return kCorruptPayload;
    case ErrorCode::CarrierTooSmall: return kCarrierTooSmall;
    case ErrorCode::IoFailure: return kIoFailure;
    case ErrorCode::NotMz:
    case ErrorCode::NotPe:
    case ErrorCode::Truncated:
    case ErrorCode::Not32Bit:
    case ErrorCode::StrictViolation:
    case ErrorCode::ParseFailure:
    case ErrorCode::BadCarrier: return kBadInput;
    default: return kUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hide payloads in PE header slack; statistical block embedding for 8-bit carriers", "pestego"};
  app.require_subcommand(1);
  Config cfg;

  auto add_pe_common = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.inputs, "input PE file")->required()->expected(1);
    sub->add_flag("--strict", cfg.strict, "treat layout warnings as errors");
  };
  auto add_stat_common = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.inputs, "carrier (binary PGM, or raw grid with --size)")->required()->expected(1);
    sub->add_option("--key", cfg.key, "stego key: text, or 0x-prefixed hex")->required();
    sub->add_option("--alpha", cfg.alpha, "significance level")->capture_default_str();
    sub->add_option("--k", cfg.k, "additive strength")->capture_default_str();
    sub->add_option("--block", cfg.block, "block size WxH")->capture_default_str();
    sub->add_option("--size", cfg.size, "raw carrier dimensions WxH (input is headerless)");
  };

  auto* inspect = app.add_subcommand("inspect", "print headers, section table and slack regions");
  add_pe_common(inspect);

  auto* cap = app.add_subcommand("capacity", "report usable header slack for a payload name");
  add_pe_common(cap);
  cap->add_option("--name", cfg.name, "payload name");
  cap->add_option("--payload", cfg.payload, "payload file (its file name is used when --name is absent)");

  auto* embed = app.add_subcommand("embed", "hide a file in the header slack");
  add_pe_common(embed);
  embed->add_option("--payload", cfg.payload, "file to hide")->required();
  embed->add_option("--out", cfg.output, "stego output file")->required();
  embed->add_option("--name", cfg.name, "name to store (default: payload file name)");
  embed->add_flag("--force", cfg.force, "overwrite non-zero slack or an earlier payload");

  auto* extract = app.add_subcommand("extract", "recover a hidden file");
  add_pe_common(extract);
  extract->add_option("--out", cfg.output, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "compare a cover file with its stego file");
  verify->add_option("--in", cfg.inputs, "cover file, then stego file")->required()->expected(2);
  verify->add_option("--out", cfg.output, "write the structured report here");

  auto* sembed = app.add_subcommand("stat-embed", "embed message bits into carrier blocks");
  add_stat_common(sembed);
  sembed->add_option("--payload", cfg.payload, "message file: '0'/'1' text, or bytes (MSB first)")->required();
  sembed->add_option("--out", cfg.output, "output carrier")->required();

  auto* sextract = app.add_subcommand("stat-extract", "detect message bits from carrier blocks");
  add_stat_common(sextract);
  sextract->add_option("--bits", cfg.bits, "number of bits to read")->required();
  sextract->add_flag("--csv", cfg.csv, "per-block statistics as CSV");
  sextract->add_flag("--hist", cfg.hist, "append a character-cell histogram of q");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(cfg, out);
    if (cap->parsed()) return cmd_capacity(cfg, out);
    if (embed->parsed()) return cmd_embed(cfg, out);
    if (extract->parsed()) return cmd_extract(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (sembed->parsed()) return cmd_stat_embed(cfg, out);
    if (sextract->parsed()) return cmd_stat_extract(cfg, out);
  } catch (const InputFailure& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_for(e.code());
  }
  return kUsage;
}

}  // namespace pestego::cli
