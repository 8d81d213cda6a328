#include "run_context.hpp"

#include <fstream>
#include <sstream>

#include "qpic/error.hpp"

namespace qpic::cli {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[k] = digits[v & 0xf];
  return s;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

RunContext::RunContext(std::string command, std::filesystem::path out_dir, bool gnuplot)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), gnuplot_(gnuplot) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec || !std::filesystem::is_directory(out_dir_)) {
    throw ValidationError("cannot create output directory " + out_dir_.string());
  }
}

void RunContext::argument(const std::string& key, nlohmann::json value) {
  arguments_[key] = std::move(value);
}

void RunContext::input(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  inputs_.push_back({{"path", path.generic_string()},
                     {"bytes", bytes.size()},
                     {"fnv1a", hex64(fnv1a(bytes))}});
}

void RunContext::summary(const std::string& key, nlohmann::json value) {
  summary_[key] = std::move(value);
}

void RunContext::write_text(const std::string& name, const std::string& text) {
  const auto path = out_dir_ / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
  outputs_.push_back({{"file", name}, {"bytes", text.size()}, {"fnv1a", hex64(fnv1a(text))}});
}

void RunContext::write_csv(const std::string& name, const CsvTable& table) {
  write_text(name, table.str());
}

void RunContext::plot(const std::string& csv, const std::string& x,
                      const std::string& y, const std::string& title) {
  std::ostringstream os;
  os << "set title \"" << title << "\"\n"
     << "set xlabel \"" << x << "\"\nset ylabel \"" << y << "\"\n"
     << "plot \"" << csv << "\" using \"" << x << "\":\"" << y
     << "\" with linespoints notitle\npause -1\n";
  plots_.push_back(os.str());
}

void RunContext::finish() {
  if (gnuplot_ && !plots_.empty()) {
    std::string script = "set datafile separator \",\"\nset key autotitle columnhead\n";
    for (const auto& p : plots_) script += "\n" + p;
    write_text(command_ + ".gp", script);
  }
  nlohmann::json manifest = {
      {"tool", "qpic"},
      {"version", QPIC_VERSION},
      {"command", command_},
      {"arguments", arguments_},
      {"inputs", inputs_},
      {"outputs", outputs_},
      {"summary", summary_},
  };
  const std::string text = manifest.dump(2) + "\n";
  const auto path = out_dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

}  // namespace qpic::cli
