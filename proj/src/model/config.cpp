#include "grnet/model/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "grnet/error.hpp"

namespace grnet::model {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw Error(ErrorCode::kInvalidConfig, "bad value for " + key + ": '" + text + "'");
  return value;
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (embedding_dim == 0 || hidden_size == 0 || batch_size == 0) fail("counts must be at least 1");
  if (!(dropout >= 0.0 && dropout <= 0.5)) fail("dropout must be in [0, 0.5]");
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout <= 0.5)) fail("recurrent_dropout must be in [0, 0.5]");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) fail("validation_fraction must be in [0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
}

ModelConfig parse_config(std::istream& in, ModelConfig c) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "embedding_dim") c.embedding_dim = parse_number<std::size_t>(key, value);
    else if (key == "hidden_size") c.hidden_size = parse_number<std::size_t>(key, value);
    else if (key == "dropout") c.dropout = parse_number<double>(key, value);
    else if (key == "recurrent_dropout") c.recurrent_dropout = parse_number<double>(key, value);
    else if (key == "batch_size") c.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
    else if (key == "epochs") c.epochs = parse_number<std::size_t>(key, value);
    else if (key == "validation_fraction") c.validation_fraction = parse_number<double>(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, value);
    else throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ModelConfig load_config(const std::filesystem::path& path, ModelConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  return parse_config(in, base);
}

std::string to_text(const ModelConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "embedding_dim = " << c.embedding_dim << "\n"
      << "hidden_size = " << c.hidden_size << "\n"
      << "dropout = " << c.dropout << "\n"
      << "recurrent_dropout = " << c.recurrent_dropout << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "learning_rate = " << c.learning_rate << "\n"
      << "epochs = " << c.epochs << "\n"
      << "validation_fraction = " << c.validation_fraction << "\n"
      << "rng_seed = " << c.rng_seed << "\n";
  return out.str();
}

}  // namespace grnet::model
