#include "ttcov/bench.hpp"
#include "ttcov/errors.hpp"
#include "ttcov/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ttcov {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + value + "'");
}

template <typename F>
auto rethrow_as_config(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += items[i];
  }
  return out;
}

}  // namespace

void BenchConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (iterations < 0) throw ConfigError("config: iterations must be >= 0");
  if (prls_grid < 2) throw ConfigError("config: prls_grid must be >= 2");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (!(omega > 0.0)) throw ConfigError("config: omega must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: delta must be in (0, 1)");
  if (shape.p < 1 || shape.q < 1 || shape.r < 1) throw ConfigError("config: p, q, r must be >= 1");
  if (output.empty()) throw ConfigError("config: output path is empty");
  if (methods.empty()) throw ConfigError("config: no methods listed");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw ConfigError("config: duplicate method");
  }
  if (mode == BenchMode::covariance) {
    if (sample_sizes.empty()) throw ConfigError("config: sample_sizes is empty");
    for (Index n : sample_sizes) {
      if (n < 1) throw ConfigError("config: sample sizes must be >= 1");
    }
  } else {
    if (noise_sigmas.empty()) throw ConfigError("config: noise_sigmas is empty");
    for (double s : noise_sigmas) {
      if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("config: noise sigmas must be finite and >= 0");
    }
  }
  const auto dims = shape.tensor_dims();
  if (rank_j < 1 || rank_j > std::min(dims[0], dims[1] * dims[2])) {
    throw ConfigError("config: J out of range for the shape");
  }
  if (rank_k < 1 || rank_k > std::min(dims[2], rank_j * dims[1])) {
    throw ConfigError("config: K out of range for the shape");
  }
  for (Method m : methods) {
    if ((m == Method::tucker || m == Method::tucker_hooi) && !enable_tucker) {
      throw ConfigError("config: method '" + std::string(method_name(m)) +
                        "' requires enable_tucker = true");
    }
  }
  if (svd.oversample < 0 || svd.power_iters < 0) {
    throw ConfigError("config: oversample and power_iters must be >= 0");
  }
  if (decay.kind == DecayKind::exponential && !(decay.rate > 0.0)) {
    throw ConfigError("config: decay_rate must be > 0");
  }
}

std::filesystem::path BenchConfig::json_path() const {
  if (!json_output.empty()) return json_output;
  std::filesystem::path p = output;
  p.replace_extension(".json");
  return p;
}

BenchConfig parse_config(std::string_view text) {
  BenchConfig c;
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  const auto version = kv.find("schema_version");
  if (version == kv.end()) throw ConfigError("config: missing schema_version");
  if (parse_number<int>("schema_version", version->second) != kConfigSchema) {
    throw ConfigError("config: unsupported schema_version " + version->second);
  }
  kv.erase(version);

  for (const auto& [key, value] : kv) {
    if (key == "mode") {
      if (value == "covariance") c.mode = BenchMode::covariance;
      else if (value == "tensor") c.mode = BenchMode::tensor;
      else throw ConfigError("config: mode must be covariance or tensor");
    } else if (key == "p") {
      c.shape.p = parse_number<Index>(key, value);
    } else if (key == "q") {
      c.shape.q = parse_number<Index>(key, value);
    } else if (key == "r") {
      c.shape.r = parse_number<Index>(key, value);
    } else if (key == "J") {
      c.rank_j = parse_number<Index>(key, value);
    } else if (key == "K") {
      c.rank_k = parse_number<Index>(key, value);
    } else if (key == "sample_sizes") {
      c.sample_sizes.clear();
      for (const auto& s : split_list(value)) c.sample_sizes.push_back(parse_number<Index>(key, s));
    } else if (key == "noise_sigmas") {
      c.noise_sigmas.clear();
      for (const auto& s : split_list(value)) c.noise_sigmas.push_back(parse_number<double>(key, s));
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& s : split_list(value)) {
        c.methods.push_back(rethrow_as_config(key, [&] { return parse_method(s); }));
      }
    } else if (key == "iterations") {
      c.iterations = parse_number<int>(key, value);
    } else if (key == "trials") {
      c.trials = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "decay") {
      c.decay.kind = rethrow_as_config(key, [&] { return parse_decay(value); });
    } else if (key == "decay_rate") {
      c.decay.rate = parse_number<double>(key, value);
    } else if (key == "svd") {
      if (value == "exact") c.svd.method = SvdMethod::exact;
      else if (value == "randomized") c.svd.method = SvdMethod::randomized;
      else throw ConfigError("config: svd must be exact or randomized");
    } else if (key == "oversample") {
      c.svd.oversample = parse_number<Index>(key, value);
    } else if (key == "power_iters") {
      c.svd.power_iters = parse_number<int>(key, value);
    } else if (key == "init") {
      c.init = rethrow_as_config(key, [&] { return parse_init(value); });
    } else if (key == "prls_grid") {
      c.prls_grid = parse_number<int>(key, value);
    } else if (key == "enable_tucker") {
      c.enable_tucker = parse_bool(key, value);
    } else if (key == "psd_projection") {
      c.psd_projection = parse_bool(key, value);
    } else if (key == "sin_theta") {
      c.sin_theta = parse_bool(key, value);
    } else if (key == "diagnostics") {
      c.diagnostics = parse_bool(key, value);
    } else if (key == "omega") {
      c.omega = parse_number<double>(key, value);
    } else if (key == "delta") {
      c.delta = parse_number<double>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<int>(key, value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "json_output") {
      c.json_output = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

BenchConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_file(path));
  } catch (const IoError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string format_config(const BenchConfig& c) {
  std::vector<std::string> sizes;
  for (Index n : c.sample_sizes) sizes.push_back(std::to_string(n));
  std::vector<std::string> sigmas;
  for (double s : c.noise_sigmas) sigmas.push_back(format_double(s));
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(method_name(m));
  auto b = [](bool v) { return v ? "true" : "false"; };

  std::ostringstream out;
  out << "schema_version = " << kConfigSchema << '\n'
      << "mode = " << (c.mode == BenchMode::covariance ? "covariance" : "tensor") << '\n'
      << "p = " << c.shape.p << '\n'
      << "q = " << c.shape.q << '\n'
      << "r = " << c.shape.r << '\n'
      << "J = " << c.rank_j << '\n'
      << "K = " << c.rank_k << '\n'
      << "sample_sizes = " << join(sizes) << '\n'
      << "noise_sigmas = " << join(sigmas) << '\n'
      << "methods = " << join(methods) << '\n'
      << "iterations = " << c.iterations << '\n'
      << "trials = " << c.trials << '\n'
      << "seed = " << c.seed << '\n'
      << "decay = " << decay_name(c.decay.kind) << '\n'
      << "decay_rate = " << format_double(c.decay.rate) << '\n'
      << "svd = " << (c.svd.method == SvdMethod::exact ? "exact" : "randomized") << '\n'
      << "oversample = " << c.svd.oversample << '\n'
      << "power_iters = " << c.svd.power_iters << '\n'
      << "init = " << init_name(c.init) << '\n'
      << "prls_grid = " << c.prls_grid << '\n'
      << "enable_tucker = " << b(c.enable_tucker) << '\n'
      << "psd_projection = " << b(c.psd_projection) << '\n'
      << "sin_theta = " << b(c.sin_theta) << '\n'
      << "diagnostics = " << b(c.diagnostics) << '\n'
      << "omega = " << format_double(c.omega) << '\n'
      << "delta = " << format_double(c.delta) << '\n'
      << "threads = " << c.threads << '\n'
      << "output = " << c.output.string() << '\n';
  if (!c.json_output.empty()) out << "json_output = " << c.json_output.string() << '\n';
  return out.str();
}

}  // namespace ttcov
