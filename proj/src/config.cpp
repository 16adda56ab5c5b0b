#include "bfpp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace bfpp {

namespace {

struct KeySpec {
  const char* name;
  const char* type;
  const char* help;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw ParseError("config key '" + key + "': value '" + value + "' " + why);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    bad_value(key, v, "is not a number");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    bad_value(key, v, "is not an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  bad_value(key, v, "is not on/off");
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : v) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ",";
    os << xs[i];
  }
  return os.str();
}

std::string fmt_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

const std::vector<KeySpec>& schema() {
  auto int_key = [](const char* name, const char* help, int Config::* field, long long lo,
                    long long hi) {
    return KeySpec{name, "int", help,
                   [field, lo, hi, name](Config& c, const std::string& v) {
                     const long long x = parse_int(name, v);
                     if (x < lo || x > hi)
                       bad_value(name, v,
                                 "out of range [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
                     c.*field = static_cast<int>(x);
                   },
                   [field](const Config& c) { return std::to_string(c.*field); }};
  };
  auto real_key = [](const char* name, const char* help, double Config::* field, double lo,
                     double hi) {
    return KeySpec{name, "real", help,
                   [field, lo, hi, name](Config& c, const std::string& v) {
                     const double x = parse_real(name, v);
                     if (!(x >= lo) || !(x <= hi)) bad_value(name, v, "out of range");
                     c.*field = x;
                   },
                   [field](const Config& c) { return fmt_real(c.*field); }};
  };
  auto string_key = [](const char* name, const char* help, std::string Config::* field,
                       std::vector<std::string> allowed) {
    return KeySpec{name, "string", help,
                   [field, allowed, name](Config& c, const std::string& v) {
                     if (!allowed.empty() &&
                         std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                       bad_value(name, v, "must be one of: " + join(allowed));
                     c.*field = v;
                   },
                   [field](const Config& c) { return c.*field; }};
  };
  auto real_list_key = [](const char* name, const char* help,
                          std::vector<double> Config::* field) {
    return KeySpec{name, "real list", help,
                   [field, name](Config& c, const std::string& v) {
                     std::vector<double> xs;
                     for (const std::string& tok : split_commas(v))
                       xs.push_back(parse_real(name, tok));
                     c.*field = std::move(xs);
                   },
                   [field](const Config& c) { return join(c.*field); }};
  };

  static const std::vector<KeySpec> keys = {
      string_key("dataset", "event file path (written by simulate, read by train/evaluate)",
                 &Config::dataset, {}),
      int_key("num_marks", "number of event types M", &Config::num_marks, 1, 1 << 20),
      real_key("train_frac", "training split fraction", &Config::train_frac, 1e-9, 1.0),
      real_key("val_frac", "validation split fraction", &Config::val_frac, 1e-9, 1.0),
      real_key("test_frac", "test split fraction", &Config::test_frac, 1e-9, 1.0),
      int_key("embed_dim", "history embedding dimension D (usual sweep: 8/16/32)",
              &Config::embed_dim, 2, 4096),
      int_key("layers", "encoder attention layers (usual sweep: 1/2/3)", &Config::layers, 1, 64),
      real_key("sigma1", "terminal noise scale of the interval schedule", &Config::sigma1, 1e-12,
               0.999999),
      real_key("beta1", "total accuracy budget of the mark schedule", &Config::beta1, 1e-12,
               1e12),
      int_key("steps", "sampler / discretized-loss steps K", &Config::steps, 1, 1000000),
      int_key("epochs", "training epochs", &Config::epochs, 1, 1000000),
      real_key("lr", "learning rate", &Config::lr, 1e-300, 1e6),
      KeySpec{"joint_noise", "bool", "correlate interval and mark noise (on/off)",
              [](Config& c, const std::string& v) { c.joint_noise = parse_bool("joint_noise", v); },
              [](const Config& c) { return c.joint_noise ? std::string("on") : std::string("off"); }},
      KeySpec{"seed", "uint", "base RNG seed",
              [](Config& c, const std::string& v) {
                c.seed = static_cast<uint64_t>(parse_int("seed", v));
              },
              [](const Config& c) { return std::to_string(c.seed); }},
      KeySpec{"seeds", "uint list", "evaluation seeds (mean and SD reported)",
              [](Config& c, const std::string& v) {
                c.seeds.clear();
                for (const std::string& tok : split_commas(v))
                  c.seeds.push_back(static_cast<uint64_t>(parse_int("seeds", tok)));
              },
              [](const Config& c) { return join(c.seeds); }},
      int_key("crps_samples", "samples per event for CRPS and point prediction",
              &Config::crps_samples, 1, 1000000),
      string_key("point", "point-prediction rule", &Config::point, {"median", "mean"}),
      string_key("flow_variance", "interval flow variance: gamma(1-gamma) or the tau(1-gamma) "
                 "printed form", &Config::flow_variance, {"standard", "paper"}),
      string_key("out", "output directory", &Config::out, {}),
      string_key("optimizer", "gradient step rule", &Config::optimizer, {"sgd", "adam"}),
      int_key("mc_samples", "Monte Carlo draws per loss term", &Config::mc_samples, 1, 10000),
      int_key("batch_size", "sequences per gradient step", &Config::batch_size, 1, 1000000),
      int_key("threads", "worker threads (1 = serial)", &Config::threads, 1, 4096),
      int_key("checkpoint_every", "save a checkpoint every N epochs (0 = end only)",
              &Config::checkpoint_every, 0, 1000000),
      int_key("vlb_every", "log the variational bound every N epochs (0 = never)",
              &Config::vlb_every, 0, 1000000),
      int_key("sample_draws", "draws per event emitted by the sample command",
              &Config::sample_draws, 1, 1000000),
      real_list_key("hawkes_base_rates", "per-mark base intensities",
                    &Config::hawkes_base_rates),
      real_list_key("hawkes_excitation", "row-major M x M excitation matrix",
                    &Config::hawkes_excitation),
      real_key("hawkes_decay", "exponential kernel decay", &Config::hawkes_decay, 1e-12, 1e12),
      real_key("hawkes_horizon", "simulation horizon", &Config::hawkes_horizon, 1e-12, 1e12),
      real_list_key("hawkes_coupling", "per-mark interval multipliers (empty = none)",
                    &Config::hawkes_coupling),
      int_key("hawkes_sequences", "number of simulated sequences", &Config::hawkes_sequences, 1,
              100000000),
  };
  return keys;
}

size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string stripped = line;
    if (const size_t hash = stripped.find('#'); hash != std::string::npos)
      stripped.resize(hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto& keys = schema();
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&key](const KeySpec& k) { return key == k.name; });
    if (it == keys.end()) {
      size_t best = SIZE_MAX;
      const char* suggestion = nullptr;
      for (const KeySpec& k : keys) {
        const size_t d = edit_distance(key, k.name);
        if (d < best) {
          best = d;
          suggestion = k.name;
        }
      }
      std::string msg = where + ": unknown key '" + key + "'";
      if (suggestion && best <= std::max<size_t>(2, key.size() / 2))
        msg += " (did you mean '" + std::string(suggestion) + "'?)";
      throw ParseError(msg);
    }
    try {
      it->set(c, value);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return c;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_echo(const Config& c) {
  std::ostringstream os;
  for (const KeySpec& k : schema()) os << k.name << " = " << k.get(c) << "\n";
  return os.str();
}

std::string print_schema() {
  std::ostringstream os;
  const Config defaults;
  os << "# configuration keys (key = value per line, # comments)\n";
  for (const KeySpec& k : schema()) {
    std::string d = k.get(defaults);
    if (d.empty()) d = "(empty)";
    os << k.name << "  [" << k.type << ", default " << d << "]\n    " << k.help << "\n";
  }
  return os.str();
}

TrainConfig Config::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.lr = lr;
  t.k_steps = steps;
  t.sigma1 = sigma1;
  t.beta1 = beta1;
  t.joint_noise = joint_noise;
  t.mc_samples = mc_samples;
  t.seed = seed;
  t.batch_size = batch_size;
  t.dim = embed_dim;
  t.layers = layers;
  t.optimizer = optimizer == "adam" ? Optimizer::kAdam : Optimizer::kSgd;
  t.flow_variance = flow_variance == "paper" ? FlowVariance::kPaperForm : FlowVariance::kStandard;
  t.vlb_every = vlb_every;
  return t;
}

SampleConfig Config::sample_config() const {
  SampleConfig s;
  s.k_steps = steps;
  s.num_samples = crps_samples;
  s.seed = seed;
  s.joint_noise = joint_noise;
  s.point = point == "mean" ? PointRule::kMean : PointRule::kMedian;
  return s;
}

HawkesSpec Config::hawkes_spec() const {
  HawkesSpec h;
  h.num_marks = num_marks;
  h.base_rates = hawkes_base_rates;
  h.decay = hawkes_decay;
  h.horizon = hawkes_horizon;
  h.coupling_scales = hawkes_coupling.empty() ? std::vector<double>(num_marks, 1.0)
                                              : hawkes_coupling;
  h.excitation.assign(num_marks, std::vector<double>(num_marks, 0.0));
  if (static_cast<int>(hawkes_excitation.size()) == num_marks * num_marks) {
    for (int i = 0; i < num_marks; ++i)
      for (int j = 0; j < num_marks; ++j)
        h.excitation[i][j] = hawkes_excitation[i * num_marks + j];
  } else if (hawkes_excitation.size() == 1) {
    for (int i = 0; i < num_marks; ++i)
      for (int j = 0; j < num_marks; ++j) h.excitation[i][j] = hawkes_excitation[0];
  } else {
    throw ParseError("hawkes_excitation must have 1 or M*M entries");
  }
  return h;
}

std::vector<std::string> Config::warnings() const {
  std::vector<std::string> w;
  if (embed_dim != 8 && embed_dim != 16 && embed_dim != 32)
    w.push_back("embed_dim " + std::to_string(embed_dim) + " is outside the usual {8,16,32} grid");
  if (layers < 1 || layers > 3)
    w.push_back("layers " + std::to_string(layers) + " is outside the usual {1,2,3} grid");
  return w;
}

}  // namespace bfpp
