#include "csib/config.hpp"

#include <algorithm>
#include <sstream>

#include "csib/util.hpp"

namespace csib {

std::vector<std::size_t> TrainConfig::stage1_decay_steps() const {
  return {stage1_iters / 2, stage1_iters * 3 / 4};
}

std::vector<std::size_t> TrainConfig::stage3_decay_steps() const {
  return {stage3_iters / 5, stage3_iters * 2 / 5, stage3_iters * 3 / 5};
}

std::vector<std::size_t> TrainConfig::resolved_k_set() const {
  std::vector<std::size_t> ks = k_set;
  if (ks.empty())
    for (std::size_t k = 1; k <= std::min<std::size_t>(8, num_groups); ++k)
      ks.push_back(k);
  if (std::find(ks.begin(), ks.end(), num_groups) == ks.end())
    ks.push_back(num_groups);
  return ks;
}

std::size_t TrainConfig::resolved_k_eval() const {
  return k_eval == 0 ? num_groups : k_eval;
}

void TrainConfig::validate() const {
  require(num_groups >= 2, "config: num_groups must be >= 2");
  require(attr_batch >= 1 && task_batch >= 1, "config: batch sizes must be >= 1");
  require(pretrain_batch >= 2, "config: pretrain_batch must be >= 2");
  require(stage1_lr > 0 && stage2_lr > 0 && stage3_lr > 0,
          "config: learning rates must be positive");
  require(decay_factor > 1.0, "config: decay_factor must be > 1");
  require(momentum >= 0.0 && momentum < 1.0, "config: momentum must be in [0,1)");
  require(lambda > 0.0, "config: lambda must be positive");
  require(eps > 0.0 && eps <= 1e-3, "config: eps must be in (0, 1e-3]");
  require(log_interval >= 1, "config: log_interval must be >= 1");
  for (std::size_t k : k_set)
    require(k >= 1 && k <= num_groups,
            "config: k_set values must be in [1, num_groups]");
  require(k_eval <= num_groups, "config: k_eval must be <= num_groups");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::size_t> parse_k_list(const std::string& value,
                                      const std::string& where) {
  std::vector<std::size_t> ks;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const long k = parse_long(item, where);
    require(k >= 1, where + ": k values must be >= 1");
    ks.push_back(static_cast<std::size_t>(k));
  }
  return ks;
}

}  // namespace

TrainConfig config_from_string(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "config line " + std::to_string(line_no);
    const std::size_t eq = line.find('=');
    require(eq != std::string::npos, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty() && !value.empty(), where + ": empty key or value");

    if (key == "num_groups")
      cfg.num_groups = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "k_set")
      cfg.k_set = parse_k_list(value, where);
    else if (key == "k_eval")
      cfg.k_eval = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "stage1_iters")
      cfg.stage1_iters = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "stage2_iters")
      cfg.stage2_iters = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "stage3_iters")
      cfg.stage3_iters = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "attr_batch")
      cfg.attr_batch = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "task_batch")
      cfg.task_batch = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "pretrain_batch")
      cfg.pretrain_batch = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "stage1_lr")
      cfg.stage1_lr = parse_double(value, where);
    else if (key == "stage2_lr")
      cfg.stage2_lr = parse_double(value, where);
    else if (key == "stage3_lr")
      cfg.stage3_lr = parse_double(value, where);
    else if (key == "decay_factor")
      cfg.decay_factor = parse_double(value, where);
    else if (key == "momentum")
      cfg.momentum = parse_double(value, where);
    else if (key == "lambda")
      cfg.lambda = parse_double(value, where);
    else if (key == "eps")
      cfg.eps = parse_double(value, where);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_long(value, where));
    else if (key == "log_interval")
      cfg.log_interval = static_cast<std::size_t>(parse_long(value, where));
    else if (key == "loff_variant") {
      if (value == "prose")
        cfg.loff_variant = LoffVariant::kProse;
      else if (value == "literal")
        cfg.loff_variant = LoffVariant::kLiteral;
      else
        throw std::runtime_error(where + ": loff_variant must be prose|literal");
    } else if (key == "topk_rule") {
      if (value == "magnitude")
        cfg.topk_rule = TopkRule::kMagnitude;
      else if (value == "signed")
        cfg.topk_rule = TopkRule::kSigned;
      else
        throw std::runtime_error(where + ": topk_rule must be magnitude|signed");
    } else {
      throw std::runtime_error(where + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_config(const std::string& path) {
  return config_from_string(read_file(path));
}

std::string config_to_string(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "num_groups = " << cfg.num_groups << '\n';
  out << "k_set = ";
  const auto ks = cfg.resolved_k_set();
  for (std::size_t i = 0; i < ks.size(); ++i) out << (i ? "," : "") << ks[i];
  out << '\n';
  out << "k_eval = " << cfg.resolved_k_eval() << '\n';
  out << "stage1_iters = " << cfg.stage1_iters << '\n';
  out << "stage2_iters = " << cfg.stage2_iters << '\n';
  out << "stage3_iters = " << cfg.stage3_iters << '\n';
  out << "attr_batch = " << cfg.attr_batch << '\n';
  out << "task_batch = " << cfg.task_batch << '\n';
  out << "pretrain_batch = " << cfg.pretrain_batch << '\n';
  out << "stage1_lr = " << format_double(cfg.stage1_lr) << '\n';
  out << "stage2_lr = " << format_double(cfg.stage2_lr) << '\n';
  out << "stage3_lr = " << format_double(cfg.stage3_lr) << '\n';
  out << "decay_factor = " << format_double(cfg.decay_factor) << '\n';
  out << "momentum = " << format_double(cfg.momentum) << '\n';
  out << "lambda = " << format_double(cfg.lambda) << '\n';
  out << "eps = " << format_double(cfg.eps) << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "log_interval = " << cfg.log_interval << '\n';
  out << "loff_variant = "
      << (cfg.loff_variant == LoffVariant::kProse ? "prose" : "literal") << '\n';
  out << "topk_rule = "
      << (cfg.topk_rule == TopkRule::kMagnitude ? "magnitude" : "signed") << '\n';
  return out.str();
}

}  // namespace csib
