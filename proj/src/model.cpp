#include "csib/model.hpp"

#include <sstream>

#include "csib/rng.hpp"
#include "csib/util.hpp"

namespace csib {

namespace {

constexpr std::uint64_t kStreamGroupInit = 0xC0;
constexpr const char* kCheckpointVersion = "csib-v1";

}  // namespace

void CsibModel::validate() const {
  require(predictor.bias.size() == predictor.num_attributes(),
          "CsibModel: predictor bias dimension mismatch");
  require(grouping.num_attributes() == predictor.num_attributes(),
          "CsibModel: grouping/predictor attribute dimension mismatch");
  require(output.num_groups() == grouping.num_groups(),
          "CsibModel: output/grouping group dimension mismatch");
  grouping.validate();
  output.validate();
  predictor.weights.check_finite("predictor weights");
  check_finite(predictor.bias, "predictor bias");
  output.w.check_finite("output weights");
  check_finite(output.bias, "output bias");
}

CsibModel make_model(std::size_t feature_dim, std::size_t num_attributes,
                     std::size_t num_groups, std::size_t num_outputs,
                     std::uint64_t seed) {
  require(feature_dim >= 1 && num_attributes >= 1 && num_groups >= 1 &&
              num_outputs >= 1,
          "make_model: all dimensions must be >= 1");
  CsibModel model;
  model.predictor = AttributePredictor(num_attributes, feature_dim);
  Rng rng(derive_seed(seed, kStreamGroupInit));
  model.grouping = GroupingMatrix::random_init(num_groups, num_attributes, rng);
  model.output = OutputLayer(num_outputs, num_groups);
  model.meta.seed = seed;
  model.validate();
  return model;
}

Vector model_forward(const CsibModel& model, std::span<const double> features,
                     std::size_t k) {
  const Vector attrs = predict_attributes(model.predictor, features);
  const Vector z = group_forward(attrs, model.grouping, model.eps);
  return topk_forward(z, model.output, k).y;
}

namespace {

void write_values(std::ostringstream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << format_double(values[i]);
  }
  out << '\n';
}

void write_matrix(std::ostringstream& out, const std::string& name,
                  const Matrix& m) {
  out << name << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) write_values(out, m.row(r));
}

}  // namespace

std::string checkpoint_to_string(const CsibModel& model) {
  model.validate();
  std::ostringstream out;
  out << kCheckpointVersion << '\n';
  out << "dims " << model.feature_dim() << ' ' << model.num_attributes() << ' '
      << model.num_groups() << ' ' << model.num_outputs() << '\n';
  out << "eps " << format_double(model.eps) << '\n';
  out << "seed " << model.meta.seed << '\n';
  out << "stage " << model.meta.stage_completed << '\n';
  out << "iters " << model.meta.stage1_iterations << ' '
      << model.meta.stage2_iterations << ' ' << model.meta.stage3_iterations
      << '\n';
  out << "bias_initialized " << (model.meta.bias_initialized ? 1 : 0) << '\n';
  out << "topk_rule "
      << (model.output.rule == TopkRule::kMagnitude ? "magnitude" : "signed")
      << '\n';
  out << "k_set";
  for (std::size_t k : model.output.k_set) out << ' ' << k;
  out << '\n';
  out << "k_eval " << model.output.k_eval << '\n';
  write_matrix(out, "predictor_weights", model.predictor.weights);
  out << "predictor_bias\n";
  write_values(out, model.predictor.bias);
  write_matrix(out, "grouping", model.grouping.g);
  write_matrix(out, "output_weights", model.output.w);
  out << "output_bias\n";
  write_values(out, model.output.bias);
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : stream_(text) {}

  std::string next(const std::string& what) {
    std::string line;
    require(static_cast<bool>(std::getline(stream_, line)),
            "checkpoint: unexpected end of file while reading " + what);
    return line;
  }

  // Reads a "<key> <values...>" line and returns the value part.
  std::string keyed(const std::string& key) {
    const std::string line = next(key);
    require(line.rfind(key, 0) == 0, "checkpoint: expected '" + key +
                                         "' but found '" + line + "'");
    if (line.size() == key.size()) return "";
    require(line[key.size()] == ' ', "checkpoint: malformed '" + key + "' line");
    return line.substr(key.size() + 1);
  }

 private:
  std::istringstream stream_;
};

Vector parse_values(const std::string& line, std::size_t expect,
                    const std::string& what) {
  Vector out;
  out.reserve(expect);
  std::istringstream ss(line);
  std::string token;
  while (ss >> token) out.push_back(parse_double(token, "checkpoint " + what));
  require(out.size() == expect, "checkpoint: " + what + " expected " +
                                    std::to_string(expect) + " values, got " +
                                    std::to_string(out.size()));
  return out;
}

Matrix read_matrix(LineReader& reader, const std::string& name,
                   std::size_t rows, std::size_t cols) {
  const std::string header = reader.next(name);
  require(header == name,
          "checkpoint: expected block '" + name + "' but found '" + header + "'");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = parse_values(reader.next(name), cols, name);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

CsibModel checkpoint_from_string(const std::string& text) {
  LineReader reader(text);
  const std::string version = reader.next("version header");
  require(version == kCheckpointVersion,
          "checkpoint: version mismatch: expected '" +
              std::string(kCheckpointVersion) + "', found '" + version + "'");

  std::size_t f = 0, a = 0, z = 0, y = 0;
  {
    std::istringstream ss(reader.keyed("dims"));
    require(static_cast<bool>(ss >> f >> a >> z >> y), "checkpoint: bad dims line");
  }

  CsibModel model;
  model.eps = parse_double(reader.keyed("eps"), "eps");
  model.meta.seed = static_cast<std::uint64_t>(
      std::stoull(reader.keyed("seed")));
  model.meta.stage_completed =
      static_cast<int>(parse_long(reader.keyed("stage"), "stage"));
  {
    std::istringstream ss(reader.keyed("iters"));
    require(static_cast<bool>(ss >> model.meta.stage1_iterations >>
                              model.meta.stage2_iterations >>
                              model.meta.stage3_iterations),
            "checkpoint: bad iters line");
  }
  model.meta.bias_initialized =
      parse_long(reader.keyed("bias_initialized"), "bias_initialized") != 0;

  const std::string rule = reader.keyed("topk_rule");
  if (rule == "magnitude")
    model.output.rule = TopkRule::kMagnitude;
  else if (rule == "signed")
    model.output.rule = TopkRule::kSigned;
  else
    throw std::runtime_error("checkpoint: unknown topk_rule '" + rule + "'");

  {
    std::istringstream ss(reader.keyed("k_set"));
    std::size_t k;
    while (ss >> k) model.output.k_set.push_back(k);
  }
  model.output.k_eval = static_cast<std::size_t>(
      parse_long(reader.keyed("k_eval"), "k_eval"));

  model.predictor.weights = read_matrix(reader, "predictor_weights", a, f);
  reader.keyed("predictor_bias");
  model.predictor.bias = parse_values(reader.next("predictor_bias"), a,
                                      "predictor_bias");
  model.grouping.g = read_matrix(reader, "grouping", z, a);
  model.output.w = read_matrix(reader, "output_weights", y, z);
  reader.keyed("output_bias");
  model.output.bias = parse_values(reader.next("output_bias"), y, "output_bias");

  model.validate();
  return model;
}

void save_checkpoint(const CsibModel& model, const std::string& path) {
  atomic_write_file(path, checkpoint_to_string(model));
}

CsibModel load_checkpoint(const std::string& path) {
  return checkpoint_from_string(read_file(path));
}

}  // namespace csib
