#include "csib/dataset.hpp"

#include <fstream>
#include <sstream>

#include "csib/util.hpp"

namespace csib {

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  throw std::logic_error("split_name: bad enum value");
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::runtime_error("unknown split tag '" + name + "'");
}

std::vector<std::size_t> Dataset::attribute_labeled_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].attribute_labels) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::target_labeled_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].target) out.push_back(i);
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string where = "sample " + std::to_string(i);
    require(s.features.size() == feature_dim, where + ": feature dim mismatch");
    require(s.attribute_labels.has_value() || s.target.has_value(),
            where + ": needs attribute labels or a target");
    if (s.attribute_labels) {
      require(s.attribute_labels->size() == attribute_dim,
              where + ": attribute dim mismatch");
      for (auto v : *s.attribute_labels)
        require(v == 0 || v == 1, where + ": attribute labels must be 0/1");
    }
    if (s.target)
      require(s.target->size() == target_dim, where + ": target dim mismatch");
  }
}

void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  std::ostringstream out;
  out << "#csib-dataset F=" << ds.feature_dim << " A=" << ds.attribute_dim
      << " Y=" << ds.target_dim << "\n";
  const std::string tag = split_name(ds.split);
  for (const auto& s : ds.samples) {
    out << tag;
    for (double f : s.features) out << ',' << format_double(f);
    if (s.attribute_labels) {
      for (auto v : *s.attribute_labels) out << ',' << int(v);
    } else {
      out << ",_";
    }
    if (s.target) {
      for (double t : *s.target) out << ',' << format_double(t);
    } else {
      out << ",_";
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_dataset: cannot open '" + path + "'");

  std::string header;
  require(static_cast<bool>(std::getline(in, header)),
          "load_dataset: '" + path + "' is empty");
  std::size_t f = 0, a = 0, y = 0;
  if (std::sscanf(header.c_str(), "#csib-dataset F=%zu A=%zu Y=%zu", &f, &a, &y) != 3)
    throw std::runtime_error("load_dataset: bad header in '" + path + "'");

  Dataset ds;
  ds.feature_dim = f;
  ds.attribute_dim = a;
  ds.target_dim = y;

  bool split_set = false;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    const auto fields = split_fields(line);
    std::size_t pos = 0;
    auto next = [&]() -> const std::string& {
      require(pos < fields.size(), where + ": row too short");
      return fields[pos++];
    };

    SampleRecord rec;
    const Split row_split = split_from_name(next());
    if (!split_set) {
      ds.split = row_split;
      split_set = true;
    } else {
      require(row_split == ds.split, where + ": mixed split tags in one file");
    }

    rec.features.reserve(f);
    for (std::size_t i = 0; i < f; ++i)
      rec.features.push_back(parse_double(next(), where));

    if (pos < fields.size() && fields[pos] == "_") {
      ++pos;
    } else {
      std::vector<std::uint8_t> labels;
      labels.reserve(a);
      for (std::size_t i = 0; i < a; ++i) {
        long v = parse_long(next(), where);
        require(v == 0 || v == 1, where + ": attribute label must be 0 or 1");
        labels.push_back(static_cast<std::uint8_t>(v));
      }
      rec.attribute_labels = std::move(labels);
    }

    if (pos < fields.size() && fields[pos] == "_") {
      ++pos;
      require(rec.attribute_labels.has_value(),
              where + ": row has neither attribute labels nor target");
    } else {
      Vector target;
      target.reserve(y);
      for (std::size_t i = 0; i < y; ++i)
        target.push_back(parse_double(next(), where));
      rec.target = std::move(target);
    }

    require(pos == fields.size(), where + ": row has wrong arity");
    ds.samples.push_back(std::move(rec));
  }
  require(!ds.samples.empty(), "load_dataset: no samples in '" + path + "'");
  ds.validate();
  return ds;
}

}  // namespace csib
