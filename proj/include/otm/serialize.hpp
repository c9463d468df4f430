#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "otm/mlp.hpp"

namespace otm {

/// 17 significant digits: enough for any double to round-trip bit-exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt17_line(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += fmt17(values[i]);
  }
  return out;
}

/// Model file: a text header (dims, activation, seed) followed by one
/// row-major line per weight matrix and bias vector.
inline void save_model(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << "dims:";
  for (Index d : net.spec.dims()) out << ' ' << d;
  out << "\nactivation: " << activation_name(net.spec.activation);
  out << "\nseed: " << net.spec.seed << "\n";
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    out << fmt17_line(net.weights[k].data) << "\n";
    out << fmt17_line(net.biases[k].data) << "\n";
  }
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

namespace detail {
inline std::vector<double> parse_double_line(const std::string& line, std::size_t expected,
                                             const std::string& path) {
  std::vector<double> values;
  values.reserve(expected);
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p) {
    const double v = std::strtod(p, &end);
    if (end == p) break;
    values.push_back(v);
    p = end;
  }
  if (values.size() != expected)
    throw std::runtime_error("load_model: expected " + std::to_string(expected) +
                             " values per line in " + path + ", got " +
                             std::to_string(values.size()));
  return values;
}
}  // namespace detail

inline Mlp load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string line;

  if (!std::getline(in, line) || line.rfind("dims:", 0) != 0)
    throw std::runtime_error("load_model: missing dims header in " + path);
  std::istringstream dims_in(line.substr(5));
  std::vector<Index> dims;
  for (Index d; dims_in >> d;) dims.push_back(d);
  if (dims.size() < 2) throw std::runtime_error("load_model: need at least two dims in " + path);

  if (!std::getline(in, line) || line.rfind("activation:", 0) != 0)
    throw std::runtime_error("load_model: missing activation header in " + path);
  std::string act = line.substr(11);
  act.erase(0, act.find_first_not_of(' '));

  if (!std::getline(in, line) || line.rfind("seed:", 0) != 0)
    throw std::runtime_error("load_model: missing seed header in " + path);
  const std::uint64_t seed = std::stoull(line.substr(5));

  MlpSpec spec;
  spec.input_dim = dims.front();
  spec.output_dim = dims.back();
  spec.hidden_dims.assign(dims.begin() + 1, dims.end() - 1);
  spec.activation = activation_from_name(act);
  spec.seed = seed;
  spec.validate();

  Mlp net;
  net.spec = spec;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Index rows = dims[k + 1], cols = dims[k];
    if (!std::getline(in, line))
      throw std::runtime_error("load_model: truncated weight block in " + path);
    Tensor w({rows, cols},
             detail::parse_double_line(line, static_cast<std::size_t>(rows * cols), path));
    if (!w.all_finite()) throw std::runtime_error("load_model: non-finite weight in " + path);
    if (!std::getline(in, line))
      throw std::runtime_error("load_model: truncated bias block in " + path);
    Tensor b({rows}, detail::parse_double_line(line, static_cast<std::size_t>(rows), path));
    if (!b.all_finite()) throw std::runtime_error("load_model: non-finite bias in " + path);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

/// Minimal CSV emitter: header always written, '.' decimal point, ','
/// separator, no locale dependence (all numbers go through fmt17 or the
/// integer formatter).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace otm
