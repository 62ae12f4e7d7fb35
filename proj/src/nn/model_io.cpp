#include "xaieval/nn/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xaieval/core/error.hpp"

namespace xaieval::nn {

namespace {

constexpr const char* kMagic = "XAIEVAL-MODEL";

// Hex floats print every bit of the mantissa, so the round trip is exact.
std::string hex(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%a", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

// Feature names may contain spaces (CICIDS-2017 headers do); they are stored
// percent-encoded so every name is a single whitespace-free token.
std::string encode_name(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (c == '%' || c <= ' ' || c == 0x7f) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out.empty() ? "%00" : out;
}

std::string decode_name(const std::string& token) {
  if (token == "%00") return {};
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '%') {
      out.push_back(token[i]);
      continue;
    }
    if (i + 2 >= token.size()) throw DecodeError("model file: bad escape in feature name");
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(token.data() + i + 1, token.data() + i + 3, value, 16);
    if (ec != std::errc() || ptr != token.data() + i + 3)
      throw DecodeError("model file: bad escape in feature name");
    out.push_back(static_cast<char>(value));
    i += 2;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string token(const char* what) {
    std::string t;
    if (!(in_ >> t)) throw DecodeError(std::string("model file truncated while reading ") + what);
    return t;
  }

  void expect(const std::string& keyword) {
    const std::string t = token(keyword.c_str());
    if (t != keyword) throw DecodeError("model file: expected '" + keyword + "', found '" + t + "'");
  }

  std::size_t count(const char* what) {
    const std::string t = token(what);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw DecodeError(std::string("model file: bad ") + what + " '" + t + "'");
    return v;
  }

  double real(const char* what) {
    const std::string t = token(what);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw DecodeError(std::string("model file: bad ") + what + " '" + t + "'");
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_model(const DenseNetwork& net, std::ostream& out) {
  net.validate();
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  out << "input_dim " << net.input_dim() << '\n';
  out << "num_classes " << net.num_classes() << '\n';
  out << "features";
  for (const auto& name : net.feature_names()) out << ' ' << encode_name(name);
  out << '\n';
  out << "layers " << net.layers().size() << '\n';
  for (const DenseLayer& layer : net.layers()) {
    out << "layer " << layer.in_dim << ' ' << layer.out_dim << ' ' << to_string(layer.activation)
        << '\n';
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      for (std::size_t i = 0; i < layer.in_dim; ++i)
        out << (i ? " " : "") << hex(layer.weight(j, i));
      out << '\n';
    }
    for (std::size_t j = 0; j < layer.out_dim; ++j) out << (j ? " " : "") << hex(layer.bias[j]);
    out << '\n';
  }
  out << "end\n";
}

DenseNetwork read_model(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  const std::size_t version = r.count("format version");
  if (version != static_cast<std::size_t>(kModelFormatVersion))
    throw DecodeError("model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  r.expect("input_dim");
  const std::size_t input_dim = r.count("input_dim");
  r.expect("num_classes");
  const std::size_t num_classes = r.count("num_classes");
  r.expect("features");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < input_dim; ++i) names.push_back(decode_name(r.token("feature name")));
  r.expect("layers");
  const std::size_t n_layers = r.count("layer count");
  if (n_layers == 0) throw DecodeError("model file declares zero layers");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < n_layers; ++l) {
    r.expect("layer");
    DenseLayer layer;
    layer.in_dim = r.count("layer in_dim");
    layer.out_dim = r.count("layer out_dim");
    try {
      layer.activation = activation_from_string(r.token("activation"));
    } catch (const InvalidArgument& e) {
      throw DecodeError(std::string("model file: ") + e.what());
    }
    layer.weights.resize(layer.in_dim * layer.out_dim);
    for (double& w : layer.weights) w = r.real("weight");
    layer.bias.resize(layer.out_dim);
    for (double& b : layer.bias) b = r.real("bias");
    layers.push_back(std::move(layer));
  }
  r.expect("end");
  try {
    DenseNetwork net(std::move(layers), std::move(names));
    if (net.input_dim() != input_dim || net.num_classes() != num_classes)
      throw DecodeError("model file header dimensions disagree with its layers");
    return net;
  } catch (const ShapeError& e) {
    throw DecodeError(std::string("model file: ") + e.what());
  }
}

void save_model(const DenseNetwork& net, const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_model(net, buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out << buffer.str();
  if (!out) throw Error("write failed for model file " + path.string());
}

DenseNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace xaieval::nn
