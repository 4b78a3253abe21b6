#include "latact/model_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "latact/errors.hpp"

namespace latact {

namespace {

constexpr const char* kMagic = "latact-model";
constexpr int kFormatVersion = 1;

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_layer(std::ostringstream& out, const Layer& layer) {
  out << "layer " << layer.in_dim() << ' ' << layer.out_dim() << ' '
      << to_string(layer.activation) << '\n';
  out << 'w';
  for (double v : layer.weight.entries()) out << ' ' << fmt_real(v);
  out << '\n';
  out << 'b';
  for (int r = 0; r < layer.bias.dim(); ++r) out << ' ' << fmt_real(layer.bias[r]);
  out << '\n';
}

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty line, split on whitespace.
  std::vector<std::string> next(const std::string& what) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::istringstream fields(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (fields >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    throw ParseError("unexpected end of file, expected " + what, line_no);
  }

  bool at_end() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream fields(line);
      std::string tok;
      if (fields >> tok) return false;
    }
    return true;
  }
};

int parse_int(const std::string& tok, const std::string& what, int line) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected integer for " + what + ", got '" + tok + "'",
                     line);
  }
}

double parse_real(const std::string& tok, const std::string& what, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw ParseError("expected real for " + what + ", got '" + tok + "'", line);
  }
  if (errno == ERANGE || !std::isfinite(v)) {
    throw ParseError(what + " value '" + tok + "' is out of range", line);
  }
  return v;
}

Layer parse_layer(LineReader& reader, int index) {
  const std::string label = "layer " + std::to_string(index);

  std::vector<std::string> header = reader.next(label + " header");
  if (header[0] != "layer" || header.size() != 4) {
    throw ParseError("expected '" + label + "' header of the form "
                     "'layer <in> <out> <activation>'", reader.line_no);
  }
  const int in_dim = parse_int(header[1], label + " in_dim", reader.line_no);
  const int out_dim = parse_int(header[2], label + " out_dim", reader.line_no);
  if (in_dim < 1 || out_dim < 1) {
    throw ParseError(label + ": dims must be >= 1", reader.line_no);
  }
  ActivationKind act;
  try {
    act = activation_from_string(header[3]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), reader.line_no);
  }

  std::vector<std::string> wline = reader.next(label + " weights");
  if (wline[0] != "w") {
    throw ParseError("expected 'w' row for " + label, reader.line_no);
  }
  const std::size_t expected_w =
      static_cast<std::size_t>(in_dim) * static_cast<std::size_t>(out_dim);
  if (wline.size() - 1 != expected_w) {
    throw ParseError(label + ": expected " + std::to_string(expected_w) +
                         " weights, found " + std::to_string(wline.size() - 1),
                     reader.line_no);
  }
  std::vector<double> w(expected_w);
  for (std::size_t i = 0; i < expected_w; ++i) {
    w[i] = parse_real(wline[i + 1], label + " weight", reader.line_no);
  }

  std::vector<std::string> bline = reader.next(label + " biases");
  if (bline[0] != "b") {
    throw ParseError("expected 'b' row for " + label, reader.line_no);
  }
  if (static_cast<int>(bline.size()) - 1 != out_dim) {
    throw ParseError(label + ": expected " + std::to_string(out_dim) +
                         " biases, found " + std::to_string(bline.size() - 1),
                     reader.line_no);
  }
  std::vector<double> b(static_cast<std::size_t>(out_dim));
  for (int i = 0; i < out_dim; ++i) {
    b[static_cast<std::size_t>(i)] =
        parse_real(bline[static_cast<std::size_t>(i) + 1], label + " bias",
                   reader.line_no);
  }

  return Layer(Matrix(out_dim, in_dim, std::move(w)),
               Vector::unchecked(std::move(b)), act);
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string serialize_model(const MlpModel& model) {
  std::ostringstream out;
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "dims " << model.input_dim() << ' ' << model.latent_dim() << '\n';
  out << "layers " << model.encoder_layers().size() << ' '
      << model.decoder_layers().size() << '\n';
  for (const Layer& l : model.encoder_layers()) append_layer(out, l);
  for (const Layer& l : model.decoder_layers()) append_layer(out, l);
  return out.str();
}

MlpModel parse_model(const std::string& text) {
  LineReader reader(text);

  std::vector<std::string> magic = reader.next("file header");
  if (magic.size() != 2 || magic[0] != kMagic) {
    throw ParseError("not a latact model file (missing '" + std::string(kMagic) +
                         "' header)",
                     reader.line_no);
  }
  const int version = parse_int(magic[1], "format version", reader.line_no);
  if (version != kFormatVersion) {
    throw ParseError("unsupported format version " + std::to_string(version) +
                         ", expected " + std::to_string(kFormatVersion),
                     reader.line_no);
  }

  std::vector<std::string> dims = reader.next("dims header");
  if (dims.size() != 3 || dims[0] != "dims") {
    throw ParseError("expected 'dims <input> <latent>'", reader.line_no);
  }
  const int input_dim = parse_int(dims[1], "input dim", reader.line_no);
  const int latent_dim = parse_int(dims[2], "latent dim", reader.line_no);

  std::vector<std::string> counts = reader.next("layers header");
  if (counts.size() != 3 || counts[0] != "layers") {
    throw ParseError("expected 'layers <encoder-count> <decoder-count>'",
                     reader.line_no);
  }
  const int enc_count = parse_int(counts[1], "encoder layer count", reader.line_no);
  const int dec_count = parse_int(counts[2], "decoder layer count", reader.line_no);
  if (enc_count < 1 || dec_count < 1) {
    throw ParseError("layer counts must be >= 1", reader.line_no);
  }

  std::vector<Layer> enc;
  std::vector<Layer> dec;
  for (int i = 0; i < enc_count + dec_count; ++i) {
    Layer layer = parse_layer(reader, i);
    if (i < enc_count) {
      enc.push_back(std::move(layer));
    } else {
      dec.push_back(std::move(layer));
    }
  }
  if (!reader.at_end()) {
    throw ParseError("expected " + std::to_string(enc_count + dec_count) +
                         " layer blocks, found trailing content",
                     reader.line_no);
  }

  try {
    MlpModel model(std::move(enc), std::move(dec));
    if (model.input_dim() != input_dim || model.latent_dim() != latent_dim) {
      throw std::invalid_argument(
          "layer stack dims (" + std::to_string(model.input_dim()) + " -> " +
          std::to_string(model.latent_dim()) + ") disagree with header dims (" +
          std::to_string(input_dim) + " -> " + std::to_string(latent_dim) + ")");
    }
    return model;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  write_text_atomic(path, serialize_model(model));
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open model file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace latact
