#include "faceval/formats.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "faceval/error.hpp"

namespace faceval {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, bytes.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (bytes[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::JsonSyntax, "line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
  } catch (const json::out_of_range& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("number is not finite: ") + e.what());
  }
}

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, field + ": " + what);
}

double finite_number(const json& j, const std::string& field) {
  if (!j.is_number()) schema_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(field, "value is not finite");
  return v;
}

std::size_t index_value(const json& j, const std::string& field) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    schema_error(field, "expected a non-negative integer index");
  }
  return j.get<std::size_t>();
}

std::string format_g9(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, end);
}

std::string quoted(const std::string& s) { return json(s).dump(); }

// ---------------------------------------------------------------------------
// Binary helpers

std::uint32_t load_u32(const char* p, bool little) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const auto byte = static_cast<std::uint32_t>(static_cast<unsigned char>(p[little ? i : 3 - i]));
    v |= byte << (8 * i);
  }
  return v;
}

void store_f32_le(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

float load_f32(const char* p, bool little) { return std::bit_cast<float>(load_u32(p, little)); }

constexpr std::size_t kMaxDimension = 1u << 16;

// Minimal header tokenizer shared by the netpbm-family readers.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::size_t pos, bool allow_comments)
      : bytes_(bytes), pos_(pos), comments_(allow_comments) {}

  std::string token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) ++pos_;
    if (start == pos_) throw Error(ErrorCode::MalformedHeader, "unexpected end of header");
    return std::string(bytes_.substr(start, pos_ - start));
  }

  std::size_t dimension(const char* what) {
    const std::string t = token();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v == 0 || v > kMaxDimension) {
      throw Error(ErrorCode::MalformedHeader, std::string("invalid ") + what + " '" + t + "'");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_start() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "header not terminated by whitespace");
    }
    return pos_ + 1;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (comments_ && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_;
  bool comments_;
};

void check_payload(std::size_t available, std::size_t needed) {
  if (available < needed) {
    throw Error(ErrorCode::TruncatedPayload, "payload has " + std::to_string(available) +
                                                 " bytes, header declares " + std::to_string(needed));
  }
  if (available > needed) {
    throw Error(ErrorCode::TrailingBytes,
                std::to_string(available - needed) + " unexpected bytes after payload");
  }
}

struct FloatRaster {
  int channels = 1;
  int width = 0;
  int height = 0;
  std::vector<float> values;  // top-down, interleaved
};

FloatRaster read_pfm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != 'f' && bytes[1] != 'F')) {
    throw Error(ErrorCode::BadMagic, "not a PFM file");
  }
  FloatRaster r;
  r.channels = bytes[1] == 'F' ? 3 : 1;
  HeaderReader header(bytes, 2, false);
  r.width = static_cast<int>(header.dimension("width"));
  r.height = static_cast<int>(header.dimension("height"));
  const std::string scale_text = header.token();
  char* end = nullptr;
  const double scale = std::strtod(scale_text.c_str(), &end);
  if (end != scale_text.c_str() + scale_text.size() || scale == 0.0 || !std::isfinite(scale)) {
    throw Error(ErrorCode::MalformedHeader, "invalid PFM scale '" + scale_text + "'");
  }
  const bool little = scale < 0.0;
  const std::size_t start = header.payload_start();

  const std::size_t count = static_cast<std::size_t>(r.width) * r.height * r.channels;
  check_payload(bytes.size() - start, count * 4);
  r.values.resize(count);
  const std::size_t row = static_cast<std::size_t>(r.width) * r.channels;
  for (int y = 0; y < r.height; ++y) {
    // PFM rows run bottom to top.
    const char* src = bytes.data() + start + static_cast<std::size_t>(r.height - 1 - y) * row * 4;
    for (std::size_t i = 0; i < row; ++i) {
      const float v = load_f32(src + 4 * i, little);
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinitePayload, "PFM contains non-finite samples");
      r.values[static_cast<std::size_t>(y) * row + i] = v;
    }
  }
  return r;
}

std::string write_pfm(int channels, int width, int height, const std::vector<float>& values) {
  std::string out = channels == 3 ? "PF\n" : "Pf\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n-1.0\n";
  const std::size_t row = static_cast<std::size_t>(width) * channels;
  out.reserve(out.size() + values.size() * 4);
  for (int y = height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) store_f32_le(out, values[static_cast<std::size_t>(y) * row + i]);
  }
  return out;
}

Image read_pnm(std::string_view bytes) {
  Image img;
  img.channels = bytes[1] == '6' ? 3 : 1;
  HeaderReader header(bytes, 2, true);
  img.width = static_cast<int>(header.dimension("width"));
  img.height = static_cast<int>(header.dimension("height"));
  const std::string maxval = header.token();
  if (maxval != "255") throw Error(ErrorCode::UnsupportedMaxval, "maxval " + maxval + " is not supported (need 255)");
  const std::size_t start = header.payload_start();
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  check_payload(bytes.size() - start, count);
  img.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    img.values[i] = static_cast<float>(static_cast<unsigned char>(bytes[start + i]) / 255.0);
  }
  return img;
}

}  // namespace

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "failed reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Landmarks

LandmarkSet parse_landmarks(std::string_view bytes, Warnings* warnings) {
  const json doc = parse_json(bytes);
  if (!doc.is_object()) schema_error("<root>", "expected an object");

  for (const auto& [key, value] : doc.items()) {
    if (key != "version" && key != "points" && key != "groups" && key != "image_size" && warnings) {
      warnings->push_back("ignoring unknown key '" + key + "'");
    }
  }

  auto version = doc.find("version");
  if (version == doc.end()) schema_error("version", "missing");
  if (!version->is_number_integer() || version->get<std::int64_t>() != 1) {
    schema_error("version", "unsupported version " + version->dump());
  }

  LandmarkSet set;
  auto points = doc.find("points");
  if (points == doc.end()) schema_error("points", "missing");
  if (!points->is_array()) schema_error("points", "expected an array");
  if (points->empty()) schema_error("points", "at least one point is required");
  set.points.reserve(points->size());
  for (std::size_t i = 0; i < points->size(); ++i) {
    const json& p = (*points)[i];
    const std::string field = "points[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) schema_error(field, "expected an [x, y] pair");
    set.points.push_back({finite_number(p[0], field + "[0]"), finite_number(p[1], field + "[1]")});
  }

  if (auto groups = doc.find("groups"); groups != doc.end()) {
    if (!groups->is_object()) schema_error("groups", "expected an object");
    for (const auto& [name, list] : groups->items()) {
      const std::string field = "groups." + name;
      if (!list.is_array()) schema_error(field, "expected an index array");
      IndexList indices;
      std::set<std::size_t> seen;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::size_t idx = index_value(list[i], field + "[" + std::to_string(i) + "]");
        if (idx >= set.points.size()) {
          schema_error(field, "index " + std::to_string(idx) + " out of range for " +
                                  std::to_string(set.points.size()) + " points");
        }
        if (!seen.insert(idx).second) schema_error(field, "duplicate index " + std::to_string(idx));
        indices.push_back(idx);
      }
      set.groups.emplace(name, std::move(indices));
    }
  }

  if (auto size = doc.find("image_size"); size != doc.end()) {
    if (!size->is_array() || size->size() != 2 || !(*size)[0].is_number_integer() ||
        !(*size)[1].is_number_integer() || (*size)[0].get<std::int64_t>() <= 0 ||
        (*size)[1].get<std::int64_t>() <= 0 || (*size)[0].get<std::int64_t>() > INT32_MAX ||
        (*size)[1].get<std::int64_t>() > INT32_MAX) {
      schema_error("image_size", "expected [width, height] positive integers");
    }
    set.image_size = ImageSize{static_cast<int>((*size)[0].get<std::int64_t>()),
                               static_cast<int>((*size)[1].get<std::int64_t>())};
  }

  validate(set);
  return set;
}

std::string write_landmarks(const LandmarkSet& set) {
  std::string out = "{\n  \"version\": 1,\n  \"points\": [";
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    out += i == 0 ? "\n    [" : ",\n    [";
    out += format_g9(set.points[i].x);
    out += ", ";
    out += format_g9(set.points[i].y);
    out += "]";
  }
  out += set.points.empty() ? "],\n" : "\n  ],\n";

  out += "  \"groups\": {";
  bool first = true;
  for (const auto& [name, indices] : set.groups) {
    out += first ? "\n    " : ",\n    ";
    first = false;
    out += quoted(name) + ": [";
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(indices[i]);
    }
    out += "]";
  }
  out += set.groups.empty() ? "}" : "\n  }";

  if (set.image_size) {
    out += ",\n  \"image_size\": [" + std::to_string(set.image_size->width) + ", " +
           std::to_string(set.image_size->height) + "]";
  }
  out += "\n}\n";
  return out;
}

WeightVector parse_weights(std::string_view bytes) {
  json doc = parse_json(bytes);
  if (doc.is_object()) {
    auto it = doc.find("weights");
    if (it == doc.end()) schema_error("weights", "missing");
    doc = *it;
  }
  if (!doc.is_array() || doc.empty()) schema_error("weights", "expected a non-empty number array");
  std::vector<double> w;
  for (std::size_t i = 0; i < doc.size(); ++i) w.push_back(finite_number(doc[i], "weights[" + std::to_string(i) + "]"));
  return WeightVector(std::move(w));
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingBundle parse_embeddings(std::string_view bytes) {
  const json doc = parse_json(bytes);
  if (!doc.is_array()) schema_error("<root>", "expected an array of embeddings");
  if (doc.empty()) schema_error("<root>", "at least one embedding is required");
  EmbeddingBundle bundle;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    const std::string field = "[" + std::to_string(i) + "]";
    if (!e.is_object()) schema_error(field, "expected an object");
    auto name = e.find("extractor");
    if (name == e.end() || !name->is_string()) schema_error(field + ".extractor", "expected a string");
    auto vec = e.find("vector");
    if (vec == e.end() || !vec->is_array()) schema_error(field + ".vector", "expected a number array");
    Embedding emb;
    emb.extractor = name->get<std::string>();
    if (!seen.insert(emb.extractor).second) {
      throw Error(ErrorCode::DuplicateExtractor, "extractor '" + emb.extractor + "' listed twice");
    }
    if (vec->empty()) throw Error(ErrorCode::EmptyVector, "extractor '" + emb.extractor + "' has an empty vector");
    emb.vector.reserve(vec->size());
    for (std::size_t k = 0; k < vec->size(); ++k) {
      emb.vector.push_back(finite_number((*vec)[k], field + ".vector[" + std::to_string(k) + "]"));
    }
    bundle.entries.push_back(std::move(emb));
  }
  return bundle;
}

std::string write_embeddings(const EmbeddingBundle& bundle) {
  json doc = json::array();
  for (const auto& e : bundle.entries) {
    json entry = json::object();
    entry["extractor"] = e.extractor;
    entry["vector"] = e.vector;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Heatmaps

Heatmap read_heatmap(std::string_view bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == 'f') {
    FloatRaster r = read_pfm(bytes);
    return Heatmap{1, r.width, r.height, std::move(r.values)};
  }
  if (bytes.substr(0, 5) != "HMF1 ") throw Error(ErrorCode::BadMagic, "not an HMF1 heatmap");

  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos || eol > 80) throw Error(ErrorCode::MalformedHeader, "HMF1 header line not terminated");
  const std::string_view fields = bytes.substr(5, eol - 5);

  std::size_t dims[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    if (i > 0) {
      if (pos >= fields.size() || fields[pos] != ' ') throw Error(ErrorCode::MalformedHeader, "HMF1 header needs 3 fields");
      ++pos;
    }
    auto [ptr, ec] = std::from_chars(fields.data() + pos, fields.data() + fields.size(), dims[i]);
    if (ec != std::errc() || ptr == fields.data() + pos || dims[i] == 0 || dims[i] > kMaxDimension) {
      throw Error(ErrorCode::MalformedHeader, "invalid HMF1 header '" + std::string(fields) + "'");
    }
    pos = static_cast<std::size_t>(ptr - fields.data());
  }
  if (pos != fields.size()) throw Error(ErrorCode::MalformedHeader, "trailing text in HMF1 header");

  Heatmap hm;
  hm.channels = static_cast<int>(dims[0]);
  hm.height = static_cast<int>(dims[1]);
  hm.width = static_cast<int>(dims[2]);
  const std::size_t count = dims[0] * dims[1] * dims[2];
  const std::size_t start = eol + 1;
  check_payload(bytes.size() - start, count * 4);
  hm.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = load_f32(bytes.data() + start + 4 * i, true);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinitePayload, "heatmap value " + std::to_string(i) + " is not finite");
    hm.values[i] = v;
  }
  return hm;
}

std::string write_heatmap(const Heatmap& heatmap) {
  std::string out = "HMF1 " + std::to_string(heatmap.channels) + " " + std::to_string(heatmap.height) + " " +
                    std::to_string(heatmap.width) + "\n";
  out.reserve(out.size() + heatmap.values.size() * 4);
  for (float v : heatmap.values) store_f32_le(out, v);
  return out;
}

// ---------------------------------------------------------------------------
// Images and fields

ImageFormat image_format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") return ImageFormat::pgm;
  if (ext == ".ppm") return ImageFormat::ppm;
  if (ext == ".pfm") return ImageFormat::pfm;
  throw Error(ErrorCode::UsageError, "unsupported image extension '" + ext + "' (use .pgm, .ppm or .pfm)");
}

Image read_image(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::BadMagic, "not a PGM/PPM/PFM image");
  if (bytes[1] == '5' || bytes[1] == '6') return read_pnm(bytes);
  if (bytes[1] == 'f' || bytes[1] == 'F') {
    FloatRaster r = read_pfm(bytes);
    Image img{r.channels, r.width, r.height, std::move(r.values)};
    validate(img);
    return img;
  }
  throw Error(ErrorCode::BadMagic, "unsupported image magic '" + std::string(bytes.substr(0, 2)) + "'");
}

std::string write_image(const Image& image, ImageFormat format) {
  validate(image);
  if (format == ImageFormat::pfm) return write_pfm(image.channels, image.width, image.height, image.values);

  const int want = format == ImageFormat::ppm ? 3 : 1;
  if (image.channels != want) {
    throw Error(ErrorCode::DimensionMismatch, std::string(format == ImageFormat::ppm ? "PPM" : "PGM") +
                                                  " needs " + std::to_string(want) + " channel(s)");
  }
  std::string out = format == ImageFormat::ppm ? "P6\n" : "P5\n";
  out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  for (float v : image.values) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(static_cast<double>(v) * 255.0))));
  }
  return out;
}

ScalarField read_field(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != 'f') throw Error(ErrorCode::BadMagic, "not a grayscale PFM");
  FloatRaster r = read_pfm(bytes);
  return ScalarField(r.width, r.height, std::move(r.values));
}

std::string write_field(const ScalarField& field) {
  for (float v : field.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "field contains non-finite values");
  }
  return write_pfm(1, field.width, field.height, field.values);
}

Mask read_mask(std::string_view bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    Image img = read_pnm(bytes);
    return Mask(ScalarField(img.width, img.height, std::move(img.values)));
  }
  return Mask(read_field(bytes));
}

// ---------------------------------------------------------------------------
// Distance reports

namespace {

json fit_to_json(const AffineFit& fit) {
  const auto& m = fit.matrix;
  return json{{"matrix", {{m(0, 0), m(0, 1), m(0, 2)}, {m(1, 0), m(1, 1), m(1, 2)}}},
              {"residuals", fit.residuals},
              {"objective", fit.objective}};
}

double number_at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(key, "missing");
  return finite_number(*it, key);
}

std::vector<double> numbers_at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) schema_error(key, "expected a number array");
  std::vector<double> out;
  for (const auto& v : *it) out.push_back(finite_number(v, key));
  return out;
}

}  // namespace

std::string write_distance_report(const DistanceReport& report) {
  json doc{{"group", report.group},
           {"objective", report.objective},
           {"rms", report.rms},
           {"mean_dist", report.mean_dist},
           {"per_point", report.per_point}};
  doc["transform"] = report.transform ? fit_to_json(*report.transform) : json(nullptr);
  return doc.dump(2) + "\n";
}

DistanceReport parse_distance_report(std::string_view bytes) {
  const json doc = parse_json(bytes);
  if (!doc.is_object()) schema_error("<root>", "expected an object");
  DistanceReport r;
  auto group = doc.find("group");
  if (group == doc.end() || !group->is_string()) schema_error("group", "expected a string");
  r.group = group->get<std::string>();
  r.objective = number_at(doc, "objective");
  r.rms = number_at(doc, "rms");
  r.mean_dist = number_at(doc, "mean_dist");
  r.per_point = numbers_at(doc, "per_point");
  auto t = doc.find("transform");
  if (t != doc.end() && !t->is_null()) {
    AffineFit fit;
    auto m = t->find("matrix");
    if (m == t->end() || !m->is_array() || m->size() != 2) schema_error("transform.matrix", "expected 2 rows");
    for (int r0 = 0; r0 < 2; ++r0) {
      const json& row = (*m)[static_cast<std::size_t>(r0)];
      if (!row.is_array() || row.size() != 3) schema_error("transform.matrix", "expected 3 columns");
      for (int c = 0; c < 3; ++c) fit.matrix(r0, c) = finite_number(row[static_cast<std::size_t>(c)], "transform.matrix");
    }
    fit.residuals = numbers_at(*t, "residuals");
    fit.objective = number_at(*t, "objective");
    r.transform = std::move(fit);
  }
  return r;
}

}  // namespace faceval
