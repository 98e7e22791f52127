#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vbsf/error.hpp"
#include "vbsf/synth.hpp"

namespace vbsf::synth {
namespace {

namespace fs = std::filesystem;

std::string frame_filename(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06lld.pgm", static_cast<long long>(index));
  return buf;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(const std::string& field, const std::string& where) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError(where + ": cannot parse '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  while (in) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

}  // namespace

void write_pgm(const Frame& frame, const fs::path& path) {
  if (frame.format() != PixelFormat::Gray8) throw ValidationError("PGM output needs a Gray8 frame");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  const auto px = frame.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  const std::string where = path.string();
  if (pgm_token(in) != "P5") throw DataError(where + ": not a binary PGM");
  const int width = parse_field<int>(pgm_token(in), where);
  const int height = parse_field<int>(pgm_token(in), where);
  const int maxval = parse_field<int>(pgm_token(in), where);
  if (width < 1 || height < 1 || maxval != 255) throw DataError(where + ": unsupported PGM header");
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) throw DataError(where + ": truncated pixel data");
  return Frame(width, height, PixelFormat::Gray8, std::move(pixels));
}

void write_dataset(const AnnotatedSequence& sequence, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  if (sequence.frames.empty()) throw ValidationError("cannot write an empty sequence");
  if (sequence.annotations.size() != sequence.frames.size()) {
    throw ValidationError("annotation list does not match the frame count");
  }

  for (std::size_t i = 0; i < sequence.frames.size(); ++i) {
    write_pgm(sequence.frames[i], dir / frame_filename(static_cast<std::int64_t>(i)));
  }

  std::ofstream csv(dir / "annotations.csv");
  if (!csv) throw DataError("cannot write annotations in " + dir.string());
  csv << "frame,x,y,w,h,kind\n";
  for (std::size_t f = 0; f < sequence.annotations.size(); ++f) {
    for (const auto& a : sequence.annotations[f]) {
      csv << f << ',' << format_real(a.box.x) << ',' << format_real(a.box.y) << ','
          << format_real(a.box.w) << ',' << format_real(a.box.h) << ',' << to_string(a.kind) << '\n';
    }
  }

  const auto& first = sequence.frames.front();
  nlohmann::json manifest = {{"width", first.width()},
                             {"height", first.height()},
                             {"frame_count", sequence.frames.size()},
                             {"seed", sequence.seed},
                             {"fps", sequence.fps}};
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw DataError("cannot write manifest in " + dir.string());
  mf << manifest.dump(2) << '\n';
}

AnnotatedSequence read_dataset(const fs::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw DataError("missing manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt manifest.json: " + std::string(e.what()));
  }

  AnnotatedSequence seq;
  std::int64_t frame_count = 0;
  int width = 0, height = 0;
  try {
    width = manifest.at("width").get<int>();
    height = manifest.at("height").get<int>();
    frame_count = manifest.at("frame_count").get<std::int64_t>();
    seq.seed = manifest.at("seed").get<std::uint64_t>();
    seq.fps = manifest.value("fps", 25.0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest.json: " + std::string(e.what()));
  }
  if (frame_count < 1 || !(seq.fps > 0.0)) throw DataError("manifest.json: invalid frame_count or fps");

  for (std::int64_t i = 0; i < frame_count; ++i) {
    Frame frame = read_pgm(dir / frame_filename(i));
    if (frame.width() != width || frame.height() != height) {
      throw DataError(frame_filename(i) + ": size disagrees with manifest");
    }
    frame.index = i;
    frame.timestamp = double(i) / seq.fps;
    seq.frames.push_back(std::move(frame));
  }

  seq.annotations.resize(static_cast<std::size_t>(frame_count));
  std::ifstream csv(dir / "annotations.csv");
  if (!csv) throw DataError("missing annotations.csv in " + dir.string());
  std::string line;
  if (!std::getline(csv, line) || line != "frame,x,y,w,h,kind") {
    throw DataError("annotations.csv: bad header");
  }
  for (std::size_t row = 2; std::getline(csv, line); ++row) {
    if (line.empty()) continue;
    const std::string where = "annotations.csv line " + std::to_string(row);
    const auto fields = split_csv(line);
    if (fields.size() != 6) throw DataError(where + ": expected 6 fields");
    const auto frame = parse_field<std::int64_t>(fields[0], where);
    if (frame < 0 || frame >= frame_count) {
      throw DataError(where + ": frame " + fields[0] + " outside the sequence");
    }
    Annotation a;
    a.box = {parse_field<double>(fields[1], where), parse_field<double>(fields[2], where),
             parse_field<double>(fields[3], where), parse_field<double>(fields[4], where)};
    if (!a.box.valid()) throw DataError(where + ": invalid box");
    try {
      a.kind = parse_object_kind(fields[5]);
    } catch (const ValidationError& e) {
      throw DataError(where + ": " + e.what());
    }
    seq.annotations[static_cast<std::size_t>(frame)].push_back(a);
  }
  return seq;
}

}  // namespace vbsf::synth
