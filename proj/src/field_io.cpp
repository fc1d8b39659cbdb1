#include "topomatch/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "topomatch/error.hpp"
#include "topomatch/serialize.hpp"

namespace topomatch {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "raw-f32 I/O assumes a little-endian host");

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path header_path(const fs::path& path) {
  fs::path header = path;
  header.replace_extension(".json");
  return header;
}

fs::path payload_path(const fs::path& path) {
  fs::path payload = path;
  payload.replace_extension(".f32");
  return payload;
}

ScalarField load_raw(const fs::path& path) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_all(header_path(path)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed header " + header_path(path).string() + ": " + e.what());
  }
  if (!header.is_object() || !header.contains("width") || !header.contains("height") ||
      !header["width"].is_number_integer() || !header["height"].is_number_integer()) {
    throw InputError("header " + header_path(path).string() + " lacks integer width/height");
  }
  if (header.value("dtype", "f32") != "f32" || header.value("order", "row-major") != "row-major" ||
      header.value("endianness", "little") != "little") {
    throw InputError("header " + header_path(path).string() +
                     " must declare f32, row-major, little-endian");
  }
  const int width = header["width"].get<int>();
  const int height = header["height"].get<int>();
  if (width <= 0 || height <= 0) throw InputError("header declares non-positive dimensions");

  const std::string payload = read_all(payload_path(path));
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (payload.size() != expected * sizeof(float)) {
    throw InputError("size mismatch: header declares " + std::to_string(width) + "x" +
                     std::to_string(height) + " but payload holds " +
                     std::to_string(payload.size() / sizeof(float)) + " floats");
  }
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    float v;
    std::memcpy(&v, payload.data() + i * sizeof(float), sizeof(float));
    values[i] = static_cast<double>(v);
  }
  return ScalarField(width, height, std::move(values));
}

ScalarField load_csv(const fs::path& path) {
  std::istringstream in(read_all(path));
  std::vector<double> values;
  int width = -1;
  int height = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    int count = 0;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InputError("malformed csv cell '" + cell + "' in " + path.string());
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw InputError("malformed csv cell '" + cell + "' in " + path.string());
      }
      values.push_back(v);
      ++count;
    }
    if (width < 0) width = count;
    if (count != width) {
      throw InputError("csv row " + std::to_string(height) + " has " + std::to_string(count) +
                       " cells, expected " + std::to_string(width));
    }
    ++height;
  }
  if (height == 0 || width <= 0) throw InputError("empty csv " + path.string());
  return ScalarField(width, height, std::move(values));
}

// Skips whitespace and '#' comments between PGM header tokens.
std::size_t next_token(const std::string& data, std::size_t pos, std::string& token) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  token = data.substr(start, pos - start);
  return pos;
}

ScalarField load_pgm(const fs::path& path) {
  const std::string data = read_all(path);
  std::string magic, w, h, m;
  std::size_t pos = next_token(data, 0, magic);
  pos = next_token(data, pos, w);
  pos = next_token(data, pos, h);
  pos = next_token(data, pos, m);
  if (magic != "P5") throw InputError("malformed header: " + path.string() + " is not binary P5");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(w);
    height = std::stoi(h);
    maxval = std::stoi(m);
  } catch (const std::exception&) {
    throw InputError("malformed PGM header in " + path.string());
  }
  if (width <= 0 || height <= 0 || (maxval != 255 && maxval != 65535)) {
    throw InputError("malformed PGM header in " + path.string() + " (maxval must be 255 or 65535)");
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  if (pos > data.size() || data.size() - pos != n * bytes_per) {
    throw InputError("size mismatch in PGM raster of " + path.string());
  }
  std::vector<double> values(n);
  const auto* raster = reinterpret_cast<const unsigned char*>(data.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned sample = bytes_per == 1 ? raster[i] : (raster[2 * i] << 8) | raster[2 * i + 1];
    values[i] = static_cast<double>(sample) / static_cast<double>(maxval);
  }
  return ScalarField(width, height, std::move(values));
}

std::string format_csv(const ScalarField& field) {
  std::string out;
  char buf[32];
  for (int r = 0; r < field.height(); ++r) {
    for (int c = 0; c < field.width(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", field.at(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace

FieldFormat parse_format(std::string_view name) {
  if (name == "raw-f32" || name == "f32") return FieldFormat::RawF32;
  if (name == "csv") return FieldFormat::Csv;
  if (name == "pgm") return FieldFormat::Pgm;
  throw InputError("unknown field format '" + std::string(name) + "'");
}

FieldFormat format_from_path(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".f32" || ext == ".json") return FieldFormat::RawF32;
  if (ext == ".csv") return FieldFormat::Csv;
  if (ext == ".pgm") return FieldFormat::Pgm;
  throw InputError("cannot infer field format from '" + path.string() + "'");
}

ScalarField load_field(const fs::path& path, FieldFormat format) {
  switch (format) {
    case FieldFormat::RawF32: return load_raw(path);
    case FieldFormat::Csv: return load_csv(path);
    case FieldFormat::Pgm: return load_pgm(path);
  }
  throw InputError("unknown field format");
}

ScalarField load_field(const fs::path& path) { return load_field(path, format_from_path(path)); }

void save_field(const ScalarField& field, const fs::path& path, FieldFormat format,
                int pgm_maxval) {
  switch (format) {
    case FieldFormat::RawF32: {
      std::vector<std::uint8_t> bytes(field.size() * sizeof(float));
      for (std::size_t i = 0; i < field.size(); ++i) {
        const float v = static_cast<float>(field[i]);
        std::memcpy(bytes.data() + i * sizeof(float), &v, sizeof(float));
      }
      Json header;
      header["width"] = field.width();
      header["height"] = field.height();
      header["dtype"] = "f32";
      header["order"] = "row-major";
      header["endianness"] = "little";
      write_file_atomic(payload_path(path), bytes);
      write_file_atomic(header_path(path), header.dump() + "\n");
      return;
    }
    case FieldFormat::Csv:
      write_file_atomic(path, format_csv(field));
      return;
    case FieldFormat::Pgm: {
      if (pgm_maxval != 255 && pgm_maxval != 65535) {
        throw InputError("PGM maxval must be 255 or 65535");
      }
      const std::string header = "P5\n" + std::to_string(field.width()) + " " +
                                 std::to_string(field.height()) + "\n" +
                                 std::to_string(pgm_maxval) + "\n";
      std::vector<std::uint8_t> bytes(header.begin(), header.end());
      for (std::size_t i = 0; i < field.size(); ++i) {
        // Nearest level, ties up.
        const auto level =
            static_cast<unsigned>(std::floor(field[i] * pgm_maxval + 0.5));
        if (pgm_maxval == 255) {
          bytes.push_back(static_cast<std::uint8_t>(level));
        } else {
          bytes.push_back(static_cast<std::uint8_t>(level >> 8));
          bytes.push_back(static_cast<std::uint8_t>(level & 0xFF));
        }
      }
      write_file_atomic(path, bytes);
      return;
    }
  }
}

void save_field(const ScalarField& field, const fs::path& path) {
  save_field(field, path, format_from_path(path));
}

}  // namespace topomatch
