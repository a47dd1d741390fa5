#include "mlunmix/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace mlunmix::io {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  std::size_t last = text.find_last_not_of(" \t\r");
  if (begin == std::string::npos) throw std::invalid_argument("empty numeric field");
  const char* first = text.data() + begin;
  const char* stop = text.data() + last + 1;
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, stop, value);
  if (ec != std::errc() || ptr != stop) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

LabelledColumns read_labelled_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open");
  auto fail = [&](std::size_t line, const std::string& msg) -> FormatError {
    return FormatError(path.string() + ":" + std::to_string(line) + ": " + msg);
  };

  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header row");
  std::vector<std::string> header;
  try {
    header = split_csv_record(line);
  } catch (const std::invalid_argument& e) {
    throw fail(1, e.what());
  }
  LabelledColumns table;
  const bool has_wavelength = !header.empty() && header.front() == "wavelength";
  const std::size_t first_value = has_wavelength ? 1 : 0;
  std::set<std::string> seen;
  for (std::size_t k = first_value; k < header.size(); ++k) {
    if (header[k].empty()) throw fail(1, "empty column name in column " + std::to_string(k + 1));
    if (!seen.insert(header[k]).second) throw fail(1, "duplicate column name '" + header[k] + "'");
    table.names.push_back(header[k]);
  }
  if (table.names.empty()) throw fail(1, "header names no value columns");

  std::vector<std::vector<double>> rows;
  std::vector<double> wavelengths;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    try {
      cells = split_csv_record(line);
    } catch (const std::invalid_argument& e) {
      throw fail(line_no, e.what());
    }
    if (cells.size() != header.size()) {
      throw fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(cells.size()));
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = 0.0;
      try {
        v = parse_double(cells[k]);
      } catch (const std::invalid_argument& e) {
        throw fail(line_no, "column " + std::to_string(k + 1) + ": " + e.what());
      }
      if (k < first_value) {
        wavelengths.push_back(v);
        continue;
      }
      if (!std::isfinite(v) || v < 0.0) {
        throw fail(line_no, "column " + std::to_string(k + 1) + " ('" + header[k] +
                                "'): negative or non-finite value " + cells[k]);
      }
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw fail(line_no, "no data rows");

  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  if (has_wavelength) {
    table.wavelengths = Eigen::Map<Vector>(wavelengths.data(), static_cast<Index>(wavelengths.size()));
  }
  return table;
}

void write_labelled_csv(const fs::path& path, const LabelledColumns& table) {
  if (static_cast<Index>(table.names.size()) != table.values.cols()) {
    throw std::invalid_argument("write_labelled_csv: " + std::to_string(table.names.size()) +
                                " names for " + std::to_string(table.values.cols()) + " columns");
  }
  std::ostringstream out;
  bool first = true;
  if (table.wavelengths) {
    out << "wavelength";
    first = false;
  }
  for (const auto& name : table.names) {
    out << (first ? "" : ",") << csv_field(name);
    first = false;
  }
  out << '\n';
  for (Index r = 0; r < table.values.rows(); ++r) {
    first = true;
    if (table.wavelengths) {
      out << format_double((*table.wavelengths)(r));
      first = false;
    }
    for (Index c = 0; c < table.values.cols(); ++c) {
      out << (first ? "" : ",") << format_double(table.values(r, c));
      first = false;
    }
    out << '\n';
  }
  write_text(path, out.str());
}

fs::path cube_header_path(const fs::path& stem) {
  fs::path p = stem;
  p += ".json";
  return p;
}

fs::path cube_payload_path(const fs::path& stem) {
  fs::path p = stem;
  p += ".bin";
  return p;
}

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    return __builtin_bswap64(bits);
  }
}

}  // namespace

void write_cube(const fs::path& stem, const Matrix& data,
                std::optional<std::pair<Index, Index>> grid) {
  if (grid && grid->first * grid->second != data.cols()) {
    throw std::invalid_argument("write_cube: grid " + std::to_string(grid->first) + "x" +
                                std::to_string(grid->second) + " does not cover " +
                                std::to_string(data.cols()) + " pixels");
  }
  json header = {{"format", "mlunmix-cube"},
                 {"version", 1},
                 {"bands", data.rows()},
                 {"pixels", data.cols()},
                 {"dtype", "float64"},
                 {"byte_order", "little"},
                 {"layout", "band-major"}};
  if (grid) {
    header["rows"] = grid->first;
    header["cols"] = grid->second;
  }
  write_text(cube_header_path(stem), header.dump(2) + "\n");

  std::string payload(static_cast<std::size_t>(data.size()) * 8, '\0');
  std::size_t offset = 0;
  for (Index l = 0; l < data.rows(); ++l) {
    for (Index j = 0; j < data.cols(); ++j) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(data(l, j)));
      std::memcpy(payload.data() + offset, &bits, 8);
      offset += 8;
    }
  }
  write_text(cube_payload_path(stem), payload);
}

std::pair<CubeHeader, Matrix> read_cube(const fs::path& stem) {
  const fs::path header_path = cube_header_path(stem);
  json header;
  try {
    header = json::parse(read_text(header_path));
  } catch (const json::exception& e) {
    throw FormatError(header_path.string() + ": " + e.what());
  }
  CubeHeader h;
  try {
    if (header.at("dtype").get<std::string>() != "float64" ||
        header.at("byte_order").get<std::string>() != "little") {
      throw FormatError(header_path.string() + ": only little-endian float64 cubes are supported");
    }
    h.bands = header.at("bands").get<Index>();
    h.pixels = header.at("pixels").get<Index>();
    if (header.contains("rows") && header.contains("cols")) {
      h.grid = std::make_pair(header.at("rows").get<Index>(), header.at("cols").get<Index>());
    }
  } catch (const json::exception& e) {
    throw FormatError(header_path.string() + ": " + e.what());
  }
  if (h.bands < 1 || h.pixels < 1) {
    throw FormatError(header_path.string() + ": bands and pixels must be positive");
  }
  if (h.grid && h.grid->first * h.grid->second != h.pixels) {
    throw FormatError(header_path.string() + ": rows*cols does not equal pixels");
  }

  const fs::path payload_path = cube_payload_path(stem);
  const std::string payload = read_text(payload_path);
  const std::size_t expected = static_cast<std::size_t>(h.bands * h.pixels) * 8;
  if (payload.size() != expected) {
    throw FormatError(payload_path.string() + ": payload is " + std::to_string(payload.size()) +
                      " bytes, header implies " + std::to_string(expected));
  }
  Matrix data(h.bands, h.pixels);
  std::size_t offset = 0;
  for (Index l = 0; l < h.bands; ++l) {
    for (Index j = 0; j < h.pixels; ++j) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, payload.data() + offset, 8);
      data(l, j) = std::bit_cast<double>(to_little_endian(bits));
      offset += 8;
    }
  }
  return {h, std::move(data)};
}

std::string sha256_file(const fs::path& path) {
  const std::string bytes = read_text(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed for " + path.string());
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mlunmix::io
