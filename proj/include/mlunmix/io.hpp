#ifndef MLUNMIX_IO_HPP
#define MLUNMIX_IO_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlunmix/model.hpp"

namespace mlunmix::io {

namespace fs = std::filesystem;

/// Parse/validation failure with file and (1-based) line context.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// One RFC-4180 record: commas separate, double quotes escape.
std::vector<std::string> split_csv_record(const std::string& line);
std::string csv_field(const std::string& text);

/// Column-labelled table of doubles: one CSV column per matrix column,
/// one row per band, optional leading `wavelength` column.
struct LabelledColumns {
  std::vector<std::string> names;
  std::optional<Vector> wavelengths;
  Matrix values;
};

LabelledColumns read_labelled_csv(const fs::path& path);
void write_labelled_csv(const fs::path& path, const LabelledColumns& table);

struct CubeHeader {
  Index bands = 0;
  Index pixels = 0;
  std::optional<std::pair<Index, Index>> grid;  ///< (rows, cols), rows*cols == pixels
};

/// Cube files are a `<stem>.json` header and a `<stem>.bin` payload of
/// little-endian float64, band-major (bands rows of `pixels` values).
fs::path cube_header_path(const fs::path& stem);
fs::path cube_payload_path(const fs::path& stem);

void write_cube(const fs::path& stem, const Matrix& data,
                std::optional<std::pair<Index, Index>> grid = std::nullopt);
std::pair<CubeHeader, Matrix> read_cube(const fs::path& stem);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace mlunmix::io

#endif  // MLUNMIX_IO_HPP
