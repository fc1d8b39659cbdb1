#pragma once

#include <filesystem>
#include <string_view>

#include "topomatch/field.hpp"

namespace topomatch {

enum class FieldFormat { RawF32, Csv, Pgm };

// Picks the format from the file extension (.f32, .csv, .pgm).
FieldFormat format_from_path(const std::filesystem::path& path);
FieldFormat parse_format(std::string_view name);

// raw-f32 reads `<stem>.f32` plus the `<stem>.json` header next to it.
// PGM samples are divided by maxval; raw and csv values outside [0,1] are
// rejected.
ScalarField load_field(const std::filesystem::path& path, FieldFormat format);
ScalarField load_field(const std::filesystem::path& path);

// raw-f32 narrows each value to float32. PGM quantizes to the nearest level,
// ties rounding up. `pgm_maxval` is 255 or 65535.
void save_field(const ScalarField& field, const std::filesystem::path& path, FieldFormat format,
                int pgm_maxval = 255);
void save_field(const ScalarField& field, const std::filesystem::path& path);

}  // namespace topomatch
