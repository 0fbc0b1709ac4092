#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hemd/core.hpp"
#include "hemd/probmap.hpp"

namespace hemd {

// On-disk frame encodings:
//   pgm16  - binary PGM (P5), maxval 65535; probability = pixel / 65535.
//   rawf32 - 16-byte header (magic "HPRB", u32 height, u32 width,
//            u32 reserved, little-endian) followed by height*width
//            float32 values, row-major.
enum class FrameFormat { pgm16, rawf32 };

FrameFormat frame_format_from_string(const std::string& name);
std::string to_string(FrameFormat format);

// File extension used for a format ("pgm" / "hprb").
std::string frame_extension(FrameFormat format);

// Loads every "*.{ext}" file in the directory in lexicographic filename
// order, decodes, scales to [0,1] and quantizes.
// Throws EmptyError (no frames), FormatError (bad file), ShapeError
// (inconsistent frame sizes), IoError (unreadable path).
Sequence load_sequence(const std::filesystem::path& dir, FrameFormat format);

// Writes frames as frame_0000.<ext>, frame_0001.<ext>, ... such that
// load_sequence reproduces the values exactly.
void save_sequence(const Sequence& seq, const std::filesystem::path& dir,
                   FrameFormat format);

// Writes one 16-bit PGM per label map (frame_0000.pgm, ...) plus a
// counts.json sidecar listing per-frame instance counts.
// Throws LabelOverflowError for labels > 65535.
void save_labels(std::span<const LabelMap> labels,
                 const std::filesystem::path& dir);

// Loads 16-bit PGM label frames in lexicographic filename order.
std::vector<Grid2D<std::uint32_t>> load_label_grids(
    const std::filesystem::path& dir);

// Low-level PGM (P5, 16-bit) codec; samples are big-endian per the
// netpbm convention.
Grid2D<std::uint16_t> read_pgm16(const std::filesystem::path& file);
void write_pgm16(const std::filesystem::path& file,
                 const Grid2D<std::uint16_t>& grid);

Grid2D<float> read_rawf32(const std::filesystem::path& file);
void write_rawf32(const std::filesystem::path& file,
                  const Grid2D<float>& grid);

}  // namespace hemd
