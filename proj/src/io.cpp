#include "hemd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace hemd {

namespace fs = std::filesystem;

FrameFormat frame_format_from_string(const std::string& name) {
    if (name == "pgm16") return FrameFormat::pgm16;
    if (name == "rawf32") return FrameFormat::rawf32;
    throw FormatError("unknown frame format: " + name);
}

std::string to_string(FrameFormat format) {
    return format == FrameFormat::pgm16 ? "pgm16" : "rawf32";
}

std::string frame_extension(FrameFormat format) {
    return format == FrameFormat::pgm16 ? "pgm" : "hprb";
}

namespace {

std::vector<char> read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<char> data((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    return data;
}

void write_file(const fs::path& file, const void* data, std::size_t size) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("failed writing " + file.string());
}

// Reads the next whitespace-separated token, skipping '#' comments.
std::string next_pnm_token(const std::vector<char>& data, std::size_t& pos) {
    while (pos < data.size()) {
        char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    std::string token;
    while (pos < data.size() &&
           !std::isspace(static_cast<unsigned char>(data[pos]))) {
        token.push_back(data[pos++]);
    }
    return token;
}

int parse_pnm_int(const std::vector<char>& data, std::size_t& pos,
                  const fs::path& file) {
    const std::string token = next_pnm_token(data, pos);
    if (token.empty() ||
        !std::all_of(token.begin(), token.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw FormatError("bad PGM header token in " + file.string());
    }
    return std::stoi(token);
}

std::vector<fs::path> list_frames(const fs::path& dir, const std::string& ext) {
    if (!fs::exists(dir) || !fs::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == "." + ext) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    return files;
}

fs::path frame_name(const fs::path& dir, std::size_t index,
                    const std::string& ext) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.%s", index, ext.c_str());
    return dir / name;
}

std::uint32_t read_u32_le(const char* p) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24;
}

void put_u32_le(std::vector<char>& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

}  // namespace

Grid2D<std::uint16_t> read_pgm16(const fs::path& file) {
    const std::vector<char> data = read_file(file);
    std::size_t pos = 0;
    if (next_pnm_token(data, pos) != "P5") {
        throw FormatError("not a binary PGM (P5): " + file.string());
    }
    const int width = parse_pnm_int(data, pos, file);
    const int height = parse_pnm_int(data, pos, file);
    const int maxval = parse_pnm_int(data, pos, file);
    if (maxval != 65535) {
        throw FormatError("expected 16-bit PGM (maxval 65535) in " +
                          file.string());
    }
    if (width < 1 || height < 1) {
        throw FormatError("bad PGM dimensions in " + file.string());
    }
    ++pos;  // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(width) * height * 2;
    if (data.size() < pos + need) {
        throw FormatError("truncated PGM payload in " + file.string());
    }
    Grid2D<std::uint16_t> grid(height, width, std::uint16_t{0});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto hi = static_cast<unsigned char>(data[pos + 2 * i]);
        const auto lo = static_cast<unsigned char>(data[pos + 2 * i + 1]);
        grid.values[i] = static_cast<std::uint16_t>(hi << 8 | lo);
    }
    return grid;
}

void write_pgm16(const fs::path& file, const Grid2D<std::uint16_t>& grid) {
    std::string header = "P5\n" + std::to_string(grid.width) + " " +
                         std::to_string(grid.height) + "\n65535\n";
    std::vector<char> out(header.begin(), header.end());
    out.reserve(out.size() + grid.size() * 2);
    for (std::uint16_t v : grid.values) {
        out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xff));
    }
    write_file(file, out.data(), out.size());
}

Grid2D<float> read_rawf32(const fs::path& file) {
    const std::vector<char> data = read_file(file);
    if (data.size() < 16 || std::memcmp(data.data(), "HPRB", 4) != 0) {
        throw FormatError("missing HPRB header in " + file.string());
    }
    const std::uint32_t height = read_u32_le(data.data() + 4);
    const std::uint32_t width = read_u32_le(data.data() + 8);
    if (height < 1 || width < 1 || height > (1u << 20) || width > (1u << 20)) {
        throw FormatError("bad rawf32 dimensions in " + file.string());
    }
    const std::size_t count = static_cast<std::size_t>(height) * width;
    if (data.size() != 16 + count * 4) {
        throw FormatError("rawf32 payload size mismatch in " + file.string());
    }
    Grid2D<float> grid(static_cast<int>(height), static_cast<int>(width), 0.0f);
    static_assert(sizeof(float) == 4);
    std::memcpy(grid.values.data(), data.data() + 16, count * 4);
    return grid;
}

void write_rawf32(const fs::path& file, const Grid2D<float>& grid) {
    std::vector<char> out;
    out.reserve(16 + grid.size() * 4);
    out.insert(out.end(), {'H', 'P', 'R', 'B'});
    put_u32_le(out, static_cast<std::uint32_t>(grid.height));
    put_u32_le(out, static_cast<std::uint32_t>(grid.width));
    put_u32_le(out, 0);
    const std::size_t payload = out.size();
    out.resize(payload + grid.size() * 4);
    std::memcpy(out.data() + payload, grid.values.data(), grid.size() * 4);
    write_file(file, out.data(), out.size());
}

Sequence load_sequence(const fs::path& dir, FrameFormat format) {
    const auto files = list_frames(dir, frame_extension(format));
    if (files.empty()) {
        throw EmptyError("no ." + frame_extension(format) + " frames in " +
                         dir.string());
    }
    std::vector<ProbMap> frames;
    frames.reserve(files.size());
    for (const fs::path& file : files) {
        Grid2D<double> raw;
        if (format == FrameFormat::pgm16) {
            const auto pixels = read_pgm16(file);
            raw = Grid2D<double>(pixels.height, pixels.width, 0.0);
            for (std::size_t i = 0; i < pixels.size(); ++i) {
                raw.values[i] = pixels.values[i] / 65535.0;
            }
        } else {
            const auto pixels = read_rawf32(file);
            raw = Grid2D<double>(pixels.height, pixels.width, 0.0);
            for (std::size_t i = 0; i < pixels.size(); ++i) {
                raw.values[i] = static_cast<double>(pixels.values[i]);
            }
        }
        if (!frames.empty() &&
            !raw.same_shape(frames.front().height(), frames.front().width())) {
            throw ShapeError("frame size mismatch at " + file.string());
        }
        try {
            frames.push_back(quantize(raw));
        } catch (const RangeError& e) {
            throw FormatError(file.string() + ": " + e.what());
        }
    }
    return Sequence(std::move(frames));
}

void save_sequence(const Sequence& seq, const fs::path& dir,
                   FrameFormat format) {
    fs::create_directories(dir);
    const std::string ext = frame_extension(format);
    for (std::size_t w = 0; w < seq.frames().size(); ++w) {
        const ProbMap& frame = seq.frames()[w];
        const fs::path file = frame_name(dir, w, ext);
        if (format == FrameFormat::pgm16) {
            Grid2D<std::uint16_t> pixels(frame.height(), frame.width(),
                                         std::uint16_t{0});
            for (std::size_t i = 0; i < pixels.size(); ++i) {
                const double scaled =
                    frame.levels()[i] / 100.0 * 65535.0;
                pixels.values[i] =
                    static_cast<std::uint16_t>(std::lround(scaled));
            }
            write_pgm16(file, pixels);
        } else {
            Grid2D<float> pixels(frame.height(), frame.width(), 0.0f);
            for (std::size_t i = 0; i < pixels.size(); ++i) {
                pixels.values[i] = static_cast<float>(frame.levels()[i] / 100.0);
            }
            write_rawf32(file, pixels);
        }
    }
}

void save_labels(std::span<const LabelMap> labels, const fs::path& dir) {
    fs::create_directories(dir);
    nlohmann::json counts = nlohmann::json::array();
    for (std::size_t w = 0; w < labels.size(); ++w) {
        const auto& grid = labels[w].grid;
        Grid2D<std::uint16_t> pixels(grid.height, grid.width, std::uint16_t{0});
        std::uint32_t max_label = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::uint32_t v = grid.values[i];
            if (v > 65535) {
                throw LabelOverflowError("label " + std::to_string(v) +
                                         " does not fit in 16 bits");
            }
            max_label = std::max(max_label, v);
            pixels.values[i] = static_cast<std::uint16_t>(v);
        }
        write_pgm16(frame_name(dir, w, "pgm"), pixels);
        counts.push_back(max_label);
    }
    const nlohmann::json sidecar = {{"frames", labels.size()},
                                    {"instance_counts", counts}};
    const std::string text = sidecar.dump(2) + "\n";
    write_file(dir / "counts.json", text.data(), text.size());
}

std::vector<Grid2D<std::uint32_t>> load_label_grids(const fs::path& dir) {
    const auto files = list_frames(dir, "pgm");
    if (files.empty()) {
        throw EmptyError("no .pgm label frames in " + dir.string());
    }
    std::vector<Grid2D<std::uint32_t>> grids;
    grids.reserve(files.size());
    for (const fs::path& file : files) {
        const auto pixels = read_pgm16(file);
        Grid2D<std::uint32_t> grid(pixels.height, pixels.width, 0u);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            grid.values[i] = pixels.values[i];
        }
        if (!grids.empty() &&
            !grid.same_shape(grids.front().height, grids.front().width)) {
            throw ShapeError("label frame size mismatch at " + file.string());
        }
        grids.push_back(std::move(grid));
    }
    return grids;
}

}  // namespace hemd
