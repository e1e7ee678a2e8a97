#include "meal/pnm_io.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace meal {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::string& path, const char* what) {
    try {
        const int v = std::stoi(tok);
        if (v <= 0) throw std::invalid_argument("non-positive");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": bad " + what + " in PNM header");
    }
}

}  // namespace

PnmImage read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    const std::string magic = next_token(in);
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw std::runtime_error(path + ": unsupported PNM magic '" + magic + "'");

    PnmImage img;
    img.channels = channels;
    img.w = parse_dim(next_token(in), path, "width");
    img.h = parse_dim(next_token(in), path, "height");
    const int maxval = parse_dim(next_token(in), path, "maxval");
    if (maxval != 255) throw std::runtime_error(path + ": only maxval 255 supported");

    const size_t n = static_cast<size_t>(img.w) * img.h * channels;
    img.data.resize(n);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
        throw std::runtime_error(path + ": truncated pixel data");
    }
    return img;
}

namespace {

void write_pnm(const std::string& path, const char* magic, int w, int h, int channels,
               const std::vector<uint8_t>& data) {
    if (data.size() != static_cast<size_t>(w) * h * channels) {
        throw std::runtime_error(path + ": pixel buffer size does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << magic << "\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_ppm(const std::string& path, int w, int h, const std::vector<uint8_t>& rgb) {
    write_pnm(path, "P6", w, h, 3, rgb);
}

void write_pgm(const std::string& path, int w, int h, const std::vector<uint8_t>& gray) {
    write_pnm(path, "P5", w, h, 1, gray);
}

}  // namespace meal
