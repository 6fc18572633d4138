#include "handgeom/netpbm.hpp"

#include "handgeom/imaging.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace handgeom {

namespace {

// Reads the next header token, skipping whitespace and `#` comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) {
            tok.push_back(static_cast<char>(ch));
            while ((ch = in.get()) != EOF && !std::isspace(static_cast<unsigned char>(ch)) && ch != '#')
                tok.push_back(static_cast<char>(ch));
            if (ch == '#') {
                while ((ch = in.get()) != EOF && ch != '\n') {
                }
            }
            return tok;
        }
    }
    throw IoError("truncated netpbm header");
}

int next_int(std::istream& in, const char* what) {
    std::string tok = next_token(in);
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("invalid netpbm ") + what + ": " + tok);
    }
}

struct Header {
    std::string magic;
    int width = 0, height = 0, maxval = 0;
};

Header read_header(std::istream& in, const std::string& path) {
    if (!in) throw IoError("cannot open " + path);
    Header h;
    h.magic = next_token(in);
    h.width = next_int(in, "width");
    h.height = next_int(in, "height");
    h.maxval = next_int(in, "maxval");
    if (h.width <= 0 || h.height <= 0)
        throw IoError("non-positive dimensions in " + path);
    if (h.maxval != 255)
        throw IoError("unsupported maxval (want 255) in " + path);
    return h;
}

void read_payload(std::istream& in, std::vector<std::uint8_t>& buf, const std::string& path) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw IoError("truncated pixel data in " + path);
}

} // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    Header h = read_header(in, path);
    if (h.magic != "P5")
        throw IoError("not a binary PGM (P5): " + path);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(h.width) * h.height);
    read_payload(in, buf, path);
    return GrayImage(h.width, h.height, std::move(buf));
}

RgbImage load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    Header h = read_header(in, path);
    if (h.magic != "P6")
        throw IoError("not a binary PPM (P6): " + path);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(h.width) * h.height * 3);
    read_payload(in, buf, path);
    return RgbImage(h.width, h.height, std::move(buf));
}

GrayImage load_image_gray(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    std::string magic;
    probe >> magic;
    probe.close();
    if (magic == "P5") return load_pgm(path);
    if (magic == "P6") return to_grayscale(load_ppm(path));
    throw IoError("unsupported image format (want P5/P6): " + path);
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixels().size()));
    if (!out) throw IoError("write failed: " + path);
}

void save_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixels().size()));
    if (!out) throw IoError("write failed: " + path);
}

} // namespace handgeom
