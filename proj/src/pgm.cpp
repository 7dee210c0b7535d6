#include "coherence_pursuit/pgm.hpp"

#include "coherence_pursuit/errors.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace cop {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) throw IoError("pgm: truncated header");
  return tok;
}

int header_int(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(std::string("pgm: bad ") + what + " '" + tok + "'");
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P2" && magic != "P5") throw IoError("pgm: unsupported magic '" + magic + "'");
  GrayImage img;
  img.width = header_int(in, "width");
  img.height = header_int(in, "height");
  img.maxval = header_int(in, "maxval");
  if (img.width < 1 || img.height < 1) throw IoError("pgm: empty image");
  if (img.maxval < 1 || img.maxval > 65535) throw IoError("pgm: maxval out of range");
  const std::size_t count =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      long v = -1;
      if (!(in >> v)) throw IoError("pgm: truncated pixel data");
      if (v < 0 || v > img.maxval) throw IoError("pgm: pixel value out of range");
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    const bool wide = img.maxval > 255;
    for (std::size_t i = 0; i < count; ++i) {
      unsigned char b[2] = {0, 0};
      if (!in.read(reinterpret_cast<char*>(b), wide ? 2 : 1))
        throw IoError("pgm: truncated pixel data");
      const int v = wide ? (b[0] << 8) | b[1] : b[0];
      if (v > img.maxval) throw IoError("pgm: pixel value out of range");
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P2\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (c) out << ' ';
      out << img.at(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("pgm: write failed");
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_pgm(out, img);
}

}  // namespace cop
