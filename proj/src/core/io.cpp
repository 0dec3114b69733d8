#include "io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace chanprot {

namespace {

static_assert(std::endian::native == std::endian::little,
              "SCP1 writer assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'C', 'P', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4)) throw IoError(path + ": truncated SCP1 header");
  return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError(path + ": cannot open for writing");
  return os;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw IoError(path + ": cannot open for reading");
  return is;
}

void check_magic(std::istream& is, const std::string& path) {
  char magic[4] = {};
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": not an SCP1 file");
}

void write_payload(std::ostream& os, const double* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}

void read_payload(std::istream& is, double* data, std::size_t count, const std::string& path) {
  if (!is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8)))
    throw IoError(path + ": truncated SCP1 payload");
}

}  // namespace

void write_vector_scp1(const std::string& path, const Vec& v) {
  auto os = open_out(path, true);
  os.write(kMagic, 4);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(v.size()));
  write_payload(os, v.data(), v.size());
  if (!os) throw IoError(path + ": write failed");
}

Vec read_vector_scp1(const std::string& path) {
  auto is = open_in(path, true);
  check_magic(is, path);
  if (get_u32(is, path) != 1) throw IoError(path + ": expected rank-1 SCP1");
  Vec v(get_u32(is, path));
  read_payload(is, v.data(), v.size(), path);
  return v;
}

void write_matrix_scp1(const std::string& path, const Matrix& m) {
  auto os = open_out(path, true);
  os.write(kMagic, 4);
  put_u32(os, 2);
  put_u32(os, static_cast<std::uint32_t>(m.rows()));
  put_u32(os, static_cast<std::uint32_t>(m.cols()));
  write_payload(os, m.data(), m.rows() * m.cols());
  if (!os) throw IoError(path + ": write failed");
}

Matrix read_matrix_scp1(const std::string& path) {
  auto is = open_in(path, true);
  check_magic(is, path);
  if (get_u32(is, path) != 2) throw IoError(path + ": expected rank-2 SCP1");
  const std::uint32_t rows = get_u32(is, path);
  const std::uint32_t cols = get_u32(is, path);
  Matrix m(rows, cols);
  read_payload(is, m.data(), static_cast<std::size_t>(rows) * cols, path);
  return m;
}

void write_channel_csv(const std::string& path, const Channel& h) {
  auto os = open_out(path, false);
  os << "m,k\n" << h.m << "," << h.support.size() << "\nindex,tap\n";
  for (std::size_t i = 0; i < h.support.size(); ++i)
    os << h.support[i] << "," << format_double(h.taps[i]) << "\n";
  if (!os) throw IoError(path + ": write failed");
}

Channel read_channel_csv(const std::string& path) {
  auto is = open_in(path, false);
  std::string line;
  if (!std::getline(is, line) || line != "m,k") throw IoError(path + ": bad channel header");
  if (!std::getline(is, line)) throw IoError(path + ": missing m,k row");
  std::size_t m = 0, k = 0;
  if (std::sscanf(line.c_str(), "%zu,%zu", &m, &k) != 2)
    throw IoError(path + ": bad m,k row");
  if (!std::getline(is, line) || line != "index,tap")
    throw IoError(path + ": bad channel column header");
  std::vector<std::size_t> support;
  Vec taps;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t idx = 0;
    double tap = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf", &idx, &tap) != 2)
      throw IoError(path + ": bad tap row: " + line);
    support.push_back(idx);
    taps.push_back(tap);
  }
  if (support.size() != k) throw IoError(path + ": tap count does not match k");
  return make_channel(m, std::move(support), std::move(taps));
}

void write_pgm(const std::string& path, const Pgm& img) {
  if (img.pixels.size() != img.width * img.height)
    throw IoError(path + ": pixel buffer does not match dimensions");
  auto os = open_out(path, true);
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
  if (!os) throw IoError(path + ": write failed");
}

Pgm read_pgm(const std::string& path) {
  auto is = open_in(path, true);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError(path + ": not a P5 PGM");
  std::size_t w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  if (!is || maxval != 255) throw IoError(path + ": unsupported PGM header");
  is.get();  // single whitespace after maxval
  Pgm img{w, h, std::vector<std::uint8_t>(w * h)};
  if (!is.read(reinterpret_cast<char*>(img.pixels.data()),
               static_cast<std::streamsize>(img.pixels.size())))
    throw IoError(path + ": truncated PGM payload");
  return img;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace chanprot
