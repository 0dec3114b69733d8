#pragma once

#include <cstdint>
#include <string>

#include "channel.hpp"
#include "numerics.hpp"

namespace chanprot {

// SCP1 binary container: magic "SCP1", u32 rank, u32 dims[rank], f64 payload.
// All fields little-endian; rank 1 = vector, rank 2 = row-major matrix.
void write_vector_scp1(const std::string& path, const Vec& v);
Vec read_vector_scp1(const std::string& path);
void write_matrix_scp1(const std::string& path, const Matrix& m);
Matrix read_matrix_scp1(const std::string& path);

// Channel as text: "m,k" header pair, then one "index,tap" row per tap.
void write_channel_csv(const std::string& path, const Channel& h);
Channel read_channel_csv(const std::string& path);

// 8-bit binary PGM (P5).
struct Pgm {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

void write_pgm(const std::string& path, const Pgm& img);
Pgm read_pgm(const std::string& path);

// "%.17g" formatting: shortest round-trippable double, deterministic
std::string format_double(double v);

}  // namespace chanprot
