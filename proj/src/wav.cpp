#include "drclab/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drclab {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint16_t get_u16(const std::string& data, std::size_t pos) {
  return static_cast<std::uint16_t>(
      static_cast<unsigned char>(data[pos]) |
      (static_cast<unsigned char>(data[pos + 1]) << 8));
}

std::uint32_t get_u32(const std::string& data, std::size_t pos) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 1]))
          << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 2]))
          << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 3]))
          << 24);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

}  // namespace

SignalBuffer read_wav(const std::string& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 ||
      data.compare(8, 4, "WAVE") != 0)
    fail(path, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    std::string id = data.substr(pos, 4);
    std::uint32_t size = get_u32(data, pos + 4);
    std::size_t body = pos + 8;
    if (body + size > data.size()) fail(path, "truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) fail(path, "fmt chunk too small");
      format = get_u16(data, body);
      channels = get_u16(data, body + 2);
      rate = get_u32(data, body + 4);
      bits = get_u16(data, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_size = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) fail(path, "missing fmt chunk");
  if (data_pos == 0) fail(path, "missing data chunk");
  if (format != 1) fail(path, "unsupported format tag " + std::to_string(format) +
                              ", only PCM (1) is supported");
  if (channels != 1)
    fail(path, "expected mono, got " + std::to_string(channels) + " channels");
  if (bits != 16)
    fail(path, "expected 16-bit samples, got " + std::to_string(bits) + "-bit");
  if (expected_rate > 0 && rate != static_cast<std::uint32_t>(expected_rate))
    fail(path, "sample rate is " + std::to_string(rate) + " Hz, expected " +
               std::to_string(expected_rate) + " Hz");

  std::size_t count = data_size / 2;
  if (count == 0) fail(path, "empty data chunk");
  SignalBuffer out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    auto raw = static_cast<std::int16_t>(get_u16(data, data_pos + 2 * i));
    out.samples[static_cast<Eigen::Index>(i)] = raw / 32768.0;
  }
  return out;
}

void write_wav(const std::string& path, const SignalBuffer& x) {
  validate(x);
  auto count = static_cast<std::uint32_t>(x.samples.size());
  std::string out;
  out.reserve(44 + 2 * count);
  out += "RIFF";
  put_u32(out, 36 + 2 * count);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(x.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(x.sample_rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits per sample
  out += "data";
  put_u32(out, 2 * count);
  for (Eigen::Index i = 0; i < x.samples.size(); ++i) {
    double scaled = std::round(x.samples[i] * 32768.0);
    auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(path, "cannot open file for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(path, "write failed");
}

}  // namespace drclab
