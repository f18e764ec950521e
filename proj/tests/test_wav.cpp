#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drclab/signal.hpp"
#include "drclab/wav.hpp"
#include "test_util.hpp"

using namespace drclab;
using drclab::testing::TempDir;

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(tag[i]));
}

// Minimal PCM RIFF writer with configurable channel count, used to produce
// containers the library itself refuses to write.
void write_pcm_file(const std::string& path, std::uint16_t channels,
                    std::uint32_t rate, const std::vector<std::int16_t>& data) {
  std::vector<std::uint8_t> bytes;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(data.size() * 2);
  put_tag(bytes, "RIFF");
  put_u32(bytes, 36 + data_bytes);
  put_tag(bytes, "WAVE");
  put_tag(bytes, "fmt ");
  put_u32(bytes, 16);
  put_u16(bytes, 1);  // PCM
  put_u16(bytes, channels);
  put_u32(bytes, rate);
  put_u32(bytes, rate * channels * 2);
  put_u16(bytes, static_cast<std::uint16_t>(channels * 2));
  put_u16(bytes, 16);
  put_tag(bytes, "data");
  put_u32(bytes, data_bytes);
  for (std::int16_t s : data) {
    bytes.push_back(static_cast<std::uint8_t>(s & 0xff));
    bytes.push_back(static_cast<std::uint8_t>((s >> 8) & 0xff));
  }
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("write/read round trip is exact to one quantization step") {
  TempDir dir("wav_roundtrip");
  SignalBuffer x = generate_white_noise(16000, -12.0, RngSeed{5});
  const std::string path = dir.path("x.wav");
  write_wav(path, x);
  SignalBuffer y = read_wav(path);
  REQUIRE(y.samples.size() == x.samples.size());
  CHECK(y.sample_rate == x.sample_rate);
  double max_err = (y.samples - x.samples).abs().maxCoeff();
  CHECK(max_err <= std::pow(2.0, -15.0));
}

TEST_CASE("out-of-range samples are clipped on write") {
  TempDir dir("wav_clip");
  SignalBuffer x;
  x.samples = Eigen::ArrayXd(4);
  x.samples << -2.0, -1.0, 0.5, 2.0;
  const std::string path = dir.path("clip.wav");
  write_wav(path, x);
  SignalBuffer y = read_wav(path);
  CHECK(y.samples[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(y.samples[2] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(y.samples[3] <= 1.0);
  CHECK(y.samples[3] >= 1.0 - std::pow(2.0, -14.0));
}

TEST_CASE("stereo streams are rejected") {
  TempDir dir("wav_stereo");
  const std::string path = dir.path("stereo.wav");
  write_pcm_file(path, 2, 16000, {0, 0, 100, -100});
  CHECK_THROWS_AS(read_wav(path), std::runtime_error);
  try {
    read_wav(path);
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find(path) != std::string::npos);
    CHECK(msg.find("mono") != std::string::npos);
  }
}

TEST_CASE("sample-rate mismatch names both rates") {
  TempDir dir("wav_rate");
  const std::string path = dir.path("cd_rate.wav");
  write_pcm_file(path, 1, 44100, {0, 100, -100, 50});
  CHECK_THROWS_AS(read_wav(path, 16000), std::runtime_error);
  try {
    read_wav(path, 16000);
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("44100") != std::string::npos);
    CHECK(msg.find("16000") != std::string::npos);
  }
  // With rate checking disabled the file reads fine.
  SignalBuffer y = read_wav(path, 0);
  CHECK(y.sample_rate == 44100);
  CHECK(y.samples.size() == 4);
}

TEST_CASE("truncated container is reported as malformed") {
  TempDir dir("wav_trunc");
  const std::string path = dir.path("broken.wav");
  std::ofstream out(path, std::ios::binary);
  out << "RIFFxx";
  out.close();
  CHECK_THROWS_AS(read_wav(path), std::runtime_error);
}

TEST_CASE("missing file is reported with its path") {
  CHECK_THROWS_AS(read_wav("/nonexistent/nope.wav"), std::runtime_error);
  try {
    read_wav("/nonexistent/nope.wav");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("nope.wav") != std::string::npos);
  }
}
