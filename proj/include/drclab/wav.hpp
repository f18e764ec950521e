#pragma once

#include <string>

#include "drclab/signal.hpp"

namespace drclab {

/// Reads a 16-bit PCM mono RIFF/WAVE file. Throws std::runtime_error with a
/// message naming the file and the offending property when the container is
/// malformed, the stream is not mono 16-bit PCM, or (when expected_rate > 0)
/// the sample rate differs from expected_rate.
SignalBuffer read_wav(const std::string& path, int expected_rate = 16000);

/// Writes 16-bit PCM mono. Samples are clipped to [-1, 1) and rounded; a
/// round trip through write/read changes each in-range sample by at most
/// 2^-15.
void write_wav(const std::string& path, const SignalBuffer& x);

}  // namespace drclab
