#pragma once

#include <Eigen/Core>
#include <vector>

#include "drclab/compression.hpp"
#include "drclab/envelope.hpp"
#include "drclab/filterbank.hpp"

namespace drclab {

/// Full multiband compressor: analysis bank, detector, one compression curve
/// per band.
struct DrcConfig {
  FilterbankSpec filterbank;
  DetectorParams detector;
  std::vector<CompressorSpec> compressors;  // size == filterbank.num_bands
};

/// Same compressor in every band.
DrcConfig uniform_config(const FilterbankSpec& fb, const DetectorParams& det,
                         const CompressorSpec& spec);

void validate(const DrcConfig& cfg);

/// One processed mixture with its exact output decomposition: the same gain
/// sequence multiplies the mixture and every component, so
/// mixture_output == sum of outputs to floating-point roundoff.
struct MixtureRun {
  SignalBuffer mixture_output;              // y
  std::vector<SignalBuffer> outputs;        // r_i, one per component
  std::vector<Eigen::ArrayXXd> gain_tracks; // amplitude gains (N, B); one
                                            // track for mixture processing,
                                            // one per component for
                                            // independent processing
  EnvelopeTrack mixture_env;                // detector on the mixture
  std::vector<EnvelopeTrack> env_in;        // detector on each s_i
  std::vector<EnvelopeTrack> env_out;       // detector on each r_i
  EnvelopeTrack interferer_env_in;          // detector on sum of components
  EnvelopeTrack interferer_env_out;         // 1..N-1; empty when N == 1
};

/// Compresses the sum of the components with a single gain track computed
/// from the mixture envelope, and applies that same track to each component.
/// Input and output envelopes of every component are measured with the
/// config's detector.
MixtureRun process_mixture(const std::vector<SignalBuffer>& components,
                           const DrcConfig& cfg);

/// Core entry on pre-split components. analyze() dominates the cost of a run
/// and is linear, so sweeps that only rescale a component can reuse its
/// BandedSignal and scale the channels directly.
MixtureRun process_mixture_banded(const std::vector<BandedSignal>& components,
                                  const DrcConfig& cfg);

/// Each component is compressed alone (its own envelope drives its own gain
/// track); outputs and envelopes are reported in the same layout, with
/// mixture_output the sum of the independently processed components.
MixtureRun process_independently(const std::vector<SignalBuffer>& components,
                                 const DrcConfig& cfg);

MixtureRun process_independently_banded(
    const std::vector<BandedSignal>& components, const DrcConfig& cfg);

}  // namespace drclab
