#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "drclab/experiments.hpp"

namespace drclab {

namespace {

using nlohmann::json;

json cr_to_json(double cr) {
  // JSON has no infinity literal; an unbounded ratio serializes as "inf".
  if (std::isinf(cr)) return json("inf");
  return json(cr);
}

double cr_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("cr string must be \"inf\"");
  }
  return j.get<double>();
}

json to_json(const CompressorSpec& spec) {
  json j;
  switch (spec.kind) {
    case CompressorKind::linear:
      j["kind"] = "linear";
      j["gain_db"] = spec.gain_db;
      break;
    case CompressorKind::power_law:
      j["kind"] = "power_law";
      j["cr"] = cr_to_json(spec.cr);
      j["g0_db"] = spec.g0_db;
      break;
    case CompressorKind::knee:
      j["kind"] = "knee";
      j["g0_db"] = spec.g0_db;
      j["knee_low_db"] = spec.knee_low_db;
      j["cr"] = cr_to_json(spec.cr);
      j["limit_db"] = spec.limit_db;
      j["smooth_db"] = spec.smooth_db;
      break;
    case CompressorKind::logarithmic:
      j["kind"] = "logarithmic";
      j["scale"] = spec.scale;
      j["offset"] = spec.offset;
      break;
  }
  return j;
}

CompressorSpec spec_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear")
    return CompressorSpec::linear(j.value("gain_db", 0.0));
  if (kind == "power_law")
    return CompressorSpec::power_law(cr_from_json(j.at("cr")),
                                     j.value("g0_db", 0.0));
  if (kind == "knee")
    return CompressorSpec::knee(j.value("g0_db", 0.0), j.at("knee_low_db"),
                                cr_from_json(j.at("cr")), j.at("limit_db"),
                                j.value("smooth_db", 0.0));
  if (kind == "logarithmic")
    return CompressorSpec::logarithmic(j.at("scale"), j.at("offset"));
  throw std::invalid_argument("unknown compressor kind: " + kind);
}

json to_json(const FilterbankSpec& fb) {
  return json{{"num_bands", fb.num_bands},
              {"f_low", fb.f_low},
              {"f_high", fb.f_high},
              {"fir_length", fb.fir_length},
              {"sample_rate", fb.sample_rate}};
}

void filterbank_from_json(const json& j, FilterbankSpec& fb) {
  fb.num_bands = j.value("num_bands", fb.num_bands);
  fb.f_low = j.value("f_low", fb.f_low);
  fb.f_high = j.value("f_high", fb.f_high);
  fb.fir_length = j.value("fir_length", fb.fir_length);
  fb.sample_rate = j.value("sample_rate", fb.sample_rate);
}

json to_json(const DetectorParams& det) {
  return json{{"beta_attack", det.beta_attack},
              {"beta_release", det.beta_release},
              {"floor_power", det.floor_power}};
}

void detector_from_json(const json& j, DetectorParams& det, int sample_rate) {
  if (j.contains("attack_ms") || j.contains("release_ms")) {
    double attack = j.value("attack_ms", 10.0);
    double release = j.value("release_ms", 50.0);
    det.beta_attack = ansi_beta(attack, sample_rate);
    det.beta_release = ansi_beta(release, sample_rate);
  }
  det.beta_attack = j.value("beta_attack", det.beta_attack);
  det.beta_release = j.value("beta_release", det.beta_release);
  if (j.contains("floor_db"))
    det.floor_power = db_to_power(j.at("floor_db").get<double>());
  det.floor_power = j.value("floor_power", det.floor_power);
}

json to_json(const SpeechlikeParams& p) {
  return json{{"mod_rate_hz", p.mod_rate_hz},
              {"syllabic_db_sigma", p.syllabic_db_sigma},
              {"phonemic_db_sigma", p.phonemic_db_sigma},
              {"gap_bias", p.gap_bias},
              {"gap_softness", p.gap_softness},
              {"gap_floor_db", p.gap_floor_db},
              {"constant_modulator", p.constant_modulator}};
}

void speech_from_json(const json& j, SpeechlikeParams& p) {
  p.mod_rate_hz = j.value("mod_rate_hz", p.mod_rate_hz);
  p.syllabic_db_sigma = j.value("syllabic_db_sigma", p.syllabic_db_sigma);
  p.phonemic_db_sigma = j.value("phonemic_db_sigma", p.phonemic_db_sigma);
  p.gap_bias = j.value("gap_bias", p.gap_bias);
  p.gap_softness = j.value("gap_softness", p.gap_softness);
  p.gap_floor_db = j.value("gap_floor_db", p.gap_floor_db);
  p.constant_modulator = j.value("constant_modulator", p.constant_modulator);
}

json to_json(const SourceSpec& src) {
  json j;
  switch (src.kind) {
    case SourceSpec::Kind::white:
      j["kind"] = "white";
      break;
    case SourceSpec::Kind::speechlike:
      j["kind"] = "speechlike";
      j["speech"] = to_json(src.speech);
      break;
    case SourceSpec::Kind::wav:
      j["kind"] = "wav";
      j["path"] = src.path;
      break;
  }
  j["level_db"] = src.level_db;
  j["seed"] = src.seed;
  return j;
}

SourceSpec source_from_json(const json& j) {
  SourceSpec src;
  std::string kind = j.value("kind", "speechlike");
  if (kind == "white")
    src.kind = SourceSpec::Kind::white;
  else if (kind == "speechlike")
    src.kind = SourceSpec::Kind::speechlike;
  else if (kind == "wav")
    src.kind = SourceSpec::Kind::wav;
  else
    throw std::invalid_argument("unknown source kind: " + kind);
  src.level_db = j.value("level_db", 0.0);
  src.seed = j.value("seed", std::uint64_t{1});
  src.path = j.value("path", std::string{});
  if (j.contains("speech")) speech_from_json(j.at("speech"), src.speech);
  if (src.kind == SourceSpec::Kind::wav && src.path.empty())
    throw std::invalid_argument("wav source needs a path");
  return src;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["duration_s"] = cfg.duration_s;
  j["settle_s"] = cfg.settle_s;
  j["output_dir"] = cfg.output_dir;
  j["snr_sweep_db"] = cfg.snr_sweep_db;
  json crs = json::array();
  for (double cr : cfg.cr_list) crs.push_back(cr_to_json(cr));
  j["cr_list"] = crs;
  j["drc"]["filterbank"] = to_json(cfg.drc.filterbank);
  j["drc"]["detector"] = to_json(cfg.drc.detector);
  json comps = json::array();
  for (const auto& spec : cfg.drc.compressors) comps.push_back(to_json(spec));
  j["drc"]["compressors"] = comps;
  json sources = json::array();
  for (const auto& src : cfg.sources) sources.push_back(to_json(src));
  j["sources"] = sources;
  return j;
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.name = experiment;
  cfg.drc.filterbank = FilterbankSpec{};
  cfg.drc.detector = make_detector(10.0, 50.0, cfg.drc.filterbank.sample_rate);
  cfg.drc.compressors.assign(
      static_cast<std::size_t>(cfg.drc.filterbank.num_bands),
      CompressorSpec::power_law(3.0, 0.0));

  SourceSpec target;
  target.kind = SourceSpec::Kind::speechlike;
  target.level_db = 0.0;
  target.seed = 1;
  SourceSpec noise;
  noise.kind = SourceSpec::Kind::white;
  noise.level_db = 0.0;
  noise.seed = 2;
  cfg.sources = {target, noise};

  if (experiment == "fig5") {
    // defaults as initialized: two 0 dB sources, 3:1 power law
  } else if (experiment == "fig6") {
    cfg.snr_sweep_db = {-30.0, 0.0, 30.0};
  } else if (experiment == "fig7" || experiment == "fig8") {
    for (int s = -30; s <= 30; s += 5) cfg.snr_sweep_db.push_back(s);
    cfg.cr_list = {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()};
    // dB-domain knee placed below the operating range so the sweep stays in
    // the constant-ratio region; corners rounded for smooth gain curves.
    CompressorSpec knee = CompressorSpec::knee(0.0, -55.0, 3.0, 40.0, 10.0);
    cfg.drc.compressors.assign(
        static_cast<std::size_t>(cfg.drc.filterbank.num_bands), knee);
  } else if (experiment == "process") {
    // defaults as initialized
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& experiment,
                             const std::string& path) {
  ExperimentConfig cfg = default_config(experiment);
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  json j = json::parse(in);

  cfg.name = j.value("name", cfg.name);
  cfg.duration_s = j.value("duration_s", cfg.duration_s);
  cfg.settle_s = j.value("settle_s", cfg.settle_s);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (j.contains("snr_sweep_db"))
    cfg.snr_sweep_db = j.at("snr_sweep_db").get<std::vector<double>>();
  if (j.contains("cr_list")) {
    cfg.cr_list.clear();
    for (const auto& item : j.at("cr_list"))
      cfg.cr_list.push_back(cr_from_json(item));
  }
  if (j.contains("drc")) {
    const json& drc = j.at("drc");
    if (drc.contains("filterbank"))
      filterbank_from_json(drc.at("filterbank"), cfg.drc.filterbank);
    if (drc.contains("detector"))
      detector_from_json(drc.at("detector"), cfg.drc.detector,
                         cfg.drc.filterbank.sample_rate);
    if (drc.contains("compressor")) {
      cfg.drc.compressors.assign(
          static_cast<std::size_t>(cfg.drc.filterbank.num_bands),
          spec_from_json(drc.at("compressor")));
    }
    if (drc.contains("compressors")) {
      cfg.drc.compressors.clear();
      for (const auto& item : drc.at("compressors"))
        cfg.drc.compressors.push_back(spec_from_json(item));
    } else if (drc.contains("filterbank") && !drc.contains("compressor")) {
      // band count may have changed; re-broadcast the first compressor
      cfg.drc.compressors.assign(
          static_cast<std::size_t>(cfg.drc.filterbank.num_bands),
          cfg.drc.compressors.front());
    }
  }
  if (j.contains("sources")) {
    cfg.sources.clear();
    for (const auto& item : j.at("sources"))
      cfg.sources.push_back(source_from_json(item));
  }
  validate(cfg.drc);
  return cfg;
}

std::string to_json_string(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

void apply_overrides(ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& out_dir) {
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  SplitMix64 master(RngSeed{seed});
  for (std::size_t i = 0; i < cfg.sources.size(); ++i)
    cfg.sources[i].seed = master.fork(i).value;
}

void write_resolved_config(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  std::string path = cfg.output_dir + "/config.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write config");
  out << to_json_string(cfg);
}

}  // namespace drclab
