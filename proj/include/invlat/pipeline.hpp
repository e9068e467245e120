#pragma once

// Command dispatch. Each command reads its inputs from the config, writes
// its artifacts into `out` and returns a JSON summary (also written to
// `<command>.json`).

#include <json.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "invlat/config.hpp"
#include "invlat/ensemble.hpp"
#include "invlat/helmholtz.hpp"
#include "invlat/inverse.hpp"
#include "invlat/io.hpp"
#include "invlat/models.hpp"
#include "invlat/raster.hpp"
#include "invlat/tridiagonal.hpp"
#include "invlat/waveguide.hpp"

namespace invlat {

namespace detail {

inline std::uint64_t command_seed(const RunConfig& cfg) {
  Rng rng = make_stream(cfg.seed, "cli." + to_string(cfg.command));
  return rng();
}

template <class Fn>
void emit(const std::filesystem::path& file, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(file.string(), os.str());
}

inline nlohmann::json report_header(const RunConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = to_string(cfg.command);
  return j;
}

inline std::vector<double> as_vector(std::span<const double> v) { return {v.begin(), v.end()}; }

/// The design summary written by `design` and read back by `simulate`.
struct DesignRecord {
  ChainCouplings couplings;
  double scale = 0.0;
  double e_b = 0.0;
};

inline DesignRecord read_design(const std::filesystem::path& file) {
  auto is = open_input(file.string());
  nlohmann::json j;
  try {
    is >> j;
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InvalidInput("unsupported design schema_version");
    return {ChainCouplings(j.at("couplings").get<std::vector<double>>()), j.at("scale").get<double>(),
            j.at("e_b").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed design JSON " + file.string() + ": " + e.what());
  }
}

inline nlohmann::json run_spectrum(const RunConfig& cfg) {
  auto is = open_input(cfg.couplings->string());
  const auto f = read_couplings_csv(is);
  const auto eig = eig_jacobi(f);
  emit(cfg.out / "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, eig.spectrum); });
  auto j = report_header(cfg);
  j["sites"] = f.sites();
  j["spectrum"] = as_vector(eig.spectrum.values());
  return j;
}

inline nlohmann::json run_invert(const RunConfig& cfg) {
  auto is = open_input(cfg.spectrum->string());
  InverseProblem p{read_spectrum_csv(is), cfg.pins, std::nullopt, command_seed(cfg), cfg.tolerance, cfg.max_iterations,
                   cfg.max_restarts};
  const auto r = newton_solve(p);
  emit(cfg.out / "couplings.csv", [&](std::ostream& os) { write_couplings_csv(os, r.couplings); });
  auto j = report_header(cfg);
  j["couplings"] = as_vector(r.couplings.values());
  j["residual_norm"] = r.residual_norm;
  j["iterations"] = r.iterations;
  j["restarts_used"] = r.restarts_used;
  j["spectral_mismatch"] = spectral_mismatch(r.couplings, p.target);
  return j;
}

inline nlohmann::json run_sample(const RunConfig& cfg) {
  auto is = open_input(cfg.spectrum->string());
  const auto target = read_spectrum_csv(is);
  const auto s = sample_surface(target, cfg.samples, command_seed(cfg), cfg.draw);
  emit(cfg.out / "samples.csv", [&](std::ostream& os) { write_samples_csv(os, s.samples); });
  auto j = report_header(cfg);
  j["requested"] = cfg.samples;
  j["returned"] = s.samples.size();
  j["skipped"] = s.skipped;
  return j;
}

inline nlohmann::json run_distributions(const RunConfig& cfg) {
  EnsembleSpec spec = cfg.ensemble;
  spec.seed = cfg.seed;
  const auto d = coupling_distribution(spec, cfg.threads);
  emit(cfg.out / "histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, d.histogram); });
  const StatRows stats{{"mean", d.mean},
                       {"stddev", d.stddev},
                       {"mode", d.mode},
                       {"pooled", static_cast<double>(d.pooled)},
                       {"skipped_trials", static_cast<double>(d.skipped_trials)}};
  emit(cfg.out / "stats.csv", [&](std::ostream& os) { write_stats_csv(os, stats); });
  auto j = report_header(cfg);
  j["ensemble"] = to_string(spec.kind);
  for (const auto& [k, v] : stats) j[k] = v;
  return j;
}

inline nlohmann::json run_model(const RunConfig& cfg) {
  const auto f = model_couplings(cfg.model);
  const auto expected = expected_spectrum(cfg.model);
  const auto eig = eig_jacobi(f);
  emit(cfg.out / "couplings.csv", [&](std::ostream& os) { write_couplings_csv(os, f); });
  emit(cfg.out / "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, eig.spectrum); });
  auto j = report_header(cfg);
  j["model"] = to_string(cfg.model.tag);
  j["sites"] = cfg.model.sites;
  j["law"] = expected.law;
  j["exact"] = expected.exact;
  double worst = 0.0;
  for (std::size_t i = 0; i < eig.spectrum.size(); ++i) {
    worst = std::max(worst, std::abs(eig.spectrum[i] - expected.levels[i]));
  }
  j["max_level_error"] = worst;
  if (cfg.model.tag == ModelTag::DiracOscillator) j["square_root_r_squared"] = square_root_law_fit(eig.spectrum).r_squared;
  return j;
}

inline nlohmann::json run_design(const RunConfig& cfg) {
  auto is = open_input(cfg.couplings->string());
  const auto f = read_couplings_csv(is);
  const auto eig = eig_jacobi(f);
  const auto e = embed_spectrum(eig.spectrum, cfg.guide, f);
  const auto segments = couplings_to_segments(f, cfg.guide, e.scale);
  const auto g = layout_geometry(segments, cfg.pattern, cfg.guide, cfg.custom_turns);
  emit(cfg.out / "geometry.json", [&](std::ostream& os) { os << geometry_to_json(g).dump(2) << '\n'; });
  emit(cfg.out / "geometry.svg", [&](std::ostream& os) { write_geometry_svg(os, g); });
  emit(cfg.out / "predicted.csv", [&](std::ostream& os) { write_column_csv(os, "E", e.levels); });
  auto j = report_header(cfg);
  j["couplings"] = as_vector(f.values());
  j["segments"] = segments;
  j["scale"] = e.scale;
  j["e_b"] = cfg.guide.e_b;
  j["e_t"] = cfg.guide.e_t();
  j["lambda"] = cfg.guide.lambda;
  j["delta0"] = cfg.guide.delta0;
  j["window"] = {e.lower, e.upper};
  j["predicted"] = e.levels;
  j["pattern"] = to_string(cfg.pattern);
  std::vector<std::string> turns;
  for (Turn t : g.turns) turns.push_back(to_string(t));
  j["turns"] = turns;
  return j;
}

inline nlohmann::json run_simulate(const RunConfig& cfg) {
  auto is = open_input(cfg.geometry->string());
  const auto g = read_geometry_json(is);
  const double h = g.width / static_cast<double>(cfg.cells);
  auto j = report_header(cfg);
  j["h"] = h;
  std::optional<TightBindingModel> tb;
  if (cfg.design) {
    const auto rec = read_design(*cfg.design);
    double e_b = rec.e_b;
    if (cfg.calibrate) {
      e_b = corner_bound_state(cfg.arm * g.width, h, g.width).e_b;
      j["e_b_grid"] = e_b;
    }
    tb = TightBindingModel{rec.couplings, rec.scale, e_b};
  }
  const auto domain = rasterize_mask(g, h);
  const auto op = assemble_laplacian(domain);
  const double et = discrete_threshold(h, g.width);
  const auto modes = lowest_modes(op, {et, 0});
  GuideSpectrum spec;
  spec.e_t = et;
  spec.levels = modes.values;
  if (tb) {
    spec.predicted = tight_binding_levels(tb->couplings, tb->e_b, tb->scale);
    const double half = std::min(tb->e_b, et - tb->e_b);
    for (std::size_t i = 0; i < std::min(spec.levels.size(), spec.predicted.size()); ++i) {
      spec.deviation.push_back((spec.levels[i] - spec.predicted[i]) / half);
    }
  }
  emit(cfg.out / "levels.csv", [&](std::ostream& os) { write_levels_csv(os, spec); });
  if (cfg.write_modes) {
    for (Eigen::Index k = 0; k < modes.vectors.cols(); ++k) {
      const Eigen::VectorXd v = modes.vectors.col(k);
      emit(cfg.out / ("mode_" + std::to_string(k) + ".csv"), [&](std::ostream& os) { write_mode_csv(os, domain, v); });
      emit(cfg.out / ("mode_" + std::to_string(k) + ".bin"), [&](std::ostream& os) { write_mode_binary(os, domain, v); });
    }
    emit(cfg.out / "mask.txt", [&](std::ostream& os) { write_mask_text(os, domain); });
  }
  j["unknowns"] = domain.unknowns();
  j["e_t"] = et;
  j["levels"] = spec.levels;
  if (tb) {
    j["predicted"] = spec.predicted;
    j["deviation"] = spec.deviation;
  }
  return j;
}

inline nlohmann::json run_validate(const RunConfig& cfg) {
  const double h = cfg.h();
  const double width = cfg.guide.width;
  const auto corner = corner_bound_state(cfg.arm * width, h, width);
  auto j = report_header(cfg);
  j["h"] = h;
  j["e_b"] = corner.e_b;
  j["e_t"] = corner.e_t;
  j["ratio"] = corner.ratio;
  std::vector<double> d_all;
  std::vector<double> f_all;
  nlohmann::json shapes = nlohmann::json::object();
  std::vector<double> seps;
  for (double d : cfg.separations()) seps.push_back(d * width);
  for (PairShape shape : cfg.shapes) {
    const auto sweep = splitting_sweep(seps, shape, h, cfg.arm * width, width, cfg.threads);
    emit(cfg.out / ("sweep_" + to_string(shape) + ".csv"), [&](std::ostream& os) { write_sweep_csv(os, sweep); });
    std::vector<double> d;
    std::vector<double> f;
    for (const auto& s : sweep) {
      d.push_back(s.separation);
      f.push_back(s.coupling);
    }
    const auto fit = fit_decay_law(d, f);
    shapes[to_string(shape)] = {{"lambda", fit.lambda}, {"delta0", fit.delta0}, {"correlation", fit.correlation}};
    d_all.insert(d_all.end(), d.begin(), d.end());
    f_all.insert(f_all.end(), f.begin(), f.end());
  }
  const auto fit = fit_decay_law(d_all, f_all);
  j["lambda"] = fit.lambda;
  j["delta0"] = fit.delta0;
  j["correlation"] = fit.correlation;
  j["delta0_over_e_b"] = fit.delta0 / corner.e_b;
  j["splitting_prefactor_over_e_b"] = 2.0 * fit.delta0 / corner.e_b;
  j["shapes"] = shapes;
  return j;
}

}  // namespace detail

/// Runs one command; artifacts and `<command>.json` go to `cfg.out`.
inline nlohmann::json run(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.out.string() + ": " + ec.message());
  nlohmann::json j;
  switch (cfg.command) {
    case Command::Spectrum: j = detail::run_spectrum(cfg); break;
    case Command::Invert: j = detail::run_invert(cfg); break;
    case Command::Sample: j = detail::run_sample(cfg); break;
    case Command::Distributions: j = detail::run_distributions(cfg); break;
    case Command::Model: j = detail::run_model(cfg); break;
    case Command::Design: j = detail::run_design(cfg); break;
    case Command::Simulate: j = detail::run_simulate(cfg); break;
    case Command::Validate: j = detail::run_validate(cfg); break;
  }
  detail::emit(cfg.out / (to_string(cfg.command) + ".json"), [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return j;
}

}  // namespace invlat
