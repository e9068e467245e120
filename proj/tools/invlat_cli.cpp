#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "invlat/config.hpp"
#include "invlat/pipeline.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse spectral design of tight-binding chains and bent waveguides"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--seed", seed, "random seed (default 20151117)");
  app.add_option("--threads", threads, "worker threads for ensembles and sweeps")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(2, "UsageError", e.what());
  }

  invlat::RunConfig cfg;
  try {
    cfg = invlat::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (out) cfg.out = *out;
  } catch (const invlat::Error& e) {
    return fail(2, e.kind(), e.what());
  }

  try {
    const auto summary = invlat::run(cfg);
    std::cout << summary.dump(2) << '\n';
  } catch (const invlat::InvalidInput& e) {
    return fail(2, e.kind(), e.what());
  } catch (const invlat::Error& e) {
    return fail(1, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(1, "IOError", e.what());
  }
  return 0;
}
