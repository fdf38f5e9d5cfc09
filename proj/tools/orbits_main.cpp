#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orbits/orbits.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 physics-domain error, 4 numerical
// failure.
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumeric = 4;

struct OutputSink {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit OutputSink(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw orbits::config_error("cannot open output path '" + path + "'");
    stream = &file;
  }
};

void print_summary(const nlohmann::json& j) { std::cerr << j.dump() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbits: planar motion of two identical charges in a uniform magnetic field"};
  app.require_subcommand(1);

  std::string config_path, out_path, svg_path;
  bool allow_escape = false;
  long long interval = -1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_path, "output path (default: stdout)");
  };

  auto* cm = app.add_subcommand("cm", "closed-form center-of-mass circle");
  add_common(cm);
  auto* turning = app.add_subcommand("turning", "turning points and confinement classification");
  add_common(turning);
  auto* simulate = app.add_subcommand("simulate", "integrate the relative motion");
  add_common(simulate);
  simulate->add_option("--svg", svg_path, "write an SVG orbit plot");
  simulate->add_flag("--allow-escape", allow_escape, "permit unbounded runs");
  simulate->add_option("--interval", interval, "allowed-interval index (default 0)");
  auto* period = app.add_subcommand("period", "apsidal angle and periodicity evidence");
  add_common(period);
  period->add_option("--interval", interval, "allowed-interval index");
  auto* sweep = app.add_subcommand("sweep", "parameter-grid classification sweep");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const orbits::RunConfig cfg = orbits::load_config(config_path);
    std::optional<std::size_t> interval_idx;
    if (interval >= 0) interval_idx = static_cast<std::size_t>(interval);

    if (cm->parsed()) {
      OutputSink sink(out_path);
      print_summary(orbits::cmd_cm(cfg, *sink.stream));
    } else if (turning->parsed()) {
      OutputSink sink(out_path);
      *sink.stream << orbits::cmd_turning(cfg).dump(2) << "\n";
    } else if (simulate->parsed()) {
      OutputSink sink(out_path);
      orbits::SimulateFlags flags;
      flags.allow_escape = allow_escape;
      flags.interval = interval_idx;
      flags.svg_path = svg_path;
      const auto outcome = orbits::cmd_simulate(cfg, flags, *sink.stream);
      print_summary(outcome.summary);
      if (outcome.aborted_on_escape) {
        std::cerr << "simulate: trajectory escaped; rerun with --allow-escape "
                     "(partial output written)\n";
        return kExitDomain;
      }
    } else if (period->parsed()) {
      OutputSink sink(out_path);
      *sink.stream << orbits::cmd_period(cfg, interval_idx).dump(2) << "\n";
    } else if (sweep->parsed()) {
      OutputSink sink(out_path);
      orbits::cmd_sweep(cfg, *sink.stream);
    }
  } catch (const orbits::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const orbits::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const orbits::numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
