#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqed/cli.hpp"

// cqedsim: config-driven experiment runner for a weakly anharmonic qubit
// dispersively coupled to the modes of a rectangular microwave cavity.

namespace {

struct OptionSpec {
  const char* key;
  const char* help;
};

const std::map<std::string, std::vector<OptionSpec>> kExperimentOptions = {
    {"derive-params", {}},
    {"modes", {{"max-m", "largest m index"}, {"max-n", "largest n index"}}},
    {"critical-power", {{"mode", "cavity mode label"}}},
    {"thermal",
     {{"source-k", "radiation source temperature [K]"},
      {"freq-ghz", "mode frequency [GHz]"}}},
    {"sweep-cavity",
     {{"mode", "cavity mode label"},
      {"power-dbm", "probe power at the instrument [dBm]"},
      {"attenuation-db", "line attenuation to the port [dB, <= 0]"},
      {"phi-b-sq", "qubit pump phase variance (Kerr sign control)"},
      {"span-start-khz", "sweep start detuning [kHz]"},
      {"span-stop-khz", "sweep stop detuning [kHz]"},
      {"points", "frequency points"}}},
    {"hysteresis-map",
     {{"mode", "cavity mode label"},
      {"power-start-dbm", "first probe power [dBm]"},
      {"power-stop-dbm", "last probe power [dBm]"},
      {"power-points", "power points"},
      {"attenuation-db", "line attenuation [dB]"},
      {"phi-b-sq", "qubit pump phase variance"},
      {"span-start-khz", "sweep start detuning [kHz]"},
      {"span-stop-khz", "sweep stop detuning [kHz]"},
      {"points", "frequency points"}}},
    {"two-tone",
     {{"drive-span-mhz", "drive span around the qubit [MHz]"},
      {"drive-points", "drive frequency points"},
      {"power-start-dbm", "first drive power [dBm]"},
      {"power-stop-dbm", "last drive power [dBm]"},
      {"power-points", "power points"}}},
    {"rabi",
     {{"power-dbm", "drive power at the instrument [dBm]"},
      {"t-max-us", "longest pulse [us]"},
      {"points", "pulse-length points"},
      {"anharmonicity-mhz", "qubit anharmonicity override [MHz]"},
      {"dim", "qubit truncation"}}},
    {"rabi-sweep",
     {{"sqrt-neff-min", "smallest drive amplitude"},
      {"sqrt-neff-max", "largest drive amplitude"},
      {"points", "amplitude points"},
      {"dim", "qubit truncation"}}},
    {"t1",
     {{"power-dbm", "pi-pulse drive power [dBm]"},
      {"delay-max-us", "longest delay [us]"},
      {"points", "delay points"},
      {"anharmonicity-mhz", "qubit anharmonicity override [MHz]"},
      {"dim", "qubit truncation"}}},
    {"fit",
     {{"input", "input CSV trace"},
      {"mode", "cavity mode label for coupling/kerr"},
      {"attenuation-db", "line attenuation for kerr [dB]"}}},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cqedsim: dispersive circuit-QED simulator and analysis toolkit"};
  app.set_version_flag("--version", std::string("cqedsim v") + cqed::cli::kVersion);
  app.require_subcommand(0, 1);

  cqed::cli::ExperimentConfig request;
  request.config_ref = "nbse2";

  bool list_only = false;
  auto* list_cmd = app.add_subcommand("list", "list registered experiments");
  list_cmd->callback([&] { list_only = true; });

  std::map<std::string, std::map<std::string, std::string>> option_values;
  for (const auto& info : cqed::cli::experiment_registry()) {
    CLI::App* sub = app.add_subcommand(info.name, info.description);
    sub->add_option("--config", request.config_ref,
                    "device config file or built-in preset (nbse2, al_transmon)");
    sub->add_option("--out", request.out_dir, "output directory");
    sub->add_option("--seed", request.seed, "seed for synthetic measurement noise");
    sub->add_option("--noise-sigma", request.noise_sigma, "Gaussian noise sigma on outputs");
    sub->add_flag("--plot", request.plot, "emit an SVG plot next to the CSV");
    if (info.name == "sweep-cavity")
      sub->add_option("--direction", option_values[info.name]["direction"],
                      "ascending or descending");
    if (info.name == "fit")
      sub->add_option("model", option_values[info.name]["model"],
                      "lorentzian|coupling|kerr|t1|rabi");
    const auto it = kExperimentOptions.find(info.name);
    if (it != kExperimentOptions.end())
      for (const auto& opt : it->second)
        sub->add_option(std::string("--") + opt.key, option_values[info.name][opt.key],
                        opt.help);
    sub->callback([&request, name = info.name] { request.experiment = name; });
  }

  CLI11_PARSE(app, argc, argv);

  if (list_only) {
    cqed::cli::list_experiments(std::cout);
    return 0;
  }
  if (request.experiment.empty()) {
    std::cout << app.help() << "\n";
    cqed::cli::list_experiments(std::cout);
    return 0;
  }

  for (const auto& [key, value] : option_values[request.experiment])
    if (!value.empty()) request.options[key] = value;

  return cqed::cli::run(request, std::cout, std::cerr);
}
