#pragma once

// Matplotlib scripts for a finished run directory. The scripts only read
// CSVs listed in the manifest.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ligep::bench {

struct PlotSpec {
    const char* script;
    const char* csv;
    const char* column;
    const char* ylabel;
    bool log_scale;
};

inline const std::vector<PlotSpec>& plot_specs() {
    static const std::vector<PlotSpec> specs{
        {"plot_state_error.py", "state_error.csv", "rel_err", "relative state error", true},
        {"plot_energy.py", "energy.csv", "energy", "polarized energy", false},
        {"plot_drift.py", "drift.csv", "abs_drift", "|E(t) - E(0)|", true},
        {"plot_gap.py", "gap.csv", "abs_gap", "|E(t) - E_r(t)|", true},
    };
    return specs;
}

/// Write one script per figure family into `<root>/plots` and return their paths.
inline std::vector<std::filesystem::path> emit_plot_scripts(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = root / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("emit_plot_scripts: missing inputs in '" + root.string() + "': manifest.json");
    }
    nlohmann::json manifest;
    {
        std::ifstream in(manifest_path);
        in >> manifest;
    }
    std::vector<std::string> listed;
    for (const auto& f : manifest["fom"]["files"]) listed.push_back(f.get<std::string>());
    for (const auto& run : manifest["runs"])
        for (const auto& f : run["files"]) listed.push_back(f.get<std::string>());

    std::vector<std::string> missing;
    for (const auto& f : listed)
        if (!fs::exists(root / f)) missing.push_back(f);
    if (listed.empty()) missing.push_back("energy.csv");
    if (!missing.empty()) {
        std::string msg = "emit_plot_scripts: missing inputs:";
        for (const auto& m : missing) msg += " " + m;
        throw std::runtime_error(msg);
    }

    const fs::path out_dir = root / "plots";
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    for (const auto& spec : plot_specs()) {
        std::vector<std::string> inputs;
        for (const auto& f : listed) {
            const std::string name = fs::path(f).filename().string();
            if (name == spec.csv) inputs.push_back(f);
        }
        std::ostringstream py;
        py << "import os\n"
           << "import matplotlib\n"
           << "matplotlib.use(\"Agg\")\n"
           << "import matplotlib.pyplot as plt\n"
           << "import numpy as np\n\n"
           << "ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), \"..\")\n"
           << "INPUTS = [\n";
        for (const auto& f : inputs) py << "    \"" << f << "\",\n";
        py << "]\n\n"
           << "fig, ax = plt.subplots(figsize=(7, 4))\n"
           << "for rel in INPUTS:\n"
           << "    data = np.genfromtxt(os.path.join(ROOT, rel), delimiter=\",\", names=True)\n"
           << "    ax.plot(data[\"t\"], data[\"" << spec.column << "\"], label=os.path.dirname(rel))\n";
        if (spec.log_scale) py << "ax.set_yscale(\"log\")\n";
        py << "ax.set_xlabel(\"t\")\n"
           << "ax.set_ylabel(\"" << spec.ylabel << "\")\n"
           << "ax.legend()\n"
           << "fig.tight_layout()\n"
           << "fig.savefig(os.path.join(ROOT, \"plots\", \"" << fs::path(spec.script).stem().string()
           << ".png\"), dpi=150)\n";
        const fs::path path = out_dir / spec.script;
        std::ofstream(path) << py.str();
        written.push_back(path);
    }
    return written;
}

}  // namespace ligep::bench
