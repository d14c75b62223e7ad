#pragma once

// Train-then-extrapolate experiment driver: full-order run, bases from the
// training window, reduced runs at every requested rank, CSV reports and a
// manifest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "ligep/bench/config.hpp"
#include "ligep/diagnostics.hpp"
#include "ligep/fom.hpp"
#include "ligep/pod.hpp"
#include "ligep/rom.hpp"

namespace ligep::bench {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Stage { Fom, Rom, Compare };

struct SeriesSet {
    std::vector<double> energy;
    std::vector<double> drift;
    std::vector<double> gap;
    std::vector<double> state_error;
};

struct RunRecord {
    Method method;
    long rank = 0;
    std::string dir;
    SeriesSet series;
    std::optional<std::size_t> diverged_at;
    std::string failure;
    bool failed = false;
    double wall_seconds = 0.0;
    std::vector<std::string> files;

    bool truncated() const noexcept { return diverged_at.has_value() && !failed; }
};

struct ExperimentResult {
    ExperimentConfig config;
    fs::path root;
    SeriesSet fom;
    std::optional<SeriesSet> hamiltonian_fom;
    std::vector<RunRecord> runs;
    bool solver_failure = false;
    std::string fom_failure;

    const RunRecord* find(Method m, long r) const {
        for (const auto& run : runs)
            if (run.method == m && run.rank == r && !run.failed) return &run;
        return nullptr;
    }
};

namespace detail {

inline void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << text;
    }
    fs::rename(tmp, path);
}

inline void write_series(const fs::path& path, const char* header, double dt,
                         const std::vector<double>& values) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    std::fprintf(f, "%s\n", header);
    for (std::size_t n = 0; n < values.size(); ++n)
        std::fprintf(f, "%.17g,%.17g\n", static_cast<double>(n) * dt, values[n]);
    std::fclose(f);
}

inline void write_spectrum(const fs::path& path, const Vector& sigma) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    std::fprintf(f, "k,sigma\n");
    for (Eigen::Index k = 0; k < sigma.size(); ++k) std::fprintf(f, "%ld,%.17g\n", static_cast<long>(k + 1), sigma(k));
    std::fclose(f);
}

inline void write_matrix(const fs::path& path, const Matrix& m) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            std::fprintf(f, j + 1 < m.cols() ? "%.17g," : "%.17g\n", m(i, j));
    }
    std::fclose(f);
}

/// Columns t, u_1..u_N for every stride-th level.
inline void write_states(const fs::path& path, const Matrix& u, double dt, long stride) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    std::fprintf(f, "t");
    for (Eigen::Index j = 0; j < u.rows(); ++j) std::fprintf(f, ",u%ld", static_cast<long>(j + 1));
    std::fprintf(f, "\n");
    for (Eigen::Index n = 0; n < u.cols(); n += stride) {
        std::fprintf(f, "%.17g", static_cast<double>(n) * dt);
        for (Eigen::Index j = 0; j < u.rows(); ++j) std::fprintf(f, ",%.17g", u(j, n));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline json config_json(const ExperimentConfig& c) {
    std::vector<std::string> methods;
    for (auto m : c.methods) methods.push_back(to_string(m));
    return json{{"model", to_string(c.model)},
                {"domain", {c.a, c.b}},
                {"dx", c.dx},
                {"dt", c.dt},
                {"train_horizon", c.train_horizon},
                {"final_horizon", c.final_horizon},
                {"ranks", c.ranks},
                {"methods", methods},
                {"eta", c.params.kdv.eta},
                {"gamma", c.params.kdv.gamma},
                {"c", c.params.ch.c},
                {"a", c.params.ch.a},
                {"x0", c.params.ch.x0},
                {"output_dir", c.output_dir},
                {"seed", c.seed},
                {"rom_path", c.rom_path},
                {"state_stride", c.state_stride}};
}

inline void log_line(std::ostream* log, const std::string& text) {
    if (log) *log << text << std::endl;
}

}  // namespace detail

/// Execute the experiment and write its artifacts under `config.output_dir`.
///
/// Stage::Fom writes only the full-order series; Stage::Rom runs the full
/// order model over the training window only and writes the reduced energy
/// series; Stage::Compare also runs the full-order model over the whole
/// horizon and writes gap and state-error series.
inline ExperimentResult run_experiment(const ExperimentConfig& config, Stage stage = Stage::Compare,
                                       std::ostream* log = nullptr) {
    config.validate();
    const Model model = config.model;
    const Grid1D grid = Grid1D::from_spacing(config.a, config.b, config.dx);
    const double dt = config.dt;
    const std::size_t n_train = config.train_steps();
    const std::size_t n_final = config.final_steps();
    const ModelParams& params = config.params;

    ExperimentResult result{config, fs::path(config.output_dir), {}, std::nullopt, {}, false, {}};
    fs::create_directories(result.root);
    json manifest;
    manifest["config"] = detail::config_json(config);
    manifest["stage"] = stage == Stage::Fom ? "fom" : stage == Stage::Rom ? "rom" : "compare";
    manifest["runs"] = json::array();

    // Full-order model.
    const std::size_t fom_steps = stage == Stage::Rom ? n_train : n_final;
    const auto fom_start = std::chrono::steady_clock::now();
    FomTrajectory fom{grid, dt, Matrix(), params};
    try {
        fom = simulate_fom(model, grid, dt, fom_steps, params);
    } catch (const SingularMatrixError& e) {
        result.solver_failure = true;
        result.fom_failure = e.what();
    }
    json fom_entry{{"dir", "fom"}, {"steps", fom_steps}};
    fs::create_directories(result.root / "fom");
    if (!result.solver_failure) {
        result.fom.energy = fom_energy_series(model, fom);
        result.fom.drift = drift_series(result.fom.energy);
        detail::write_series(result.root / "fom" / "energy.csv", "t,energy", dt, result.fom.energy);
        detail::write_series(result.root / "fom" / "drift.csv", "t,abs_drift", dt, result.fom.drift);
        fom_entry["files"] = {"fom/energy.csv", "fom/drift.csv"};
        if (config.state_stride > 0) {
            detail::write_states(result.root / "fom" / "states.csv", fom.u, dt, config.state_stride);
            fom_entry["files"].push_back("fom/states.csv");
        }
    } else {
        fom_entry["failure"] = result.fom_failure;
        fom_entry["files"] = json::array();
    }
    fom_entry["wall_seconds"] = detail::seconds_since(fom_start);
    detail::log_line(log, "fom " + to_string(model) + ": " + std::to_string(fom_steps) + " steps" +
                              (result.solver_failure ? " FAILED: " + result.fom_failure : ""));

    // Hamiltonian wave system for the Galerkin baseline.
    Matrix ham;
    bool want_galerkin = false;
    for (auto m : config.methods) want_galerkin = want_galerkin || m == Method::PodGalerkin;
    if (model == Model::Wave && want_galerkin && stage != Stage::Fom && !result.solver_failure) {
        ham = simulate_wave_hamiltonian(grid, dt, fom_steps);
        SeriesSet hs;
        hs.energy = lifted_energy_series(Model::Wave, ham, grid, dt, params);
        hs.drift = drift_series(hs.energy);
        detail::write_series(result.root / "fom" / "hamiltonian_energy.csv", "t,energy", dt, hs.energy);
        detail::write_series(result.root / "fom" / "hamiltonian_drift.csv", "t,abs_drift", dt, hs.drift);
        fom_entry["files"].push_back("fom/hamiltonian_energy.csv");
        fom_entry["files"].push_back("fom/hamiltonian_drift.csv");
        result.hamiltonian_fom = std::move(hs);
    }
    manifest["fom"] = fom_entry;

    if (stage != Stage::Fom && !result.solver_failure) {
        const bool compare = stage == Stage::Compare;
        const Eigen::Index ntr = static_cast<Eigen::Index>(n_train) + 1;
        const Matrix u_train = fom.u.leftCols(ntr);
        const Eigen::Index n = grid.ssize();

        for (const Method method : config.methods) {
            // Spectrum once per method, bases sliced per rank.
            Matrix snapshots;
            std::size_t blocks = 1;
            if (method == Method::LigepRom) {
                const ComponentSet aux = reconstruct_aux(model, u_train, grid, dt, params);
                SnapshotSet z = assemble_snapshots(model, u_train, aux, SnapshotLayout::Global, dt);
                blocks = z.labels.size();
                snapshots = std::move(z.data);
            } else if (model == Model::Wave) {
                snapshots = ham.leftCols(ntr);
            } else {
                snapshots = u_train;
            }
            const auto [u_svd, sigma] = left_singular(snapshots);
            const std::string mname = to_string(method);

            for (const long r : config.ranks) {
                RunRecord rec{method, r, mname + "-r" + std::to_string(r), {}, std::nullopt, {}, false, 0.0, {}};
                const fs::path dir = result.root / rec.dir;
                fs::create_directories(dir);
                const auto start = std::chrono::steady_clock::now();
                if (r > u_svd.cols()) {
                    rec.failed = true;
                    rec.failure = "rank exceeds the snapshot rank bound " + std::to_string(u_svd.cols());
                } else {
                    const ReducedBasis basis{u_svd.leftCols(r), sigma, r, blocks};
                    Matrix lifted_u;
                    try {
                        if (method == Method::LigepRom) {
                            const ReducedOperators ops = reduce_operators(basis.v, grid);
                            const RomPath path = config.rom_path == "tensor" ? RomPath::Tensor : RomPath::Lifted;
                            const RomTrajectory rt = simulate_ligep_rom(model, ops, fom.u.leftCols(2), dt, n_final, params, path);
                            rec.series.energy = rom_energy_series(model, rt.u, ops, grid, dt, params);
                            lifted_u = ops.v * rt.u;
                        } else {
                            const GalerkinModel gm = build_galerkin(model, basis.v, grid, params);
                            const Vector y0 = model == Model::Wave ? Vector(ham.col(0)) : Vector(fom.u.col(0));
                            const GalerkinRun run = simulate_galerkin(gm, basis.v.transpose() * y0, dt, n_final);
                            const Matrix lifted = basis.v * run.y;
                            rec.series.energy = lifted_energy_series(model, lifted, grid, dt, params);
                            lifted_u = model == Model::Wave ? Matrix(lifted.topRows(n)) : lifted;
                            rec.diverged_at = run.diverged_at;
                            rec.failure = run.failure;
                        }
                    } catch (const SingularMatrixError& e) {
                        rec.failed = true;
                        rec.failure = e.what();
                        if (e.step()) rec.diverged_at = *e.step();
                    }
                    if (!rec.failed) {
                        if (!rec.series.energy.empty()) rec.series.drift = drift_series(rec.series.energy);
                        detail::write_series(dir / "energy.csv", "t,energy", dt, rec.series.energy);
                        detail::write_series(dir / "drift.csv", "t,abs_drift", dt, rec.series.drift);
                        rec.files = {rec.dir + "/energy.csv", rec.dir + "/drift.csv"};
                        if (compare) {
                            const std::vector<double>& ref =
                                model == Model::Wave && method == Method::PodGalerkin ? result.hamiltonian_fom->energy
                                                                                      : result.fom.energy;
                            const std::vector<double> ref_cut(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(rec.series.energy.size()));
                            rec.series.gap = gap_series(ref_cut, rec.series.energy);
                            const Matrix ref_u = model == Model::Wave && method == Method::PodGalerkin
                                                     ? Matrix(ham.topRows(n))
                                                     : fom.u;
                            rec.series.state_error = relative_error_series(ref_u, lifted_u);
                            detail::write_series(dir / "gap.csv", "t,abs_gap", dt, rec.series.gap);
                            detail::write_series(dir / "state_error.csv", "t,rel_err", dt, rec.series.state_error);
                            rec.files.push_back(rec.dir + "/gap.csv");
                            rec.files.push_back(rec.dir + "/state_error.csv");
                        }
                        detail::write_spectrum(dir / "spectrum.csv", sigma);
                        detail::write_matrix(dir / "basis.csv", basis.v);
                        rec.files.push_back(rec.dir + "/spectrum.csv");
                        rec.files.push_back(rec.dir + "/basis.csv");
                        if (config.state_stride > 0) {
                            detail::write_states(dir / "states.csv", lifted_u, dt, config.state_stride);
                            rec.files.push_back(rec.dir + "/states.csv");
                        }
                    } else {
                        result.solver_failure = true;
                    }
                }
                rec.wall_seconds = detail::seconds_since(start);
                json entry{{"method", mname},
                           {"rank", r},
                           {"dir", rec.dir},
                           {"files", rec.files},
                           {"wall_seconds", rec.wall_seconds},
                           {"truncated", rec.truncated()},
                           {"failed", rec.failed}};
                if (rec.diverged_at) {
                    entry["diverged_at_step"] = *rec.diverged_at;
                    entry["diverged_at_time"] = static_cast<double>(*rec.diverged_at) * dt;
                }
                if (!rec.failure.empty()) entry["failure"] = rec.failure;
                manifest["runs"].push_back(entry);
                std::string line = mname + " r=" + std::to_string(r) + ": ";
                if (rec.failed) line += "FAILED: " + rec.failure;
                else if (!rec.series.drift.empty()) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "max drift %.3e", max_of(rec.series.drift));
                    line += buf;
                    if (rec.truncated()) line += ", truncated at step " + std::to_string(*rec.diverged_at);
                }
                detail::log_line(log, line);
                result.runs.push_back(std::move(rec));
            }
        }
    }

    manifest["solver_failure"] = result.solver_failure;
    detail::write_text_atomic(result.root / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

}  // namespace ligep::bench
