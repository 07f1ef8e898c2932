#ifndef GIBC_COMMANDS_HPP
#define GIBC_COMMANDS_HPP

// The four CLI commands as library calls. Each computes everything first and
// then writes its files from the calling thread, ending with a JSON manifest
// whose "config" object reproduces the run.

#include "gibc/config.hpp"
#include "gibc/contour.hpp"
#include "gibc/csv_io.hpp"
#include "gibc/gap_io.hpp"
#include "gibc/impedance.hpp"
#include "gibc/operator.hpp"
#include "gibc/sampling.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace gibc {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace detail {

class Stopwatch {
public:
    double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline fs::path prepare_output_dir(const std::string& dir)
{
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error("cannot create output directory " + dir);
    const fs::path probe = p / ".gibc_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw Error("output directory " + dir + " is not writable");
    }
    fs::remove(probe, ec);
    return p;
}

inline Json manifest_header(const char* command, const RunConfig& cfg)
{
    Json j;
    j["tool"] = "gibc";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = cfg.to_json();
    return j;
}

inline void write_json(const fs::path& path, const Json& j)
{
    const std::string text = j.dump(2) + "\n";
    write_file(path, text.data(), text.size());
}

inline Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json indicator_stats(const IndicatorGrid& ind)
{
    Json j;
    j["points"] = ind.grid.size();
    j["flagged"] = ind.flagged_count();
    std::size_t degenerate = 0, too_large = 0, unreachable = 0;
    for (auto f : ind.flags) {
        degenerate += (f & kFlagDegenerate) != 0;
        too_large += (f & kFlagMorozovTooLarge) != 0;
        unreachable += (f & kFlagMorozovUnreachable) != 0;
    }
    j["flag_counts"] = {{"degenerate", degenerate}, {"morozov_target_above_data", too_large},
                        {"morozov_unreachable", unreachable}};
    if (!ind.alphas.empty()) {
        std::vector<double> a = ind.alphas;
        std::sort(a.begin(), a.end());
        j["alpha"] = {{"min", a.front()}, {"median", a[a.size() / 2]}, {"max", a.back()}};
    }
    return j;
}

}  // namespace detail

struct ForwardResult {
    GapMatrix clean;
    GapMatrix noisy;
    Json manifest;
};

/// Writes gap_noiseless.gibc, gap_noisy.gibc, gap_noisy.csv and forward_manifest.json.
inline ForwardResult cmd_forward(const RunConfig& cfg)
{
    cfg.validate();
    const auto dir = detail::prepare_output_dir(cfg.output_dir);
    detail::Stopwatch total;
    ForwardResult r;
    r.clean = assemble_gap_matrix(cfg.annulus(), cfg.impedance());
    const double assembly_ms = total.ms();
    r.noisy = apply_noise(r.clean, NoiseSpec{cfg.delta, cfg.seed});

    r.manifest = detail::manifest_header("forward", cfg);
    r.manifest["outputs"] = {"gap_noiseless.gibc", "gap_noisy.gibc", "gap_noisy.csv"};
    r.manifest["norms"] = {{"noiseless_spectral", spectral_norm(r.clean.entries)},
                           {"noisy_spectral", spectral_norm(r.noisy.entries)},
                           {"perturbation_spectral", spectral_norm(r.noisy.entries - r.clean.entries)}};
    r.manifest["timings_ms"] = {{"assembly", assembly_ms}, {"total", total.ms()}};

    save_gap_matrix(dir / "gap_noiseless.gibc", r.clean);
    save_gap_matrix(dir / "gap_noisy.gibc", r.noisy);
    save_gap_csv(dir / "gap_noisy.csv", r.noisy);
    detail::write_json(dir / "forward_manifest.json", r.manifest);
    return r;
}

struct ReconstructResult {
    IndicatorGrid w;
    std::optional<IndicatorGrid> p;
    std::vector<Polyline> contour_w;
    std::vector<Polyline> contour_p;
    double separation_w = 0.0;
    Json manifest;
};

/// Sampling reconstruction from a gap-matrix container. The forward parameters and
/// noise level come from the container; grid, cutoff, threshold, tau and indicator
/// from cfg. Writes indicator_W.csv, contour_W.csv (and the P pair) and
/// reconstruct_manifest.json.
inline ReconstructResult cmd_reconstruct(const RunConfig& cfg, const fs::path& matrix_file)
{
    cfg.validate();
    const auto dir = detail::prepare_output_dir(cfg.output_dir);
    detail::Stopwatch total;
    const GapMatrix a = load_gap_matrix(matrix_file);

    detail::Stopwatch t_eig;
    const auto h = hermitian_eigen(pairing_imag(a.entries));
    const auto s = psd_sqrt(h);
    const double eig_ms = t_eig.ms();

    const auto grid = make_lattice_grid(cfg.grid_resolution, cfg.grid_margin);
    ReconstructResult r;
    detail::Stopwatch t_w;
    r.w = indicator_W(grid, s, cfg.cutoff);
    r.contour_w = extract_level_set(r.w, cfg.threshold);
    const double w_ms = t_w.ms();
    double p_ms = 0.0;
    if (cfg.wants_p()) {
        detail::Stopwatch t_p;
        PIndicatorSettings ps;
        ps.tau = cfg.tau;
        r.p = indicator_P(grid, h, s, a.noise, ps);
        r.contour_p = extract_level_set(*r.p, cfg.threshold);
        p_ms = t_p.ms();
    }
    const double rho = a.config.rho;
    r.separation_w = separation_ratio(r.w, 0.8 * rho, rho + 0.15, 1.0 - cfg.grid_margin);

    r.manifest = detail::manifest_header("reconstruct", cfg);
    r.manifest["matrix_file"] = fs::absolute(matrix_file).string();
    r.manifest["matrix"] = {{"collocation_points", a.size()},
                            {"kernel_truncation", a.config.kernel_truncation},
                            {"rho", rho},
                            {"eta", format_complex(a.impedance.eta)},
                            {"gamma", format_complex(a.impedance.gamma)},
                            {"delta", a.noise.delta},
                            {"seed", a.noise.seed}};
    r.manifest["clamped_eigenvalues"] = s.clamped;
    r.manifest["retained_modes"] = static_cast<int>((s.root_values.array() > cfg.cutoff).count());
    Json outputs = {"indicator_W.csv", "contour_W.csv"};
    r.manifest["W"] = detail::indicator_stats(r.w);
    r.manifest["W"]["contours"] = r.contour_w.size();
    r.manifest["W"]["mean_contour_radius"] = r.contour_w.empty() ? 0.0 : r.contour_w.front().mean_radius();
    r.manifest["W"]["separation_ratio"] = r.separation_w;
    if (r.p) {
        outputs.push_back("indicator_P.csv");
        outputs.push_back("contour_P.csv");
        r.manifest["P"] = detail::indicator_stats(*r.p);
        r.manifest["P"]["contours"] = r.contour_p.size();
        r.manifest["P"]["tau"] = cfg.tau;
    }
    r.manifest["outputs"] = outputs;
    r.manifest["timings_ms"] = {{"eigendecomposition", eig_ms}, {"W", w_ms}, {"P", p_ms}, {"total", total.ms()}};

    save_indicator_csv(dir / "indicator_W.csv", r.w);
    save_contour_csv(dir / "contour_W.csv", r.contour_w);
    if (r.p) {
        save_indicator_csv(dir / "indicator_P.csv", *r.p);
        save_contour_csv(dir / "contour_P.csv", r.contour_p);
    }
    detail::write_json(dir / "reconstruct_manifest.json", r.manifest);
    return r;
}

struct ImpedanceResult {
    ConstantRecovery recovery;
    Json manifest;
};

/// Constant (eta, gamma) from Cauchy CSV files, or from synthetic pairs for
/// impedance_modes with current noise g + current_noise e^{i p theta} on every pair.
/// Writes impedance.json; an ill-posed system is recorded there and then rethrown.
inline ImpedanceResult cmd_impedance(const RunConfig& cfg)
{
    cfg.validate();
    const auto dir = detail::prepare_output_dir(cfg.output_dir);
    detail::Stopwatch total;

    std::vector<CauchyPair> pairs;
    Json manifest = detail::manifest_header("impedance", cfg);
    if (!cfg.impedance_data.empty()) {
        for (const auto& file : cfg.impedance_data) pairs.push_back(load_cauchy_csv(file));
        manifest["source"] = "files";
    } else {
        const int order = cfg.series_order;
        for (int n : cfg.impedance_modes) {
            auto pair = synthetic_pair(FourierCoefficients::mode(order, n), cfg.annulus(), cfg.impedance());
            if (cfg.current_noise > 0.0) pair.g = add_current_noise(pair.g, cfg.current_noise, cfg.current_noise_mode);
            pairs.push_back(std::move(pair));
        }
        manifest["source"] = "synthetic";
        manifest["truth"] = {{"eta", detail::complex_json(cfg.eta)}, {"gamma", detail::complex_json(cfg.gamma)}};
    }
    manifest["pairs"] = pairs.size();

    ImpedanceResult r;
    try {
        r.recovery = recover_constants(pairs, cfg.rho, cfg.impedance_points, cfg.series_order);
    } catch (const IllPosedError& e) {
        manifest["status"] = "ill_posed";
        manifest["error"] = e.what();
        manifest["timings_ms"] = {{"total", total.ms()}};
        detail::write_json(dir / "impedance.json", manifest);
        throw;
    }
    manifest["status"] = "ok";
    manifest["eta"] = detail::complex_json(r.recovery.eta);
    manifest["gamma"] = detail::complex_json(r.recovery.gamma);
    manifest["residual_norm"] = r.recovery.residual_norm;
    manifest["condition_number"] = r.recovery.condition_number;
    manifest["warnings"] = r.recovery.warnings;
    manifest["timings_ms"] = {{"total", total.ms()}};
    r.manifest = manifest;
    detail::write_json(dir / "impedance.json", manifest);
    return r;
}

struct DemoResult {
    ForwardResult forward;
    ReconstructResult reconstruct;
    ImpedanceResult impedance;
    double seconds = 0.0;
};

/// forward -> reconstruct (noisy matrix) -> impedance, plus summary.txt.
inline DemoResult cmd_demo(const RunConfig& cfg)
{
    detail::Stopwatch total;
    DemoResult d;
    d.forward = cmd_forward(cfg);
    const fs::path dir(cfg.output_dir);
    d.reconstruct = cmd_reconstruct(cfg, dir / "gap_noisy.gibc");
    d.impedance = cmd_impedance(cfg);
    d.seconds = total.ms() / 1000.0;

    const auto& rec = d.reconstruct;
    char buf[512];
    std::string text = "gibc demo summary\n";
    std::snprintf(buf, sizeof buf, "inclusion radius rho       %.6g\neta, gamma                 %s, %s\n", cfg.rho,
                  format_complex(cfg.eta).c_str(), format_complex(cfg.gamma).c_str());
    text += buf;
    std::snprintf(buf, sizeof buf, "operator noise delta, seed %.6g, %llu\n", cfg.delta,
                  static_cast<unsigned long long>(cfg.seed));
    text += buf;
    std::snprintf(buf, sizeof buf, "separation ratio (W)       %.6g  (median |z|<%.3g over median %.3g<|z|<%.3g)\n",
                  rec.separation_w, 0.8 * cfg.rho, cfg.rho + 0.15, 1.0 - cfg.grid_margin);
    text += buf;
    const double radius = rec.contour_w.empty() ? 0.0 : rec.contour_w.front().mean_radius();
    std::snprintf(buf, sizeof buf, "contours at %.3g            %zu, first mean radius %.6g\n", cfg.threshold,
                  rec.contour_w.size(), radius);
    text += buf;
    const auto& imp = d.impedance.recovery;
    std::snprintf(buf, sizeof buf, "recovered eta              %.10g%+.10gi\nrecovered gamma            %.10g%+.10gi\n",
                  imp.eta.real(), imp.eta.imag(), imp.gamma.real(), imp.gamma.imag());
    text += buf;
    std::snprintf(buf, sizeof buf, "wall time                  %.3f s\n", d.seconds);
    text += buf;
    detail::write_file(dir / "summary.txt", text.data(), text.size());
    return d;
}

}  // namespace gibc

#endif  // GIBC_COMMANDS_HPP
