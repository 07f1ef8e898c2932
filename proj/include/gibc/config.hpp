#ifndef GIBC_CONFIG_HPP
#define GIBC_CONFIG_HPP

// Run configuration: a key = value file plus overrides. Keys mirror the
// RunConfig fields one to one; unknown keys are rejected.

#include "gibc/annulus.hpp"
#include "gibc/common.hpp"
#include "gibc/csv_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gibc {

/// Parses "a+bi", "a-bi", "a", "bi" (j accepted for i).
inline cplx parse_complex(std::string s)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
    if (s.empty()) throw FormatError("empty complex value");
    const std::string where = "complex value '" + s + "'";
    if (s.back() != 'i' && s.back() != 'j') return {detail::parse_double(s, where), 0.0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](std::string t) {
        if (!t.empty() && t[0] == '+') t.erase(0, 1);
        if (t.empty()) return 1.0;
        if (t == "-") return -1.0;
        return detail::parse_double(t, where);
    };
    if (split == std::string::npos) return {0.0, imag_of(s)};
    return {detail::parse_double(s.substr(0, split), where), imag_of(s.substr(split))};
}

inline std::string format_complex(cplx z)
{
    return detail::fmt17(z.real()) + (std::signbit(z.imag()) ? "" : "+") + detail::fmt17(z.imag()) + "i";
}

struct RunConfig {
    // forward model
    double rho = 0.5;
    cplx eta{5.0, 2.0};
    cplx gamma{10.0, 1.0};
    int kernel_truncation = 20;
    int collocation_points = 64;
    // operator noise A_ij (1 + delta E_ij)
    double delta = 0.02;
    std::uint64_t seed = 1;
    // deterministic current noise g + delta e^{i p theta} for impedance recovery
    double current_noise = 0.0;
    int current_noise_mode = 1;
    // reconstruction
    int grid_resolution = 101;
    double grid_margin = 0.1;
    double cutoff = 1e-8;
    double threshold = 0.3;
    double tau = 1.2;
    std::string indicator = "W";  ///< W, or P for P alongside W
    // impedance recovery
    int impedance_points = 256;
    int series_order = 10;
    std::vector<int> impedance_modes{1, 2};
    std::vector<std::string> impedance_data;  ///< Cauchy CSV files; empty for synthetic pairs
    std::string output_dir = "gibc_out";

    static const std::vector<std::string>& keys()
    {
        static const std::vector<std::string> k{
            "rho", "eta", "gamma", "kernel_truncation", "collocation_points", "delta", "seed", "current_noise",
            "current_noise_mode", "grid_resolution", "grid_margin", "cutoff", "threshold", "tau", "indicator",
            "impedance_points", "series_order", "impedance_modes", "impedance_data", "output_dir"};
        return k;
    }

    AnnulusConfig annulus() const { return {rho, kernel_truncation, collocation_points}; }
    ImpedancePair impedance() const { return {eta, gamma}; }
    bool wants_p() const { return indicator == "P"; }

    void set(const std::string& key, const std::string& value)
    {
        const std::string where = "config key '" + key + "'";
        auto as_int = [&] {
            const long v = detail::parse_long(value, where);
            if (v < -1000000000L || v > 1000000000L) throw FormatError(where + ": integer out of range");
            return static_cast<int>(v);
        };
        auto as_double = [&] { return detail::parse_double(value, where); };
        auto as_list = [&] {
            std::vector<std::string> out;
            for (auto& f : detail::split_fields(value)) {
                if (!f.empty()) out.push_back(f);
            }
            return out;
        };
        if (key == "rho") rho = as_double();
        else if (key == "eta") eta = parse_complex(value);
        else if (key == "gamma") gamma = parse_complex(value);
        else if (key == "kernel_truncation") kernel_truncation = as_int();
        else if (key == "collocation_points") collocation_points = as_int();
        else if (key == "delta") delta = as_double();
        else if (key == "seed") {
            std::uint64_t v = 0;
            const char* end = value.data() + value.size();
            const auto [ptr, ec] = std::from_chars(value.data(), end, v);
            if (ec != std::errc() || ptr != end || value.empty()) throw FormatError(where + ": expected an unsigned integer");
            seed = v;
        }
        else if (key == "current_noise") current_noise = as_double();
        else if (key == "current_noise_mode") current_noise_mode = as_int();
        else if (key == "grid_resolution") grid_resolution = as_int();
        else if (key == "grid_margin") grid_margin = as_double();
        else if (key == "cutoff") cutoff = as_double();
        else if (key == "threshold") threshold = as_double();
        else if (key == "tau") tau = as_double();
        else if (key == "indicator") indicator = value;
        else if (key == "impedance_points") impedance_points = as_int();
        else if (key == "series_order") series_order = as_int();
        else if (key == "impedance_modes") {
            impedance_modes.clear();
            for (const auto& f : as_list()) impedance_modes.push_back(static_cast<int>(detail::parse_long(f, where)));
        }
        else if (key == "impedance_data") impedance_data = as_list();
        else if (key == "output_dir") output_dir = value;
        else throw FormatError("unknown config key '" + key + "'");
    }

    /// Applies "key=value".
    void apply_override(const std::string& assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw FormatError("override '" + assignment + "' is not of the form key=value");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    void load_file(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open config file " + path.string());
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            try {
                apply_override(line);
            } catch (const FormatError& e) {
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["rho"] = rho;
        j["eta"] = format_complex(eta);
        j["gamma"] = format_complex(gamma);
        j["kernel_truncation"] = kernel_truncation;
        j["collocation_points"] = collocation_points;
        j["delta"] = delta;
        j["seed"] = seed;
        j["current_noise"] = current_noise;
        j["current_noise_mode"] = current_noise_mode;
        j["grid_resolution"] = grid_resolution;
        j["grid_margin"] = grid_margin;
        j["cutoff"] = cutoff;
        j["threshold"] = threshold;
        j["tau"] = tau;
        j["indicator"] = indicator;
        j["impedance_points"] = impedance_points;
        j["series_order"] = series_order;
        j["impedance_modes"] = impedance_modes;
        j["impedance_data"] = impedance_data;
        j["output_dir"] = output_dir;
        return j;
    }

    /// Inverse of to_json; also accepts the "config" object of a run manifest.
    void load_json(const nlohmann::json& j)
    {
        if (!j.is_object()) throw FormatError("config JSON must be an object");
        for (const auto& [key, v] : j.items()) {
            if (v.is_string()) {
                set(key, v.get<std::string>());
            } else if (v.is_number_unsigned() || v.is_number_integer()) {
                set(key, v.dump());
            } else if (v.is_number_float()) {
                set(key, detail::fmt17(v.get<double>()));
            } else if (v.is_array()) {
                std::string joined;
                for (const auto& e : v) {
                    if (!joined.empty()) joined += ',';
                    joined += e.is_string() ? e.get<std::string>() : e.dump();
                }
                set(key, joined);
            } else {
                throw FormatError("config key '" + key + "': unsupported JSON value");
            }
        }
    }

    void load_manifest(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open manifest " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
        if (!j.contains("config")) throw FormatError(path.string() + ": manifest has no \"config\" object");
        load_json(j["config"]);
    }

    void validate() const
    {
        auto fail = [](const std::string& msg) { throw DomainError("config: " + msg); };
        try {
            annulus().validate();
            impedance().validate();
        } catch (const DomainError& e) {
            fail(e.what());
        }
        if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be >= 0");
        if (!(current_noise >= 0.0) || !std::isfinite(current_noise)) fail("current_noise must be >= 0");
        if (current_noise_mode < 1 || current_noise_mode > series_order) fail("current_noise_mode must lie in 1..series_order");
        if (grid_resolution < 2) fail("grid_resolution must be >= 2");
        if (!(grid_margin > 0.0 && grid_margin < 1.0)) fail("grid_margin must lie in (0, 1)");
        if (!(cutoff > 0.0)) fail("cutoff must be positive");
        if (!(threshold > 0.0 && threshold < 1.0)) fail("threshold must lie in (0, 1)");
        if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be positive");
        if (indicator != "W" && indicator != "P") fail("indicator must be W or P");
        if (series_order < 1) fail("series_order must be >= 1");
        if (impedance_points <= 2 * series_order) fail("impedance_points must exceed 2 * series_order");
        if (impedance_data.empty()) {
            if (impedance_modes.size() < 2) fail("impedance_modes needs at least two modes");
            for (int n : impedance_modes) {
                if (n == 0 || std::abs(n) > series_order) fail("impedance_modes entries must be nonzero with |n| <= series_order");
            }
        } else if (impedance_data.size() < 2) {
            fail("impedance_data needs at least two Cauchy files");
        }
        if (output_dir.empty()) fail("output_dir must not be empty");
    }

private:
    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
};

}  // namespace gibc

#endif  // GIBC_CONFIG_HPP
