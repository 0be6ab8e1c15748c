#pragma once

// Initial data q0(x) on [-L, L].

#include "core.hpp"
#include "interp.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nnls {

enum class PotentialKind { zero, box, gaussian, samples };

inline std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::box: return "box";
        case PotentialKind::gaussian: return "gaussian";
        case PotentialKind::samples: return "samples";
    }
    return "?";
}

struct Potential {
    PotentialKind kind = PotentialKind::zero;
    Complex amplitude{0.0, 0.0};
    int sigma = 1;             // +1 focusing, -1 defocusing
    double half_width = 10.0;  // L
    std::size_t samples = 2048;  // N: grid size for sampled data and exports

    // box: q = amplitude on [left, right]
    double left = -1.0, right = 1.0;
    // gaussian: amplitude * exp(-(x - center)^2 / (2 width^2))
    double width = 1.0, center = 0.0;
    // samples: amplitude * spline(values) on x_j = -L + j * 2L / N
    std::vector<Complex> values;

    static Potential zero(int sigma = 1, double L = 10.0) {
        Potential p;
        p.sigma = sigma;
        p.half_width = L;
        p.validate();
        return p;
    }
    static Potential box(Complex A, double left, double right, int sigma, double L = 10.0) {
        Potential p;
        p.kind = PotentialKind::box;
        p.amplitude = A;
        p.left = left;
        p.right = right;
        p.sigma = sigma;
        p.half_width = L;
        p.validate();
        return p;
    }
    static Potential gaussian(Complex A, double width, int sigma, double L = 20.0, double center = 0.0) {
        Potential p;
        p.kind = PotentialKind::gaussian;
        p.amplitude = A;
        p.width = width;
        p.center = center;
        p.sigma = sigma;
        p.half_width = L;
        p.validate();
        return p;
    }
    static Potential sampled(std::vector<Complex> v, int sigma, double L) {
        Potential p;
        p.kind = PotentialKind::samples;
        p.amplitude = 1.0;
        p.samples = v.size();
        p.values = std::move(v);
        p.sigma = sigma;
        p.half_width = L;
        p.validate();
        return p;
    }

    void validate() {
        if (sigma != 1 && sigma != -1) throw InvalidInput("sigma must be +1 or -1");
        if (!(half_width > 0) || !std::isfinite(half_width)) throw InvalidInput("L must be positive");
        if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
            throw InvalidInput("amplitude must be finite");
        switch (kind) {
            case PotentialKind::zero: break;
            case PotentialKind::box:
                if (!(left < right)) throw InvalidInput("box needs left < right");
                if (left < -half_width || right > half_width)
                    throw TruncationTooSmall("box support exceeds the truncation window [-L, L]");
                break;
            case PotentialKind::gaussian: {
                if (!(width > 0)) throw InvalidInput("gaussian width must be positive");
                const double edge = half_width - std::abs(center);
                if (edge <= 0 || std::exp(-edge * edge / (2 * width * width)) > 1e-14)
                    throw TruncationTooSmall("gaussian tail at +-L exceeds 1e-14 of its peak; increase L");
                break;
            }
            case PotentialKind::samples:
                if (values.size() < 4) throw InvalidInput("sampled potential needs at least 4 values");
                samples = values.size();
                spline_ = UniformSpline(-half_width, 2 * half_width / double(samples), values);
                break;
        }
    }

    Complex operator()(double x) const {
        if (x < -half_width || x > half_width) return 0.0;
        switch (kind) {
            case PotentialKind::zero: return 0.0;
            case PotentialKind::box: return (x >= left && x <= right) ? amplitude : Complex{};
            case PotentialKind::gaussian: {
                const double u = (x - center) / width;
                return amplitude * std::exp(-0.5 * u * u);
            }
            case PotentialKind::samples:
                if (x > spline_.back()) return 0.0;
                return amplitude * spline_(x);
        }
        return 0.0;
    }

    // Points in [-L, L] where q(x) or q(-x) is discontinuous, plus the ends.
    std::vector<double> breakpoints() const {
        std::vector<double> b{-half_width, half_width};
        if (kind == PotentialKind::box) {
            for (double v : {left, right, -left, -right}) b.push_back(v);
        }
        if (kind == PotentialKind::samples) {
            b.push_back(spline_.back());
            b.push_back(-spline_.back());
        }
        std::sort(b.begin(), b.end());
        std::vector<double> out;
        for (double v : b) {
            v = std::clamp(v, -half_width, half_width);
            if (out.empty() || v - out.back() > 1e-13) out.push_back(v);
        }
        return out;
    }

    bool is_zero() const { return kind == PotentialKind::zero || amplitude == Complex{}; }

private:
    UniformSpline spline_;
};

inline Complex complex_from_json(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidInput(std::string(what) + " must be a number or a [re, im] pair");
}

inline nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline Potential potential_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("potential must be a JSON object");
    Potential p;
    const std::string kind = j.value("kind", std::string());
    if (kind == "zero") p.kind = PotentialKind::zero;
    else if (kind == "box") p.kind = PotentialKind::box;
    else if (kind == "gaussian") p.kind = PotentialKind::gaussian;
    else if (kind == "samples") p.kind = PotentialKind::samples;
    else throw InvalidInput("unknown potential kind '" + kind + "'");
    try {
        p.amplitude = j.contains("amplitude") ? complex_from_json(j["amplitude"], "amplitude")
                                              : Complex(p.kind == PotentialKind::samples ? 1.0 : 0.0);
        p.sigma = j.value("sigma", 1);
        p.half_width = j.value("L", p.kind == PotentialKind::gaussian ? 20.0 : 10.0);
        p.samples = j.value("N", std::size_t{2048});
        const auto params = j.value("params", nlohmann::json::object());
        if (!params.is_object()) throw InvalidInput("params must be an object");
        p.left = params.value("left", -1.0);
        p.right = params.value("right", 1.0);
        p.width = params.value("width", 1.0);
        p.center = params.value("center", 0.0);
        if (p.kind == PotentialKind::samples) {
            if (!params.contains("values") || !params["values"].is_array())
                throw InvalidInput("samples potential needs params.values");
            for (auto& v : params["values"]) p.values.push_back(complex_from_json(v, "sample value"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("potential: ") + e.what());
    }
    p.validate();
    return p;
}

inline nlohmann::json to_json(const Potential& p) {
    nlohmann::json j;
    j["kind"] = to_string(p.kind);
    j["amplitude"] = complex_to_json(p.amplitude);
    j["sigma"] = p.sigma;
    j["L"] = p.half_width;
    j["N"] = p.samples;
    nlohmann::json params = nlohmann::json::object();
    if (p.kind == PotentialKind::box) params = {{"left", p.left}, {"right", p.right}};
    if (p.kind == PotentialKind::gaussian) params = {{"width", p.width}, {"center", p.center}};
    if (p.kind == PotentialKind::samples) {
        params["values"] = nlohmann::json::array();
        for (auto v : p.values) params["values"].push_back(complex_to_json(v));
    }
    j["params"] = params;
    return j;
}

}  // namespace nnls
