#pragma once

// Problem description for the triviality analysis: dimension, inequality
// order, exponents, annulus ratio, and the radial coefficient profiles.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "profile.hpp"

namespace liouville {

struct ProblemSpec {
    int n = 3;       // space dimension
    int m = 2;       // order of the differential part
    std::optional<int> k;  // polyharmonic order when the operator is (-Delta)^k
    double lambda = 2.0;   // absorption exponent, > 1
    double sigma = 2.0;    // annulus ratio, > 1
    RadialProfile a = RadialProfile::constant(1.0);
    RadialProfile b = RadialProfile::constant(1.0);
    std::optional<RadialProfile> f;  // lower bound in b >= a^lambda * f
    double r0_neighborhood = 10.0;   // radius below which no data is trusted

    void validate() const {
        if (n < 1) throw std::invalid_argument("problem: need n >= 1");
        if (m < 1) throw std::invalid_argument("problem: need m >= 1");
        if (k && (*k < 1 || 2 * *k != m))
            throw std::invalid_argument("problem: polyharmonic order k needs m = 2k");
        if (!(lambda > 1.0)) throw std::invalid_argument("problem: need lambda > 1");
        if (!(sigma > 1.0)) throw std::invalid_argument("problem: need sigma > 1");
        if (!(r0_neighborhood > 0.0))
            throw std::invalid_argument("problem: need r0_neighborhood > 0");
    }

    // Exponent boundary for pure power weights b ~ r^l with a ~ 1: the
    // forcing integral diverges exactly when l >= (n - m) * lambda - n,
    // which for the polyharmonic case m = 2k reads (n - 2k) * lambda - n.
    double critical_power_exponent() const { return double(n - m) * lambda - double(n); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n"] = n;
        j["m"] = m;
        if (k) j["k"] = *k;
        j["lambda"] = lambda;
        j["sigma"] = sigma;
        j["a"] = a.to_json();
        j["b"] = b.to_json();
        if (f) j["f"] = f->to_json();
        j["r0_neighborhood"] = r0_neighborhood;
        return j;
    }

    static ProblemSpec from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw SchemaError("schema error at problem: expected an object");
        ProblemSpec s;
        auto geti = [&](const char* key, int& dst, bool required) {
            if (!j.contains(key)) {
                if (required)
                    throw SchemaError(std::string("schema error at problem: missing '") + key +
                                      "'");
                return;
            }
            if (!j[key].is_number_integer())
                throw SchemaError(std::string("schema error at problem: '") + key +
                                  "' must be an integer");
            dst = j[key].get<int>();
        };
        auto getd = [&](const char* key, double& dst, bool required) {
            if (!j.contains(key)) {
                if (required)
                    throw SchemaError(std::string("schema error at problem: missing '") + key +
                                      "'");
                return;
            }
            if (!j[key].is_number())
                throw SchemaError(std::string("schema error at problem: '") + key +
                                  "' must be a number");
            dst = j[key].get<double>();
        };
        geti("n", s.n, true);
        geti("m", s.m, true);
        if (j.contains("k")) {
            int kk = 0;
            geti("k", kk, true);
            s.k = kk;
        }
        getd("lambda", s.lambda, true);
        getd("sigma", s.sigma, false);
        getd("r0_neighborhood", s.r0_neighborhood, false);
        if (!j.contains("a")) throw SchemaError("schema error at problem: missing 'a'");
        if (!j.contains("b")) throw SchemaError("schema error at problem: missing 'b'");
        s.a = RadialProfile::from_json(j["a"]);
        s.b = RadialProfile::from_json(j["b"]);
        if (j.contains("f")) s.f = RadialProfile::from_json(j["f"]);
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("schema error at problem: ") + e.what());
        }
        return s;
    }
};

}  // namespace liouville
