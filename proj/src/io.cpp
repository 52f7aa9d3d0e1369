#include "cqrel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>

namespace cqrel {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& rows, int dim) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
        throw Error(Error::Kind::io, "state matrix must have dim rows");
    }
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            throw Error(Error::Kind::io, "state matrix row has wrong length");
        }
        for (int j = 0; j < dim; ++j) {
            const json& entry = row[static_cast<std::size_t>(j)];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number()) {
                throw Error(Error::Kind::io, "matrix entries must be [re, im] pairs");
            }
            m(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

CqChannel family_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    const json params = j.value("params", json::object());
    if (family == "bsc") {
        return CqChannel::bsc(params.at("p").get<double>());
    }
    if (family == "pure2") {
        return CqChannel::pure2(params.at("eps").get<double>());
    }
    if (family == "classical") {
        const json& rows = params.at("P");
        if (!rows.is_array() || rows.empty()) {
            throw Error(Error::Kind::io, "classical family needs a transition matrix P");
        }
        const int a = static_cast<int>(rows.size());
        const int b = static_cast<int>(rows[0].size());
        RealMatrix p(a, b);
        for (int i = 0; i < a; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != b) {
                throw Error(Error::Kind::io, "transition matrix rows have mixed lengths");
            }
            for (int y = 0; y < b; ++y) {
                p(i, y) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)]
                              .get<double>();
            }
        }
        return from_classical(p);
    }
    throw Error(Error::Kind::io, "unknown channel family '" + family + "'");
}

}  // namespace

CqChannel channel_from_json(const json& j) {
    try {
        if (!j.is_object()) {
            throw Error(Error::Kind::io, "channel JSON must be an object");
        }
        if (j.contains("family")) {
            return family_from_json(j);
        }
        const int dim = j.at("dim").get<int>();
        if (dim < 1 || dim > config().dim_cap) {
            throw Error(Error::Kind::io, "channel dim out of range");
        }
        const json& states = j.at("states");
        if (!states.is_array() || states.empty()) {
            throw Error(Error::Kind::io, "channel needs a nonempty states array");
        }
        std::vector<DensityOperator> ops;
        ops.reserve(states.size());
        for (const auto& st : states) {
            ops.emplace_back(matrix_from_json(st, dim));
        }
        std::optional<std::string> name;
        if (j.contains("name")) name = j.at("name").get<std::string>();
        return CqChannel(std::move(ops), name);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Error::Kind::io, std::string("malformed channel JSON: ") + e.what());
    }
}

json channel_to_json(const CqChannel& ch) {
    json states = json::array();
    for (const auto& s : ch.states()) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < s.dim(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < s.dim(); ++j) {
                row.push_back({s.matrix()(i, j).real(), s.matrix()(i, j).imag()});
            }
            rows.push_back(std::move(row));
        }
        states.push_back(std::move(rows));
    }
    json out = {{"dim", ch.dim()}, {"states", std::move(states)}};
    if (ch.name()) out["name"] = *ch.name();
    return out;
}

CqChannel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Error::Kind::io, "cannot open channel file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(Error::Kind::io, "cannot parse '" + path + "': " + e.what());
    }
    try {
        return channel_from_json(j);
    } catch (const Error& e) {
        if (e.kind == Error::Kind::construction) {
            throw Error(Error::Kind::io, std::string("invalid channel in '") + path +
                                             "': " + e.what());
        }
        throw;
    }
}

CqChannel resolve_channel_source(const std::string& source) {
    static const std::regex family_spec(R"(^([a-z][a-z0-9_]*)\(([^)]*)\)$)");
    std::smatch match;
    if (std::regex_match(source, match, family_spec)) {
        const std::string family = match[1];
        const std::string arg = match[2];
        try {
            if (family == "bsc") return CqChannel::bsc(std::stod(arg));
            if (family == "pure2") return CqChannel::pure2(std::stod(arg));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Error::Kind::io, "bad family argument in '" + source + "'");
        }
        throw Error(Error::Kind::io, "unknown channel family '" + family + "'");
    }
    return load_channel(source);
}

std::string format_sig12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace cqrel
