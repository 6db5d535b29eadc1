#include "kronmde/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kronmde {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw ContractError("model field '" + path + "': " + why);
}

const ordered_json& need(const ordered_json& j, const char* key) {
    if (!j.contains(key)) bad_field(key, "missing");
    return j.at(key);
}

double as_double(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) bad_field(path, "expected a number");
    return j.get<double>();
}

int as_int(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_field(path, "expected an integer");
    return j.get<int>();
}

cx as_complex(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) bad_field(path, "expected [re, im]");
    return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

Mat as_matrix(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad_field(path, "expected a non-empty row array");
    const int rows = static_cast<int>(j.size());
    const int cols = j[0].is_array() ? static_cast<int>(j[0].size()) : 0;
    if (cols == 0) bad_field(path, "expected rows of [re, im] pairs");
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            bad_field(path, "ragged rows");
        for (int c = 0; c < cols; ++c) {
            std::ostringstream os;
            os << path << "[" << r << "][" << c << "]";
            m(r, c) = as_complex(row[c], os.str());
        }
    }
    return m;
}

Eigen::MatrixXd as_real_matrix(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad_field(path, "expected a non-empty row array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols) bad_field(path, "ragged rows");
        for (int c = 0; c < cols; ++c) {
            std::ostringstream os;
            os << path << "[" << r << "][" << c << "]";
            m(r, c) = as_double(j[r][c], os.str());
        }
    }
    return m;
}

std::vector<Mat> as_matrix_list(const ordered_json& j, const std::string& path) {
    if (!j.is_array()) bad_field(path, "expected an array of matrices");
    std::vector<Mat> v;
    v.reserve(j.size());
    for (size_t k = 0; k < j.size(); ++k) {
        std::ostringstream os;
        os << path << "[" << k << "]";
        v.push_back(as_matrix(j[k], os.str()));
    }
    return v;
}

std::vector<double> as_double_list(const ordered_json& j, const std::string& path) {
    if (!j.is_array()) bad_field(path, "expected an array of numbers");
    std::vector<double> v;
    for (size_t k = 0; k < j.size(); ++k) {
        std::ostringstream os;
        os << path << "[" << k << "]";
        v.push_back(as_double(j[k], os.str()));
    }
    return v;
}

ordered_json complex_json(cx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_json(const Mat& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json real_matrix_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

KroneckerModel parse_model(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ContractError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ContractError("model file: top level must be an object");

    KroneckerModel m;
    m.structure.L = as_int(need(j, "L"), "L");
    m.variances.N = as_int(need(j, "N"), "N");
    m.structure.ell = as_int(need(j, "ell"), "ell");
    m.structure.alpha_tilde = as_matrix_list(need(j, "alpha_tilde"), "alpha_tilde");
    m.structure.beta_tilde = as_matrix_list(need(j, "beta_tilde"), "beta_tilde");
    m.structure.gamma_tilde = as_matrix_list(need(j, "gamma_tilde"), "gamma_tilde");

    const auto& v = need(j, "variances");
    if (!v.is_object()) bad_field("variances", "expected an object");
    std::string kind = need(v, "kind").is_string() ? v.at("kind").get<std::string>() : "";
    if (kind == "flat") {
        m.variances.kind = VarianceKind::Flat;
        m.variances.s_scale = as_double_list(need(v, "s_scale"), "variances.s_scale");
        m.variances.t_scale = as_double_list(need(v, "t_scale"), "variances.t_scale");
    } else if (kind == "banded") {
        m.variances.kind = VarianceKind::Banded;
        m.variances.width = as_int(need(v, "width"), "variances.width");
        m.variances.s_scale = as_double_list(need(v, "s_scale"), "variances.s_scale");
        m.variances.t_scale = as_double_list(need(v, "t_scale"), "variances.t_scale");
    } else if (kind == "explicit") {
        m.variances.kind = VarianceKind::Explicit;
        const auto& s = need(v, "s");
        const auto& t = need(v, "t");
        if (!s.is_array()) bad_field("variances.s", "expected an array");
        if (!t.is_array()) bad_field("variances.t", "expected an array");
        for (size_t k = 0; k < s.size(); ++k) {
            std::ostringstream os;
            os << "variances.s[" << k << "]";
            m.variances.s_full.push_back(as_real_matrix(s[k], os.str()));
        }
        for (size_t k = 0; k < t.size(); ++k) {
            std::ostringstream os;
            os << "variances.t[" << k << "]";
            m.variances.t_full.push_back(as_real_matrix(t[k], os.str()));
        }
    } else {
        bad_field("variances.kind", "expected \"flat\", \"banded\" or \"explicit\"");
    }

    m.expectation.a_tilde = as_matrix_list(need(j, "a_tilde"), "a_tilde");

    if (j.contains("kappa")) {
        const auto& k = j.at("kappa");
        if (!k.is_object()) bad_field("kappa", "expected an object");
        m.kappa.k1 = as_double(need(k, "k1"), "kappa.k1");
        m.kappa.k2 = as_double(need(k, "k2"), "kappa.k2");
        m.kappa.k3 = as_double(need(k, "k3"), "kappa.k3");
    }
    return m;
}

std::string serialize_model(const KroneckerModel& m) {
    ordered_json j;
    j["L"] = m.structure.L;
    j["N"] = m.variances.N;
    j["ell"] = m.structure.ell;
    auto fam = [](const std::vector<Mat>& v) {
        ordered_json a = ordered_json::array();
        for (const auto& x : v) a.push_back(matrix_json(x));
        return a;
    };
    j["alpha_tilde"] = fam(m.structure.alpha_tilde);
    j["beta_tilde"] = fam(m.structure.beta_tilde);
    j["gamma_tilde"] = fam(m.structure.gamma_tilde);

    ordered_json v;
    switch (m.variances.kind) {
        case VarianceKind::Flat:
            v["kind"] = "flat";
            v["s_scale"] = m.variances.s_scale;
            v["t_scale"] = m.variances.t_scale;
            break;
        case VarianceKind::Banded:
            v["kind"] = "banded";
            v["width"] = m.variances.width;
            v["s_scale"] = m.variances.s_scale;
            v["t_scale"] = m.variances.t_scale;
            break;
        case VarianceKind::Explicit: {
            v["kind"] = "explicit";
            ordered_json s = ordered_json::array(), t = ordered_json::array();
            for (const auto& x : m.variances.s_full) s.push_back(real_matrix_json(x));
            for (const auto& x : m.variances.t_full) t.push_back(real_matrix_json(x));
            v["s"] = std::move(s);
            v["t"] = std::move(t);
            break;
        }
    }
    j["variances"] = std::move(v);
    j["a_tilde"] = fam(m.expectation.a_tilde);
    j["kappa"] = {{"k1", m.kappa.k1}, {"k2", m.kappa.k2}, {"k3", m.kappa.k3}};
    return j.dump();
}

KroneckerModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

void save_model_file(const KroneckerModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write model file: " + path);
    out << serialize_model(m) << "\n";
}

std::string model_hash(const KroneckerModel& m) {
    const std::string s = serialize_model(m);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<std::vector<cx>> example_zeta_set(const KroneckerModel& m) {
    const int L = m.L();
    if (!m.variances.is_flat()) return std::nullopt;
    for (double s : m.variances.s_scale)
        if (s != 0.0) return std::nullopt;
    for (const auto& a : m.structure.alpha_tilde)
        if (a.norm() != 0.0) return std::nullopt;
    for (const auto& g : m.structure.gamma_tilde)
        if (g.norm() != 0.0) return std::nullopt;
    if (m.ell() != L * L) return std::nullopt;
    // beta must cover each matrix unit exactly once, all with the same flat
    // variance 1/(N L) (total second moment 1/L per row as in the closed form)
    std::vector<int> seen(L * L, 0);
    double scale = -1;
    for (int k = 0; k < m.ell(); ++k) {
        const Mat& b = m.structure.beta_tilde[k];
        int unit = -1;
        for (int p = 0; p < L; ++p)
            for (int q = 0; q < L; ++q) {
                if (b(p, q) == cx(0, 0)) continue;
                if (unit >= 0 || b(p, q) != cx(1, 0)) return std::nullopt;
                unit = p * L + q;
            }
        if (unit < 0) return std::nullopt;
        seen[unit]++;
        double t = m.variances.t_scale[k];
        if (scale < 0) scale = t;
        if (t != scale) return std::nullopt;
    }
    for (int u : seen)
        if (u != 1) return std::nullopt;
    if (std::abs(scale * m.N() * L - 1.0) > 1e-12) return std::nullopt;
    // constant diagonal expectation
    const Mat& a0 = m.expectation.a_tilde[0];
    for (const auto& a : m.expectation.a_tilde)
        if ((a - a0).norm() != 0.0) return std::nullopt;
    for (int p = 0; p < L; ++p)
        for (int q = 0; q < L; ++q)
            if (p != q && a0(p, q) != cx(0, 0)) return std::nullopt;
    std::vector<cx> zs(L);
    for (int p = 0; p < L; ++p) zs[p] = a0(p, p);
    return zs;
}

}  // namespace kronmde
