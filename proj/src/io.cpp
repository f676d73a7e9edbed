#include "cma/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cma {

using nlohmann::json;

std::string to_json(const ValueFunction& vf) {
    json j;
    j["discount"] = vf.discount;
    j["residual"] = vf.residual;
    j["iterations"] = vf.iterations;
    j["n_actions"] = vf.n_actions;
    j["v"] = vf.v;
    j["q"] = vf.q;
    json policy = json::array();
    for (int a : vf.policy) policy.push_back(to_code(static_cast<Action>(a)));
    j["policy"] = policy;
    return j.dump(2) + "\n";
}

ValueFunction value_function_from_json(const std::string& text) {
    const json j = json::parse(text);
    ValueFunction vf;
    vf.discount = j.at("discount").get<double>();
    vf.residual = j.at("residual").get<double>();
    vf.iterations = j.at("iterations").get<int>();
    vf.n_actions = j.at("n_actions").get<int>();
    vf.v = j.at("v").get<std::vector<double>>();
    vf.q = j.at("q").get<std::vector<double>>();
    for (const auto& code : j.at("policy"))
        vf.policy.push_back(static_cast<int>(action_from_code(code.get<std::string>())));
    if (vf.q.size() != vf.v.size() * vf.n_actions || vf.policy.size() != vf.v.size())
        throw std::invalid_argument("value function file: inconsistent dimensions");
    return vf;
}

std::string to_json(const AlphaSet& set, double p_obs) {
    json j;
    j["p_obs"] = p_obs;
    json alphas = json::array();
    for (const auto& alpha : set.alphas) {
        json a;
        a["action"] = to_code(static_cast<Action>(alpha.action));
        a["values"] = alpha.values;
        alphas.push_back(a);
    }
    j["alphas"] = alphas;
    return j.dump(2) + "\n";
}

AlphaSet alpha_set_from_json(const std::string& text, double* p_obs) {
    const json j = json::parse(text);
    if (p_obs) *p_obs = j.at("p_obs").get<double>();
    AlphaSet set;
    for (const auto& a : j.at("alphas")) {
        AlphaVector alpha;
        alpha.action = static_cast<int>(action_from_code(a.at("action").get<std::string>()));
        alpha.values = a.at("values").get<std::vector<double>>();
        set.alphas.push_back(std::move(alpha));
    }
    if (set.alphas.empty()) throw std::invalid_argument("alpha set file: no alphas");
    return set;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << contents;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : n_columns_(header.size()) {
    add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& fields) {
    if (fields.size() != n_columns_)
        throw std::invalid_argument("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ += ',';
        out_ += escape(fields[i]);
    }
    out_ += "\r\n";
}

std::string CsvWriter::escape(const std::string& field) {
    const bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string CsvWriter::num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("CsvWriter::num: to_chars failed");
    return std::string(buf, end);
}

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }
std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace cma
