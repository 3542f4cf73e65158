#include "demandcast/model_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "demandcast/error.hpp"

namespace demandcast {

namespace {

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string hex_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += hex(v[i]);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw InputError("model file: bad number for '" + key + "': '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_double(key, text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

void write_model(std::ostream& out, const SarimaFit& fit) {
    const auto& s = fit.spec;
    const auto& p = fit.params;
    out << "demandcast_model=" << kModelFormatVersion << '\n'
        << "order=" << s.p << ',' << s.d << ',' << s.q << '\n'
        << "seasonal_order=" << s.P << ',' << s.D << ',' << s.Q << ',' << s.s << '\n'
        << "with_intercept=" << (s.with_intercept ? 1 : 0) << '\n'
        << "intercept=" << hex(p.intercept) << '\n'
        << "phi=" << hex_list(p.phi) << '\n'
        << "theta=" << hex_list(p.theta) << '\n'
        << "seasonal_phi=" << hex_list(p.seasonal_phi) << '\n'
        << "seasonal_theta=" << hex_list(p.seasonal_theta) << '\n'
        << "sigma2=" << hex(p.sigma2) << '\n'
        << "loglik=" << hex(fit.loglik) << '\n'
        << "n_obs=" << fit.n_obs << '\n'
        << "converged=" << (fit.converged ? 1 : 0) << '\n';
}

void write_model_file(const std::filesystem::path& path, const SarimaFit& fit) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write model file '" + path.string() + "'");
    write_model(out, fit);
}

SarimaFit read_model(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("model file line " + std::to_string(lineno) + ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw InputError("model file: missing key '" + key + "'");
        return it->second;
    };
    if (get("demandcast_model") != std::to_string(kModelFormatVersion))
        throw InputError("model file: unsupported format version '" + get("demandcast_model") + "'");

    const auto order = parse_list("order", get("order"));
    const auto seasonal = parse_list("seasonal_order", get("seasonal_order"));
    if (order.size() != 3 || seasonal.size() != 4) throw InputError("model file: bad order fields");
    SarimaFit fit;
    fit.spec = SarimaSpec{static_cast<int>(order[0]),    static_cast<int>(order[1]),    static_cast<int>(order[2]),
                          static_cast<int>(seasonal[0]), static_cast<int>(seasonal[1]), static_cast<int>(seasonal[2]),
                          static_cast<int>(seasonal[3]), get("with_intercept") == "1"};
    try {
        fit.spec.validate();
    } catch (const InvalidArgument& e) {
        throw InputError(std::string("model file: ") + e.what());
    }
    fit.params.intercept = parse_double("intercept", get("intercept"));
    fit.params.phi = parse_list("phi", get("phi"));
    fit.params.theta = parse_list("theta", get("theta"));
    fit.params.seasonal_phi = parse_list("seasonal_phi", get("seasonal_phi"));
    fit.params.seasonal_theta = parse_list("seasonal_theta", get("seasonal_theta"));
    fit.params.sigma2 = parse_double("sigma2", get("sigma2"));
    try {
        fit.params.check_dimensions(fit.spec);
    } catch (const InvalidArgument& e) {
        throw InputError(std::string("model file: ") + e.what());
    }
    fit.n_obs = static_cast<std::size_t>(parse_double("n_obs", get("n_obs")));
    fit.converged = get("converged") == "1";
    set_information_criteria(fit, parse_double("loglik", get("loglik")));
    return fit;
}

SarimaFit read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model file '" + path.string() + "'");
    return read_model(in);
}

}  // namespace demandcast
