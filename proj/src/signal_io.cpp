#include "ppgid/signal_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ppgid/error.hpp"
#include "ppgid/frame_ingest.hpp"

namespace ppgid {
namespace fs = std::filesystem;

std::string format_real(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string signal_to_csv(const PpgSignal& sig) {
    std::string out = "sample_index,intensity\n";
    for (std::size_t i = 0; i < sig.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_real(sig[i]);
        out += '\n';
    }
    return out;
}

std::string signal_to_json(const PpgSignal& sig) {
    nlohmann::ordered_json j;
    j["sample_rate_hz"] = sig.sample_rate_hz();
    j["samples"] = sig.samples();
    return j.dump() + "\n";
}

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, std::size_t line) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw data_error("malformed CSV at line " + std::to_string(line) + ": '" + field + "'");
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PpgSignal signal_from_csv(const std::string& text, double sample_rate_hz) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || trim(line) != "sample_index,intensity")
        throw data_error("malformed CSV: expected header 'sample_index,intensity'");
    ++lineno;
    std::vector<double> samples;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw data_error("malformed CSV at line " + std::to_string(lineno));
        const double index = parse_double(trim(line.substr(0, comma)), lineno);
        if (index != static_cast<double>(samples.size()))
            throw data_error("malformed CSV: sample_index out of sequence at line " + std::to_string(lineno));
        samples.push_back(parse_double(trim(line.substr(comma + 1)), lineno));
    }
    return {std::move(samples), sample_rate_hz};
}

PpgSignal signal_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        return {j.at("samples").get<std::vector<double>>(), j.at("sample_rate_hz").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed signal JSON: ") + e.what());
    }
}

fs::path sidecar_path(const fs::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

PpgSignal read_signal(const fs::path& path, std::optional<double> fallback_rate_hz) {
    if (!fs::exists(path)) throw data_error("missing signal file: " + path.string());
    if (path.extension() == ".json") return signal_from_json(slurp(path));

    double rate = fallback_rate_hz.value_or(kDefaultFrameRateHz);
    if (const auto side = sidecar_path(path); fs::exists(side)) {
        try {
            rate = nlohmann::json::parse(slurp(side)).at("sample_rate_hz").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw data_error("malformed sidecar " + side.string() + ": " + e.what());
        }
    }
    return signal_from_csv(slurp(path), rate);
}

void write_signal(const PpgSignal& sig, const fs::path& path) {
    auto write = [](const fs::path& p, const std::string& text) {
        if (p.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(p.parent_path(), ec);
        }
        std::ofstream out(p, std::ios::binary);
        if (!out) throw data_error("cannot write " + p.string());
        out << text;
    };
    if (path.extension() == ".json") {
        write(path, signal_to_json(sig));
        return;
    }
    write(path, signal_to_csv(sig));
    nlohmann::ordered_json side;
    side["sample_rate_hz"] = sig.sample_rate_hz();
    write(sidecar_path(path), side.dump() + "\n");
}

}  // namespace ppgid
