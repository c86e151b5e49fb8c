#include "ocp/replay.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace ocp {

ReplayReader::ReplayReader(const std::string& path, int expected_k)
    : in_(path), expected_k_(expected_k) {
    if (!in_) throw std::runtime_error("replay: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in_, header)) throw ReplayError(1, "missing header");
    ++line_no_;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "t,f_star,set_sizes")
        throw ReplayError(1, "bad header, expected 't,f_star,set_sizes'");
}

namespace {

bool parse_ll(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

}  // namespace

std::optional<StepTruth> ReplayReader::next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto first = line.find(',');
    auto second = first == std::string::npos ? std::string::npos : line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        line.find(',', second + 1) != std::string::npos)
        throw ReplayError(line_no_, "expected exactly 3 comma-separated columns");

    StepTruth truth;
    if (!parse_ll(line.substr(0, first), truth.t)) throw ReplayError(line_no_, "non-numeric t");
    if (!parse_double(line.substr(first + 1, second - first - 1), truth.f_star))
        throw ReplayError(line_no_, "non-numeric f_star");
    if (!(truth.f_star >= 0.0 && truth.f_star <= 1.0))
        throw ReplayError(line_no_, "f_star outside [0, 1]");

    const std::string sizes = line.substr(second + 1);
    std::size_t pos = 0;
    while (true) {
        std::size_t bar = sizes.find('|', pos);
        std::string field = sizes.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
        long long v = 0;
        if (!parse_ll(field, v)) throw ReplayError(line_no_, "non-numeric set size");
        if (v < 0) throw ReplayError(line_no_, "negative set size");
        if (!truth.set_sizes.empty() && truth.set_sizes.back() < v)
            throw ReplayError(line_no_, "set_sizes not nonincreasing");
        truth.set_sizes.push_back(v);
        if (bar == std::string::npos) break;
        pos = bar + 1;
    }
    if (static_cast<int>(truth.set_sizes.size()) != expected_k_)
        throw ReplayError(line_no_, "expected " + std::to_string(expected_k_) + " set sizes, got " +
                                        std::to_string(truth.set_sizes.size()));
    return truth;
}

void write_replay_header(std::ostream& out) { out << "t,f_star,set_sizes\n"; }

void write_replay_row(std::ostream& out, const StepTruth& truth) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", truth.f_star);
    out << truth.t << ',' << buf << ',';
    for (std::size_t i = 0; i < truth.set_sizes.size(); ++i) {
        if (i) out << '|';
        out << truth.set_sizes[i];
    }
    out << '\n';
}

}  // namespace ocp
